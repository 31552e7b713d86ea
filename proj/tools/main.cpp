// orderdp command line driver: run solvers and verification suites on JSON
// model configs, writing summary JSON and CSV tables.

#include "io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using namespace orderdp;
using io::json;
using io::ParseError;

namespace {

const std::vector<std::string> kKinds{"mdp",        "empirical",      "approximate", "risk_q",
                                      "ce_choice",  "structural",     "distributional", "firm"};

enum Exit { kOk = 0, kViolation = 1, kParse = 2, kNonConvergence = 3, kWellPosedness = 4 };

struct RunConfig {
    json raw;
    std::string hash;
    std::string model;
    fs::path base_dir;
    Algorithm algorithm = Algorithm::Vfi;
    int opi_m = 5;
    double tol = 1e-10;
    int max_iter = 100000;
    std::optional<std::uint64_t> seed;
    fs::path output_dir;

    SolverOptions solver() const {
        SolverOptions o;
        o.tol = tol;
        o.max_iter = max_iter;
        return o;
    }
    json section(const std::string& key) const {
        if (!raw.contains(key)) return json::object();
        if (!raw[key].is_object()) throw ParseError("field '" + key + "' must be an object");
        return raw[key];
    }
    std::uint64_t require_seed(const std::string& why) const {
        if (!seed) throw ParseError("field 'seed' is required when " + why);
        return *seed;
    }
};

RunConfig load_config(const fs::path& path) {
    RunConfig c;
    c.raw = io::load_json_file(path);
    if (!c.raw.is_object()) throw ParseError("config must be a JSON object");
    c.hash = io::config_hash(c.raw);
    c.base_dir = path.parent_path();
    c.model = io::get_string(c.raw, "model", "");
    if (c.model.empty()) throw ParseError("missing field 'model'");
    if (std::find(kKinds.begin(), kKinds.end(), c.model) == kKinds.end())
        throw ParseError("unknown model kind '" + c.model + "'");
    try {
        c.algorithm = parse_algorithm(io::get_string(c.raw, "algorithm", "vfi"));
    } catch (const ModelError& e) {
        throw ParseError(e.what());
    }
    c.opi_m = io::get_int(c.raw, "opi_m", c.opi_m);
    if (c.opi_m < 1) throw ParseError("opi_m must be >= 1");
    c.tol = io::get_number(c.raw, "tol", c.tol);
    if (!(c.tol > 0.0)) throw ParseError("tol must be positive");
    c.max_iter = io::get_int(c.raw, "max_iter", c.max_iter);
    if (c.max_iter < 1) throw ParseError("max_iter must be >= 1");
    if (c.raw.contains("seed")) {
        if (!c.raw["seed"].is_number_unsigned()) throw ParseError("field 'seed' must be a nonnegative integer");
        c.seed = c.raw["seed"].get<std::uint64_t>();
    }
    c.output_dir = io::get_string(c.raw, "output_dir", "results");
    if (const char* env = std::getenv("ORDERDP_OUTPUT_DIR"); env && *env) c.output_dir = env;
    return c;
}

json instance_doc(const RunConfig& c) {
    if (c.raw.contains("instance")) return c.raw["instance"];
    if (c.raw.contains("instance_path")) {
        fs::path p = io::get_string(c.raw, "instance_path", "");
        if (p.is_relative()) p = c.base_dir / p;
        return io::load_json_file(p);
    }
    throw ParseError("config needs 'instance', 'instance_path' or 'random'");
}

// ---------------------------------------------------------------------------
// Instances

struct RandomSpec {
    int count = 1;
    int n_states = 3;
    int n_actions = 2;
    int n_shocks = 2;
    double beta = 0.9;
};

std::optional<RandomSpec> random_spec(const RunConfig& c) {
    if (!c.raw.contains("random")) return std::nullopt;
    const json r = c.section("random");
    RandomSpec s;
    s.count = io::get_int(r, "count", s.count);
    s.n_states = io::get_int(r, "n_states", s.n_states);
    s.n_actions = io::get_int(r, "n_actions", s.n_actions);
    s.n_shocks = io::get_int(r, "n_shocks", s.n_shocks);
    s.beta = io::get_number(r, "beta", s.beta);
    if (s.count < 1 || s.n_states < 1 || s.n_actions < 1 || s.n_shocks < 1)
        throw ParseError("random instance sizes must be positive");
    return s;
}

std::vector<MdpTables> mdp_instances(const RunConfig& c, std::mt19937_64& rng) {
    std::vector<MdpTables> out;
    if (auto spec = random_spec(c)) {
        for (int k = 0; k < spec->count; ++k) out.push_back(random_mdp(spec->n_states, spec->n_actions, rng));
    } else {
        out.push_back(io::parse_mdp(instance_doc(c)));
    }
    return out;
}

std::vector<StructuralTables> structural_instances(const RunConfig& c, std::mt19937_64& rng) {
    std::vector<StructuralTables> out;
    if (auto spec = random_spec(c)) {
        for (int k = 0; k < spec->count; ++k)
            out.push_back(random_structural(spec->n_states, spec->n_actions, spec->n_shocks, spec->beta, rng));
    } else {
        out.push_back(io::parse_structural(instance_doc(c)));
    }
    return out;
}

std::mt19937_64 make_rng(const RunConfig& c) {
    if (c.raw.contains("random")) return std::mt19937_64(c.require_seed("random instances are requested"));
    return std::mt19937_64(c.seed.value_or(0));
}

std::vector<int> int_list(const json& j, const std::string& key) {
    std::vector<int> out;
    for (double v : io::flat_numbers(io::require(j, key), key, io::require(j, key).size())) out.push_back(static_cast<int>(v));
    return out;
}

Approximation parse_approximation(const json& j) {
    const std::string kind = io::get_string(j, "kind", "identity");
    if (kind == "identity") return identity_approximation();
    if (kind == "coarsen_min") return coarsen_min_approximation(int_list(j, "cells"));
    if (kind == "subsample") return subsample_approximation(int_list(j, "kept"));
    if (kind == "clamp") return clamp_approximation(io::get_number(j, "lo"), io::get_number(j, "hi"));
    throw ParseError("unknown approximation kind '" + kind + "'");
}

std::shared_ptr<const CertaintyEquivalent> parse_ce(const json& j, const StructuralTables& s) {
    const std::string kind = io::get_string(j, "kind", "expectation");
    if (kind == "expectation") return make_expectation_ce(s);
    if (kind == "risk_sensitive") return make_risk_sensitive_ce(s, io::get_number(j, "theta"));
    if (kind == "max") return make_max_ce(s);
    throw ParseError("unknown certainty equivalent kind '" + kind + "'");
}

FirmConfig firm_config(const RunConfig& c) {
    if (c.raw.contains("instance") || c.raw.contains("instance_path")) return io::parse_firm(instance_doc(c));
    return FirmConfig{};
}

/// Calls f(model, index, extra) for every instance of an ADP model kind.
/// `extra` collects kind-specific facts for the summary.
template <class F>
void for_each_model(const RunConfig& c, F&& f) {
    std::mt19937_64 rng = make_rng(c);
    if (c.model == "mdp") {
        int i = 0;
        for (auto& t : mdp_instances(c, rng)) {
            json extra = json::object();
            f(MdpModel(std::move(t)), i++, extra);
        }
    } else if (c.model == "empirical") {
        const int n = io::get_int(c.raw, "samples", 1000);
        if (n < 1) throw ParseError("samples must be >= 1");
        std::mt19937_64 sampler(c.require_seed("sampling an empirical model"));
        int i = 0;
        for (auto& base : mdp_instances(c, rng)) {
            const MdpModel emp(empirical_mdp(base, uniform_samples(base, n, sampler)));
            const MdpModel exact(base);
            const ValueVector v_exact = hpi(exact, exact.lower_start()).value;
            json extra = {{"samples", n}, {"exact_value", std::vector<double>(v_exact.begin(), v_exact.end())}};
            f(emp, i++, extra);
        }
    } else if (c.model == "approximate") {
        const Approximation a = parse_approximation(c.section("approximation"));
        int i = 0;
        for (auto& t : mdp_instances(c, rng)) {
            json extra = {{"approximation", a.name}};
            f(ApproximateModel<MdpModel>(MdpModel(std::move(t)), a), i++, extra);
        }
    } else if (c.model == "risk_q") {
        const std::optional<double> theta =
            c.raw.contains("theta") ? std::optional<double>(io::get_number(c.raw, "theta")) : std::nullopt;
        std::vector<QFactorTables> qs;
        if (auto spec = random_spec(c)) {
            if (!theta) throw ParseError("missing field 'theta'");
            for (auto& t : mdp_instances(c, rng)) qs.push_back({std::move(t), *theta});
        } else {
            qs.push_back(io::parse_risk(instance_doc(c), theta));
        }
        int i = 0;
        for (auto& q : qs) {
            json extra = {{"theta", q.theta}};
            f(RiskModel(std::move(q)), i++, extra);
        }
    } else if (c.model == "structural") {
        int i = 0;
        for (auto& s : structural_instances(c, rng)) {
            json extra = json::object();
            f(StructuralModel(std::move(s)), i++, extra);
        }
    } else if (c.model == "ce_choice") {
        const json ce = c.section("certainty_equivalent");
        int i = 0;
        for (auto& s : structural_instances(c, rng)) {
            auto e = parse_ce(ce, s);
            json extra = {{"certainty_equivalent", e->name()}};
            f(CeChoiceModel(std::move(s), std::move(e)), i++, extra);
        }
    } else if (c.model == "firm") {
        const FirmModel m(firm_config(c));
        m.require_well_posed();
        json extra = {{"rho_K", m.spectral().rho}};
        f(m, 0, extra);
    } else {
        throw ParseError("model kind '" + c.model + "' is not an ADP model kind");
    }
}

// ---------------------------------------------------------------------------
// Output

class OutputDir {
public:
    explicit OutputDir(const fs::path& dir) : dir_(dir) { fs::create_directories(dir_); }
    void write(const std::string& name, const std::string& content) const {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir_ / name).string());
        out << content;
    }
    void write_json(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }
    const fs::path& path() const { return dir_; }

private:
    fs::path dir_;
};

json header(const RunConfig& c) {
    return {{"tool", "orderdp"}, {"version", version}, {"config_hash", c.hash}, {"model", c.model}};
}

std::vector<double> to_std(const ValueVector& v) { return {v.begin(), v.end()}; }

template <class M>
ValueVector start_value(const M& m, const std::string& start) {
    if (start == "zero") return ValueVector::Zero(m.size());
    if (start == "lower") {
        if constexpr (HasLowerStart<M>) return m.lower_start();
        throw ParseError("model has no lower start");
    }
    if (start == "upper") {
        if constexpr (HasUpperStart<M>) return m.upper_start();
        throw ParseError("model has no upper start");
    }
    throw ParseError("unknown start '" + start + "' (expected zero, lower or upper)");
}

// ---------------------------------------------------------------------------
// run

int run_firm(const RunConfig& c, const OutputDir& out) {
    const FirmModel m(firm_config(c));
    for (const auto& w : m.warnings()) std::cerr << "warning: " << w << "\n";
    const FirmSolution sol = solve_firm(m, c.algorithm, c.opi_m, c.solver());
    std::string csv = "x,value,continuation_value,exit_flag\n";
    for (const auto& r : sol.rows)
        csv += io::fmt(r.x) + "," + io::fmt(r.value) + "," + io::fmt(r.continuation_value) + "," + (r.exit ? "1" : "0") + "\n";
    out.write("firm.csv", csv);
    json s = header(c);
    s["algorithm"] = to_string(c.algorithm);
    if (c.algorithm == Algorithm::Opi) s["opi_m"] = c.opi_m;
    s["rho_K"] = sol.rho.rho;
    s["rho_converged"] = sol.rho.converged;
    s["threshold_x"] = sol.threshold_x ? json(*sol.threshold_x) : json(nullptr);
    s["threshold_index"] = sol.threshold_index;
    s["iterations"] = sol.result.iterations;
    s["residual"] = sol.result.residual;
    s["grid_size"] = m.size();
    s["warnings"] = m.warnings();
    out.write_json("summary.json", s);
    std::cout << "firm: rho_K=" << io::fmt(sol.rho.rho) << " threshold_x="
              << (sol.threshold_x ? io::fmt(*sol.threshold_x) : std::string("none"))
              << " iterations=" << sol.result.iterations << "\n";
    return kOk;
}

DistFixedPointOptions dist_options(const RunConfig& c) {
    const json d = c.section("distributional");
    DistFixedPointOptions o;
    o.n_iter = io::get_int(d, "n_iter", o.n_iter);
    const int cap = io::get_int(d, "support_cap", static_cast<int>(o.support_cap));
    if (cap < 2) throw ParseError("support_cap must be >= 2");
    o.support_cap = static_cast<std::size_t>(cap);
    const std::string proj = io::get_string(d, "projection", "quantile");
    if (proj == "quantile")
        o.projection = ProjectionKind::Quantile;
    else if (proj == "categorical")
        o.projection = ProjectionKind::Categorical;
    else
        throw ParseError("unknown projection '" + proj + "'");
    const std::string start = io::get_string(d, "start", "zero");
    if (start == "zero")
        o.start = DistStart::Zero;
    else if (start == "policy_value")
        o.start = DistStart::PolicyValue;
    else
        throw ParseError("unknown distributional start '" + start + "'");
    return o;
}

std::vector<Policy> dist_policies(const RunConfig& c, const MdpTables& m) {
    const json d = c.section("distributional");
    if (d.contains("policy")) {
        Policy p(int_list(d, "policy"));
        check_policy(m, p);
        return {p};
    }
    return MdpModel(m).policies();
}

int run_distributional(const RunConfig& c, const OutputDir& out) {
    std::mt19937_64 rng = make_rng(c);
    const DistFixedPointOptions opt = dist_options(c);
    json s = header(c);
    s["instances"] = json::array();
    std::string csv = "instance,policy,state,atom,weight\n";
    bool ok = true;
    int i = 0;
    for (const auto& m : mdp_instances(c, rng)) {
        for (const auto& p : dist_policies(c, m)) {
            const auto r = dist_policy_fixed_point(m, p, opt);
            ok = ok && r.within_bound;
            s["instances"].push_back({{"instance", i},
                                      {"policy", p.action},
                                      {"means", to_std(means(r.eta))},
                                      {"policy_value", to_std(r.policy_value)},
                                      {"max_mean_error", r.max_mean_error},
                                      {"error_bound", r.error_bound},
                                      {"projections", r.projections},
                                      {"within_bound", r.within_bound}});
            for (std::size_t x = 0; x < r.eta.size(); ++x)
                for (std::size_t k = 0; k < r.eta[x].size(); ++k)
                    csv += std::to_string(i) + ",\"" + to_string(p) + "\"," + std::to_string(x) + "," +
                           io::fmt(r.eta[x].support()[k]) + "," + io::fmt(r.eta[x].weights()[k]) + "\n";
        }
        ++i;
    }
    out.write("distributions.csv", csv);
    out.write_json("summary.json", s);
    if (!ok) {
        std::cerr << "error: distributional means drifted beyond the error bound\n";
        return kNonConvergence;
    }
    std::cout << "distributional: " << s["instances"].size() << " policy evaluations within bound\n";
    return kOk;
}

int run(const RunConfig& c) {
    const OutputDir out(c.output_dir);
    if (c.model == "firm") return run_firm(c, out);
    if (c.model == "distributional") return run_distributional(c, out);
    json s = header(c);
    s["algorithm"] = to_string(c.algorithm);
    if (c.algorithm == Algorithm::Opi) s["opi_m"] = c.opi_m;
    s["instances"] = json::array();
    std::string csv = "instance,index,value,action\n";
    const std::string start = io::get_string(c.raw, "start", "lower");
    for_each_model(c, [&](const auto& m, int i, json& extra) {
        const SolveResult r = run_algorithm(m, c.algorithm, start_value(m, start), c.opi_m, c.solver());
        json inst = {{"instance", i},
                     {"iterations", r.iterations},
                     {"residual", r.residual},
                     {"start_in_upper_set", r.start_in_upper_set},
                     {"value", to_std(r.value)},
                     {"value_min", r.value.minCoeff()},
                     {"value_max", r.value.maxCoeff()},
                     {"value_mean", r.value.mean()},
                     {"policy", r.policy.action}};
        inst.update(extra);
        s["instances"].push_back(inst);
        for (Eigen::Index k = 0; k < r.value.size(); ++k)
            csv += std::to_string(i) + "," + std::to_string(k) + "," + io::fmt(r.value[k]) + "," +
                   (static_cast<std::size_t>(k) < r.policy.size() ? std::to_string(r.policy[k]) : "") + "\n";
    });
    out.write("values.csv", csv);
    out.write_json("summary.json", s);
    std::cout << c.model << ": solved " << s["instances"].size() << " instance(s) with " << to_string(c.algorithm)
              << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct Checks {
    json items = json::array();
    bool ok = true;
    void add(const std::string& invariant, int instance, bool pass, json detail = json::object()) {
        items.push_back({{"invariant", invariant}, {"instance", instance}, {"pass", pass}, {"detail", detail}});
        ok = ok && pass;
    }
};

template <class M>
void optimality_checks(const M& m, int i, const RunConfig& c, Checks& out) {
    const json sec = c.section("optimality");
    OptimalityOptions o;
    o.tol = io::get_number(sec, "tol", o.tol);
    const auto rep = verify_fundamental_optimality(m, o);
    out.add("B1 greatest policy value exists", i, rep.b1_greatest_element,
            {{"policies", rep.policy_count}, {"witness", rep.witness ? json(rep.witness->action) : json(nullptr)}});
    out.add("B2 v* is the unique Bellman fixed point", i, rep.b2_bellman_fixed_point,
            {{"residual", rep.b2_residual}, {"multistart_gap", rep.b2_multistart_gap}, {"starts", rep.b2_starts}});
    out.add("B3 optimal policies are exactly the v*-greedy policies", i, rep.b3_principle);
    if (!rep.b1_greatest_element) return;
    SolverOptions so;
    so.tol = 1e-12;
    const ValueVector v0 = start_value(m, HasLowerStart<M> ? "lower" : "zero");
    const auto h = hpi(m, v0, so);
    out.add("HPI terminates within |Sigma| iterations", i, h.iterations <= static_cast<int>(rep.policy_count),
            {{"iterations", h.iterations}, {"policies", rep.policy_count}});
    for (auto alg : {Algorithm::Vfi, Algorithm::Hpi, Algorithm::Opi}) {
        const auto r = run_algorithm(m, alg, v0, c.opi_m, so);
        const double gap = sup_distance(r.value, rep.v_star);
        out.add(to_string(alg) + " limit equals the best policy value", i, gap <= 1e-8, {{"gap", gap}});
    }
}

template <class M>
void ordering_checks(const M& m, int i, const RunConfig& c, Checks& out) {
    const json sec = c.section("ordering");
    const int n = io::get_int(sec, "n", 10);
    std::vector<int> ms{2, 5};
    if (sec.contains("m")) ms = sec["m"].is_array() ? int_list(sec, "m") : std::vector<int>{io::get_int(sec, "m")};
    const double tol = io::get_number(sec, "tol", 1e-9);
    const ValueVector v0 = start_value(m, io::get_string(sec, "start", HasLowerStart<M> ? "lower" : "zero"));
    for (int mm : ms) {
        if (mm < 1) throw ParseError("ordering m must be >= 1");
        try {
            const auto rep = check_algorithm_ordering(m, v0, n, mm, tol);
            out.add("algorithm ordering T^k v <= W_m^k v <= H^k v (m=" + std::to_string(mm) + ")", i, rep.all_hold(),
                    {{"n", n}, {"m", mm}, {"checks", rep.checks.size()}, {"worst_violation", rep.worst_violation()}});
        } catch (const PremiseError& e) {
            out.add("start lies in V_U (v0 <= T v0)", i, false, {{"error", e.what()}});
        }
    }
}

template <class M>
void stability_checks(const M& m, int i, const RunConfig& c, std::mt19937_64& rng, Checks& out) {
    const json sec = c.section("stability");
    const int count = io::get_int(sec, "probes", 40);
    SolverOptions so;
    so.tol = 1e-12;
    const auto sol = vfi(m, ValueVector::Zero(m.size()), so);
    const double scale = io::get_number(sec, "scale", 1.0) * std::max(1.0, sol.value.cwiseAbs().maxCoeff());
    const double tol = 1e-9 * std::max(1.0, sol.value.cwiseAbs().maxCoeff());
    auto report = [&](const std::string& name, const VectorOperator& S, const ValueVector& fp) {
        const auto probes = make_stability_probes(fp, count, scale, rng);
        const auto r = check_order_stability(S, fp, probes, tol, name);
        const json d = {{"upward_tested", r.upward_tested}, {"downward_tested", r.downward_tested}, {"skipped", r.skipped}};
        out.add(name + " upward stable", i, r.upward_holds, d);
        out.add(name + " downward stable", i, r.downward_holds, d);
    };
    report("Bellman operator T", [&](const ValueVector& v) { return bellman(m, v); }, sol.value);
    const Policy sigma = sol.policy;
    report("policy operator T_sigma*", [&](const ValueVector& v) { return m.apply(sigma, v); }, m.evaluate(sigma));
}

void distributional_checks(const MdpTables& t, int i, const RunConfig& c, std::mt19937_64& rng, Checks& out) {
    const json sec = c.section("distributional");
    const DistFixedPointOptions opt = dist_options(c);
    const int pairs = io::get_int(sec, "pairs", 200);
    for (const auto& p : dist_policies(c, t)) {
        const auto r = dist_policy_fixed_point(t, p, opt);
        out.add("fixed point means match v_sigma " + to_string(p), i, r.within_bound,
                {{"max_mean_error", r.max_mean_error}, {"error_bound", r.error_bound}});
    }
    const auto pols = MdpModel(t).policies();
    const double span = std::max(1.0, MdpModel(t).reward_max() - MdpModel(t).reward_min()) / (1.0 - t.beta);
    int violations = 0;
    double mass_error = 0.0;
    for (int k = 0; k < pairs; ++k) {
        const Policy& p = pols[std::uniform_int_distribution<std::size_t>(0, pols.size() - 1)(rng)];
        const auto [eta, eta_hat] = random_dominated_pair(t.n_states, 4, -span, span, rng);
        const auto d = dist_policy_operator(t, p, eta);
        const auto d_hat = dist_policy_operator(t, p, eta_hat);
        if (!precedes(dominance_compare(d, d_hat))) ++violations;
        for (const auto& x : d) mass_error = std::max(mass_error, std::abs(x.total_mass() - 1.0));
    }
    out.add("D_sigma preserves stochastic dominance", i, violations == 0, {{"pairs", pairs}, {"violations", violations}});
    out.add("D_sigma conserves mass", i, mass_error <= 1e-12, {{"max_error", mass_error}});
}

int verify(const RunConfig& c, const std::string& suite) {
    const OutputDir out(c.output_dir);
    Checks checks;
    if (suite == "distributional") {
        if (c.model != "distributional" && c.model != "mdp")
            throw ParseError("suite 'distributional' needs model kind distributional or mdp");
        std::mt19937_64 rng = make_rng(c);
        std::mt19937_64 probe_rng(c.require_seed("sampling distributional pairs"));
        int i = 0;
        for (const auto& t : mdp_instances(c, rng)) distributional_checks(t, i++, c, probe_rng, checks);
    } else if (c.model == "distributional") {
        throw ParseError("suite '" + suite + "' is not supported for model kind distributional");
    } else if (suite == "optimality") {
        if (c.model == "firm") {
            FirmConfig fc = firm_config(c);
            fc.grid.clear();
            fc.grid_spec.size = io::get_int(c.section("optimality"), "grid_size", 6);
            const FirmModel mini(fc);
            mini.require_well_posed();
            optimality_checks(mini, 0, c, checks);
        } else {
            for_each_model(c, [&](const auto& m, int i, json&) { optimality_checks(m, i, c, checks); });
        }
    } else if (suite == "ordering") {
        for_each_model(c, [&](const auto& m, int i, json&) { ordering_checks(m, i, c, checks); });
    } else if (suite == "stability") {
        std::mt19937_64 probe_rng(c.require_seed("sampling stability probes"));
        for_each_model(c, [&](const auto& m, int i, json&) { stability_checks(m, i, c, probe_rng, checks); });
    } else {
        throw ParseError("unknown suite '" + suite + "'");
    }
    json rep = header(c);
    rep["suite"] = suite;
    rep["pass"] = checks.ok;
    rep["checks"] = checks.items;
    out.write_json("verify_" + suite + ".json", rep);
    int failed = 0;
    for (const auto& item : checks.items)
        if (!item["pass"].get<bool>()) {
            ++failed;
            std::cerr << "FAIL " << item["invariant"].get<std::string>() << " (instance " << item["instance"] << ")\n";
        }
    std::cout << suite << ": " << checks.items.size() - failed << "/" << checks.items.size() << " checks passed\n";
    return checks.ok ? kOk : kViolation;
}

void list_models() {
    std::cout << "model kinds:\n"
                 "  mdp             finite MDP (suites: optimality, ordering, stability, distributional)\n"
                 "  empirical       MDP with a sampled empirical kernel (optimality, ordering, stability)\n"
                 "  approximate     MDP composed with an approximation operator (optimality, ordering, stability)\n"
                 "  risk_q          risk-sensitive Q-factor model (optimality, ordering, stability)\n"
                 "  ce_choice       discrete choice with a certainty equivalent (optimality, ordering, stability)\n"
                 "  structural      discrete choice with expected value functions (optimality, ordering, stability)\n"
                 "  distributional  return distributions of MDP policies (distributional)\n"
                 "  firm            firm exit problem on a productivity grid (optimality on a mini grid, ordering,\n"
                 "                  stability)\n";
}

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const WellPosednessError& e) {
        std::cerr << "error: not well posed: " << e.what() << "\n";
        return kWellPosedness;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const NumericRangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    } catch (const ModelError& e) {
        std::cerr << "error: invalid model: " << e.what() << "\n";
        return kParse;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    } catch (const PolicyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kViolation;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Order-theoretic dynamic programming solvers and checks"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "solve the configured model and write results");
    run_cmd->add_option("--config", config_path, "model config (JSON)")->required();

    std::string verify_config;
    std::string suite;
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    verify_cmd->add_option("--config", verify_config, "model config (JSON)")->required();
    verify_cmd->add_option("--suite", suite, "optimality, ordering, stability or distributional")->required();

    auto* list_cmd = app.add_subcommand("list-models", "list model kinds and their suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kParse;
    }

    if (*run_cmd) return guarded([&] { return run(load_config(config_path)); });
    if (*verify_cmd) return guarded([&] { return verify(load_config(verify_config), suite); });
    if (*list_cmd) list_models();
    return kOk;
}
