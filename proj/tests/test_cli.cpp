#include "io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace orderdp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("orderdp_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return dir / name;
    }
    fs::path write(const std::string& name, json j) const {
        if (!j.contains("output_dir")) j["output_dir"] = (dir / "out").string();
        return write(name, j.dump(2));
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + ORDERDP_CLI + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json oracle_instance() {
    return {{"n_states", 2},
            {"n_actions", 2},
            {"beta", 0.9},
            {"reward", {{0, 1}, {1, 2}}},
            {"transition", {{{0.7, 0.3}, {0.2, 0.8}}, {{0.7, 0.3}, {0.2, 0.8}}}}};
}

} // namespace

TEST(Io, FlatAndNestedArrays) {
    const json j = json::parse(R"({"a": [1, 2, 3, 4], "b": [[1, 2], [3, 4]], "c": [true, false]})");
    EXPECT_EQ(io::flat_numbers(j["a"], "a", 4), io::flat_numbers(j["b"], "b", 4));
    EXPECT_EQ(io::flat_numbers(j["c"], "c", 2), (std::vector<double>{1, 0}));
    EXPECT_THROW(io::flat_numbers(j["a"], "a", 3), io::ParseError);
    EXPECT_THROW(io::flat_numbers(j, "whole", 4), io::ParseError);
    EXPECT_THROW(io::require(j, "missing"), io::ParseError);
}

TEST(Io, ParseMdpMatchesReference) {
    const MdpTables m = io::parse_mdp(oracle_instance());
    const MdpTables r = two_state_reference_mdp();
    EXPECT_EQ(m.reward, r.reward);
    EXPECT_EQ(m.transition, r.transition);
    EXPECT_DOUBLE_EQ(m.beta, r.beta);
}

TEST(Io, ErrorsNameTheField) {
    json j = oracle_instance();
    j.erase("beta");
    try {
        io::parse_mdp(j);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos) << e.what();
    }
    j = oracle_instance();
    j["transition"][0][0] = {0.5, 0.3};
    EXPECT_THROW(io::parse_mdp(j), ModelError);
}

TEST(Io, FirmDefaultsAndGrid) {
    const FirmConfig f = io::parse_firm(json::object());
    EXPECT_EQ(f.grid_spec.size, 200);
    EXPECT_EQ(f.beta, std::vector<double>{0.95});
    const FirmConfig g = io::parse_firm({{"grid", {0.1, 0.2}}, {"beta", {0.9, 0.8}}});
    EXPECT_EQ(g.grid, (std::vector<double>{0.1, 0.2}));
    EXPECT_EQ(g.beta, (std::vector<double>{0.9, 0.8}));
}

TEST(Io, FormattingAndHash) {
    EXPECT_EQ(io::fmt(0.1), "0.10000000000000001");
    EXPECT_EQ(io::fmt(2.0), "2");
    EXPECT_EQ(io::hex64(io::fnv1a("")), "cbf29ce484222325");
    EXPECT_EQ(io::config_hash(json{{"a", 1}}), io::config_hash(json::parse(R"({ "a" : 1 })")));
}

TEST(Cli, MalformedJsonIsParseError) {
    Scratch s("malformed");
    const auto cfg = s.write("bad.json", std::string("{ \"model\": \"mdp\", "));
    EXPECT_EQ(run_cli("run --config " + cfg.string()), 2);
    EXPECT_EQ(run_cli("run --config " + (s.dir / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
}

TEST(Cli, UnknownModelAndSuite) {
    Scratch s("unknown");
    EXPECT_EQ(run_cli("run --config " + s.write("a.json", json{{"model", "nope"}}).string()), 2);
    const auto cfg = s.write("b.json", json{{"model", "firm"}});
    EXPECT_EQ(run_cli("verify --suite distributional --config " + cfg.string()), 2);
    EXPECT_EQ(run_cli("verify --suite nope --config " + cfg.string()), 2);
}

TEST(Cli, RandomWithoutSeedIsRejected) {
    Scratch s("seed");
    const auto cfg = s.write("r.json", json{{"model", "mdp"}, {"random", {{"count", 2}}}});
    EXPECT_EQ(run_cli("run --config " + cfg.string()), 2);
}

TEST(Cli, UnitDiscountFirmIsIllPosed) {
    Scratch s("beta1");
    const auto cfg = s.write("f.json", json{{"model", "firm"}, {"instance", {{"beta", 1.0}}}});
    EXPECT_EQ(run_cli("run --config " + cfg.string()), 4);
}

TEST(Cli, OracleHpiSummary) {
    Scratch s("oracle");
    const auto cfg = s.write("m.json", json{{"model", "mdp"}, {"algorithm", "hpi"}, {"instance", oracle_instance()}});
    ASSERT_EQ(run_cli("run --config " + cfg.string()), 0);
    const json sum = json::parse(slurp(s.dir / "out" / "summary.json"));
    EXPECT_LE(sum["instances"][0]["iterations"].get<int>(), 4);
    EXPECT_TRUE(fs::exists(s.dir / "out" / "values.csv"));
    const auto v = sum["instances"][0]["value"].get<std::vector<double>>();
    const ValueVector ref = hpi(MdpModel(two_state_reference_mdp()), ValueVector::Zero(2)).value;
    EXPECT_NEAR(v[0], ref[0], 1e-9);
    EXPECT_NEAR(v[1], ref[1], 1e-9);
}

TEST(Cli, FirmSummaryAndCsv) {
    Scratch s("firm");
    const auto cfg = s.write("f.json", json{{"model", "firm"}, {"algorithm", "hpi"}});
    ASSERT_EQ(run_cli("run --config " + cfg.string()), 0);
    const json sum = json::parse(slurp(s.dir / "out" / "summary.json"));
    EXPECT_NEAR(sum["rho_K"].get<double>(), 0.95, 1e-8);
    EXPECT_FALSE(sum["threshold_x"].is_null());
    const std::string csv = slurp(s.dir / "out" / "firm.csv");
    EXPECT_EQ(csv.rfind("x,value,continuation_value,exit_flag\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 201);
}

TEST(Cli, RerunIsByteIdentical) {
    Scratch s("rerun");
    json j = {{"model", "empirical"}, {"seed", 7}, {"samples", 200}, {"instance", oracle_instance()}};
    j["output_dir"] = (s.dir / "one").string();
    const auto a = s.write("a.json", j);
    j["output_dir"] = (s.dir / "two").string();
    const auto b = s.write("b.json", j);
    ASSERT_EQ(run_cli("run --config " + a.string()), 0);
    ASSERT_EQ(run_cli("run --config " + b.string()), 0);
    EXPECT_EQ(slurp(s.dir / "one" / "values.csv"), slurp(s.dir / "two" / "values.csv"));
    // Summaries differ only through the config hash, which covers output_dir.
    json sa = json::parse(slurp(s.dir / "one" / "summary.json"));
    json sb = json::parse(slurp(s.dir / "two" / "summary.json"));
    sa.erase("config_hash");
    sb.erase("config_hash");
    EXPECT_EQ(sa, sb);
}

TEST(Cli, VerifySuitesPass) {
    Scratch s("verify");
    const auto cfg = s.write("m.json", json{{"model", "mdp"}, {"seed", 3}, {"random", {{"count", 3}}}});
    for (const char* suite : {"optimality", "ordering", "stability", "distributional"}) {
        EXPECT_EQ(run_cli(std::string("verify --suite ") + suite + " --config " + cfg.string()), 0) << suite;
        const json rep = json::parse(slurp(s.dir / "out" / (std::string("verify_") + suite + ".json")));
        EXPECT_TRUE(rep["pass"].get<bool>()) << suite;
    }
    const auto firm = s.write("f.json", json{{"model", "firm"}});
    EXPECT_EQ(run_cli("verify --suite optimality --config " + firm.string()), 0);
}
