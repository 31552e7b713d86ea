#pragma once

// JSON instance loaders and number formatting for the command line tool.

#include <orderdp.hpp>

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace orderdp::io {

using nlohmann::json;

/// Malformed input: unreadable file, bad JSON, or a missing/mistyped field.
class ParseError : public Error {
public:
    using Error::Error;
};

inline json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline const json& require(const json& j, const std::string& key) {
    if (!j.is_object()) throw ParseError("expected an object holding '" + key + "'");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError("missing field '" + key + "'");
    return *it;
}

inline double get_number(const json& j, const std::string& key) {
    const json& v = require(j, key);
    if (!v.is_number()) throw ParseError("field '" + key + "' must be a number");
    return v.get<double>();
}

inline double get_number(const json& j, const std::string& key, double fallback) {
    return j.contains(key) ? get_number(j, key) : fallback;
}

inline int get_int(const json& j, const std::string& key) {
    const json& v = require(j, key);
    if (!v.is_number_integer()) throw ParseError("field '" + key + "' must be an integer");
    return v.get<int>();
}

inline int get_int(const json& j, const std::string& key, int fallback) {
    return j.contains(key) ? get_int(j, key) : fallback;
}

inline std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) throw ParseError("field '" + key + "' must be a string");
    return j[key].get<std::string>();
}

namespace detail {
inline void flatten(const json& j, const std::string& name, std::vector<double>& out) {
    if (j.is_array()) {
        for (const auto& e : j) flatten(e, name, out);
    } else if (j.is_number()) {
        out.push_back(j.get<double>());
    } else if (j.is_boolean()) {
        out.push_back(j.get<bool>() ? 1.0 : 0.0);
    } else {
        throw ParseError("field '" + name + "' holds a non-numeric entry");
    }
}
} // namespace detail

/// Numbers of a flat or arbitrarily nested array in row-major order.
inline std::vector<double> flat_numbers(const json& j, const std::string& name, std::size_t expected) {
    std::vector<double> out;
    detail::flatten(j, name, out);
    if (out.size() != expected)
        throw ParseError("field '" + name + "' has " + std::to_string(out.size()) + " entries, expected " +
                         std::to_string(expected));
    return out;
}

inline MdpTables parse_mdp(const json& j) {
    MdpTables m;
    m.n_states = get_int(j, "n_states");
    m.n_actions = get_int(j, "n_actions");
    if (m.n_states <= 0 || m.n_actions <= 0) throw ParseError("n_states and n_actions must be positive");
    m.beta = get_number(j, "beta");
    const auto nsa = static_cast<std::size_t>(m.n_states) * m.n_actions;
    m.reward = flat_numbers(require(j, "reward"), "reward", nsa);
    m.transition = flat_numbers(require(j, "transition"), "transition", nsa * m.n_states);
    if (j.contains("feasible")) {
        for (double f : flat_numbers(j["feasible"], "feasible", nsa)) {
            if (f != 0.0 && f != 1.0) throw ParseError("field 'feasible' must hold booleans or 0/1");
            m.feasible.push_back(f != 0.0 ? 1 : 0);
        }
    } else {
        m.feasible.assign(nsa, 1);
    }
    m.validate();
    return m;
}

inline QFactorTables parse_risk(const json& j, std::optional<double> theta_fallback = {}) {
    QFactorTables q;
    q.mdp = parse_mdp(j);
    if (j.contains("theta"))
        q.theta = get_number(j, "theta");
    else if (theta_fallback)
        q.theta = *theta_fallback;
    else
        throw ParseError("missing field 'theta'");
    q.validate();
    return q;
}

inline StructuralTables parse_structural(const json& j) {
    StructuralTables s;
    s.n_states = get_int(j, "n_states");
    s.n_actions = get_int(j, "n_actions");
    if (s.n_states <= 0 || s.n_actions <= 0) throw ParseError("n_states and n_actions must be positive");
    s.beta = get_number(j, "beta");
    const auto nsa = static_cast<std::size_t>(s.n_states) * s.n_actions;
    s.transition = flat_numbers(require(j, "transition"), "transition", nsa * s.n_states);
    if (j.contains("shocks")) {
        const json& sh = j["shocks"];
        const json& w = require(sh, "weights");
        if (!w.is_array() || w.empty()) throw ParseError("field 'weights' must be a nonempty array");
        s.shock_weights = flat_numbers(w, "weights", w.size());
        s.shock_values = sh.contains("values") ? flat_numbers(sh["values"], "values", w.size())
                                               : std::vector<double>(w.size(), 0.0);
    } else {
        s.shock_weights = {1.0};
        s.shock_values = {0.0};
    }
    s.reward = flat_numbers(require(j, "reward"), "reward", nsa * s.shock_weights.size());
    s.bound = get_number(j, "bound", 0.0);
    s.validate();
    return s;
}

inline std::vector<double> number_or_array(const json& j, const std::string& key, std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j[key];
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) return flat_numbers(v, key, v.size());
    throw ParseError("field '" + key + "' must be a number or an array");
}

inline FirmConfig parse_firm(const json& j) {
    if (!j.is_object()) throw ParseError("firm instance must be an object");
    FirmConfig c;
    c.p = get_number(j, "p", c.p);
    c.theta = get_number(j, "theta", c.theta);
    c.c = get_number(j, "c", c.c);
    c.beta = number_or_array(j, "beta", c.beta);
    c.q = number_or_array(j, "q", c.q);
    c.mu_A = get_number(j, "mu_A", c.mu_A);
    c.sigma_A = get_number(j, "sigma_A", c.sigma_A);
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.is_array()) {
            c.grid = flat_numbers(g, "grid", g.size());
        } else if (g.is_object()) {
            c.grid_spec.size = get_int(g, "size", c.grid_spec.size);
            c.grid_spec.x_min = get_number(g, "x_min", c.grid_spec.x_min);
            c.grid_spec.x_max = get_number(g, "x_max", c.grid_spec.x_max);
        } else {
            throw ParseError("field 'grid' must be an array of points or {size, x_min, x_max}");
        }
    }
    return c;
}

/// Locale-independent, 17 significant digits.
inline std::string fmt(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    return s;
}

/// Hash of the canonical (key-sorted, compact) serialization of a config.
inline std::string config_hash(const json& config) { return hex64(fnv1a(config.dump())); }

} // namespace orderdp::io
