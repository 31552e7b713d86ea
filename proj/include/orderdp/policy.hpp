#pragma once

#include "orderdp/errors.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace orderdp {

/// Deterministic stationary policy: one action index per state.
struct Policy {
    std::vector<int> action;

    Policy() = default;
    explicit Policy(std::vector<int> a) : action(std::move(a)) {}

    std::size_t size() const { return action.size(); }
    int operator[](std::size_t x) const { return action[x]; }
    int& operator[](std::size_t x) { return action[x]; }

    friend bool operator==(const Policy&, const Policy&) = default;
};

inline std::string to_string(const Policy& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p[i]);
    }
    return s + "]";
}

/// Cartesian product of per-state action sets, first state varying slowest.
/// Refuses to materialize more than `limit` policies.
inline std::vector<Policy> enumerate_policies(const std::vector<std::vector<int>>& action_sets,
                                              std::size_t limit = 1u << 20) {
    std::size_t count = 1;
    for (const auto& s : action_sets) {
        if (s.empty()) throw ModelError("state with empty feasible action set");
        if (count > limit / s.size())
            throw ModelError("policy set too large to enumerate (limit " + std::to_string(limit) + ")");
        count *= s.size();
    }
    std::vector<Policy> out;
    out.reserve(count);
    std::vector<std::size_t> idx(action_sets.size(), 0);
    for (std::size_t k = 0; k < count; ++k) {
        Policy p;
        p.action.resize(action_sets.size());
        for (std::size_t x = 0; x < action_sets.size(); ++x) p.action[x] = action_sets[x][idx[x]];
        out.push_back(std::move(p));
        for (std::size_t x = action_sets.size(); x-- > 0;) {
            if (++idx[x] < action_sets[x].size()) break;
            idx[x] = 0;
        }
    }
    return out;
}

} // namespace orderdp
