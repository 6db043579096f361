#pragma once

// Brute-force optimality: evaluates every deterministic stationary policy and
// derives the optimal value vector and the optimal-policy sets from the table.
// Exponential in the number of states; for certifying small instances only.

#include <cstddef>
#include <string>
#include <vector>

#include "fmdp/linalg.hpp"
#include "fmdp/mdp.hpp"

namespace fmdp {

inline constexpr double opt_tol = 1e-7;

struct OracleResult {
    std::vector<Policy> policies;                       // lexicographic enumeration order
    std::vector<Vector> value_table;                    // value of policies[k]
    Vector vmax;
    std::vector<std::vector<std::size_t>> per_state_optimal;  // [s] -> policy indices
    std::vector<std::size_t> universal_optimal;         // policy indices
};

struct OracleOptions {
    std::size_t cap = default_policy_cap;
    bool parallel = false;
};

/// Requires gamma < 1 and at most opts.cap policies.
OracleResult oracle_solve(const Mdp& mdp, const OracleOptions& opts = {});

/// max over enumerated policies of sum_{s'} P(s, a, s') (R + gamma v_p(s')).
double q_max_check(const Mdp& mdp, const OracleResult& oracle, StateId s, const std::string& action_id);
double q_max_check(const Mdp& mdp, const OracleResult& oracle, StateId s, std::size_t a);

} // namespace fmdp
