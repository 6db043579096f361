#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "fmdp/bellman.hpp"
#include "fmdp/linalg.hpp"
#include "fmdp/mdp.hpp"

namespace fmdp {

enum class Algorithm { ValueIteration, PolicyIteration };
enum class Termination { Converged, IterationCapExceeded };

std::string_view to_string(Algorithm a) noexcept;
std::string_view to_string(Termination t) noexcept;

struct TraceEntry {
    std::size_t index = 0;
    Vector value;
    std::optional<double> delta;   // ||v_n - v_{n-1}||_sup; absent for the first entry
    std::optional<Policy> policy;  // policy iteration only
};

struct SolveReport {
    Algorithm algorithm = Algorithm::ValueIteration;
    std::size_t iterations = 0;
    std::vector<TraceEntry> trace;
    Policy final_policy;
    Vector final_value;
    double certificate = 0.0;  // value iteration: epsilon; policy iteration: 0 (exact)
    Termination termination = Termination::Converged;
};

inline constexpr std::size_t default_vi_cap = 100'000;
inline constexpr std::size_t max_pi_cap = 10'000;

/// One application of L_max.
Vector value_iterate_step(const Mdp& mdp, const Vector& v);

/// Stopping threshold eps (1 - gamma) / (2 gamma) on ||v_{n+1} - v_n||_sup.
double vi_threshold(double epsilon, double gamma);

/**
 * Iterates v_{n+1} = L_max v_n from v0 until ||v_{n+1} - v_n||_sup falls
 * strictly below vi_threshold, then extracts the greedy policy of the last
 * iterate. That policy's value is within epsilon of the optimum.
 *
 * iterations counts applications of L_max. Hitting cap returns the partial
 * report with termination = IterationCapExceeded.
 */
SolveReport value_iteration(const Mdp& mdp, const Vector& v0, double epsilon,
                            std::size_t cap = default_vi_cap);

/// Evaluates p exactly and returns the greedy improvement, keeping p where it already attains the max.
std::pair<Policy, Vector> policy_iterate_step(const Mdp& mdp, const Policy& p);

/// min(policy count, 10'000).
std::size_t default_pi_cap(const Mdp& mdp) noexcept;

/**
 * Policy iteration from p0 until the improvement step returns the same policy.
 * iterations counts policy evaluations, so it is at most the number of
 * policies. The trace holds (n, v_n, ||v_n - v_{n-1}||, p_n) for every
 * evaluated policy.
 */
SolveReport policy_iteration(const Mdp& mdp, const Policy& p0, std::optional<std::size_t> cap = std::nullopt);

} // namespace fmdp
