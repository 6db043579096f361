#pragma once

// Slice semantics: the set of states an agent may occupy n steps after taking
// action a in state s and following p thereafter, the probability of each, and
// the expected one-step reward earned from that slice. Discounted values are
// truncated sums of those rewards with a certified geometric tail bound.

#include <cstddef>
#include <vector>

#include "fmdp/linalg.hpp"
#include "fmdp/mdp.hpp"

namespace fmdp {

struct SliceQuery {
    std::size_t n = 0;
    Policy p;
    StateId s = 0;
    std::size_t a = 0;  // index into actions(s)
};

struct ValueEstimate {
    double value = 0.0;
    double tail_bound = 0.0;
    std::size_t horizon = 0;
};

/**
 * Memoizing evaluator for one (model, policy) pair. Every query shares the
 * per-step distributions of the policy, so evaluating all (s, a) pairs costs
 * one pass over the horizon rather than one recursion tree per query.
 *
 * Not thread-safe; create one per thread.
 */
class SliceEvaluator {
public:
    SliceEvaluator(const Mdp& mdp, Policy p);

    const Mdp& mdp() const noexcept { return *mdp_; }
    const Policy& policy() const noexcept { return p_; }

    std::vector<StateId> slice(std::size_t n, StateId s, std::size_t a);
    /// Probability of each target after n steps; entry t is q_slice_p(n, s, a, t).
    Vector distribution(std::size_t n, StateId s, std::size_t a);
    double slice_prob(std::size_t n, StateId s, std::size_t a, StateId target);
    double step_reward(std::size_t n, StateId s, std::size_t a);
    double truncated_value(std::size_t horizon, StateId s, std::size_t a);

    ValueEstimate q_expected(StateId s, std::size_t a, double tol);
    ValueEstimate v_expected(StateId s, double tol) { return q_expected(s, p_[s], tol); }

private:
    void check_action(StateId s, std::size_t a) const;
    /// Row s'' holds distribution(k, s'', p(s'')).
    const Matrix& policy_distribution(std::size_t k);
    const std::vector<bool>& slice_set(std::size_t n, StateId s, std::size_t a);

    const Mdp* mdp_;
    Policy p_;
    std::vector<std::vector<std::vector<std::vector<bool>>>> slice_sets_;  // [s][a][n]
    Vector policy_reward_;                  // r_p(s') over the support of p(s')
    std::vector<Matrix> policy_dist_;       // indexed by step k
    std::vector<std::vector<std::vector<double>>> partial_sums_;  // [s][a][horizon]
};

// One-shot forms; each builds a call-local evaluator.
std::vector<StateId> q_slice(const Mdp& mdp, const SliceQuery& q);
double q_slice_p(const Mdp& mdp, const SliceQuery& q, StateId target);
double rq_slice(const Mdp& mdp, const SliceQuery& q);
double q_expected_n(const Mdp& mdp, std::size_t horizon, const SliceQuery& q);
/// Needs gamma < 1, or inevitable termination under q.p; q.n is ignored.
ValueEstimate q_expected(const Mdp& mdp, const SliceQuery& q, double tol);
ValueEstimate v_expected(const Mdp& mdp, const Policy& p, StateId s, double tol);

/// Least N with m * gamma^(N+1) / (1 - gamma) <= tol; gamma must be below 1.
std::size_t discounted_horizon(double max_abs_reward, double gamma, double tol);

/**
 * Alternative evaluation orders for the slice functions, used to cross-check
 * the evaluator: q_slice and rq_slice recurse through the first transition,
 * q_slice_p propagates forward from the previous slice.
 */
namespace slice_forms {

std::vector<StateId> q_slice_first_step(const Mdp& mdp, const Policy& p, std::size_t n, StateId s,
                                        std::size_t a);
double q_slice_p_forward(const Mdp& mdp, const Policy& p, std::size_t n, StateId s, std::size_t a,
                         StateId target);
double rq_slice_first_step(const Mdp& mdp, const Policy& p, std::size_t n, StateId s, std::size_t a);

} // namespace slice_forms

} // namespace fmdp
