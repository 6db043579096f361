#pragma once

#include <optional>

#include "fmdp/linalg.hpp"
#include "fmdp/mdp.hpp"

namespace fmdp {

/// One-step reward vector r_p and transition matrix T_p of a policy.
struct PolicyMatrices {
    Vector r;
    Matrix T;
};

inline constexpr double tie_tol = 1e-9;

PolicyMatrices policy_matrices(const Mdp& mdp, const Policy& p);

/// sum_{s'} P(s, a, s') (R(s, s', a) + gamma v(s')).
double action_value(const Mdp& mdp, StateId s, std::size_t a, const Vector& v);

/// L_p v = r_p + gamma T_p v.
Vector apply_L(const Mdp& mdp, const Policy& p, const Vector& v);

/// Per-state maximum of action_value over actions(s).
Vector apply_L_max(const Mdp& mdp, const Vector& v);

/**
 * A policy attaining apply_L_max(v) at every state. Where several actions tie
 * within tie_tol, prefer(s) wins if it is among them, otherwise the lowest
 * action index.
 */
Policy greedy_policy(const Mdp& mdp, const Vector& v, const std::optional<Policy>& prefer = std::nullopt);

enum class EvalMethod { Direct, Neumann };

/// v_p = (I - gamma T_p)^{-1} r_p. Requires gamma < 1.
Vector policy_value_exact(const Mdp& mdp, const Policy& p, EvalMethod method = EvalMethod::Direct);

/// ||v - (r_p + gamma T_p v)||_sup.
double bellman_residual(const Mdp& mdp, const Policy& p, const Vector& v);

/// ||L_max v - v||_sup <= tol. Requires gamma < 1.
bool vmax_fixed_point_check(const Mdp& mdp, const Vector& v, double tol);

} // namespace fmdp
