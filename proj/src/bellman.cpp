#include "fmdp/bellman.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace fmdp {

namespace {

void require_policy(const Mdp& mdp, const Policy& p) {
    if (!is_policy(mdp, p))
        throw Error(ErrorKind::InvalidPolicy, "policy does not match the model");
}

void require_dim(const Mdp& mdp, const Vector& v) {
    detail::require_same_size(static_cast<Eigen::Index>(mdp.n_states()), v.size(), "state vector");
}

void require_contractive(const Mdp& mdp) {
    if (!(mdp.gamma() < 1.0))
        throw Error(ErrorKind::GammaNotContractive, "gamma = " + std::to_string(mdp.gamma()) + " is not below 1");
}

} // namespace

PolicyMatrices policy_matrices(const Mdp& mdp, const Policy& p) {
    require_policy(mdp, p);
    const auto n = static_cast<Eigen::Index>(mdp.n_states());
    PolicyMatrices out{Vector::Zero(n), Matrix::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& act = p.action(mdp, static_cast<StateId>(i));
        out.r(i) = act.expected_reward();
        for (const auto& [j, pr] : act.probs())
            out.T(i, static_cast<Eigen::Index>(j)) = pr;
    }
    return out;
}

double action_value(const Mdp& mdp, StateId s, std::size_t a, const Vector& v) {
    const auto& act = mdp.action(s, a);
    double total = 0.0;
    for (const auto& [t, pr] : act.probs())
        total += pr * (act.reward(t) + mdp.gamma() * v(static_cast<Eigen::Index>(t)));
    return total;
}

Vector apply_L(const Mdp& mdp, const Policy& p, const Vector& v) {
    require_dim(mdp, v);
    const auto pm = policy_matrices(mdp, p);
    return pm.r + mdp.gamma() * mat_vec(pm.T, v);
}

Vector apply_L_max(const Mdp& mdp, const Vector& v) {
    require_dim(mdp, v);
    Vector out(v.size());
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        double best = action_value(mdp, s, 0, v);
        for (std::size_t a = 1; a < mdp.actions(s).size(); ++a)
            best = std::max(best, action_value(mdp, s, a, v));
        out(static_cast<Eigen::Index>(s)) = best;
    }
    return out;
}

Policy greedy_policy(const Mdp& mdp, const Vector& v, const std::optional<Policy>& prefer) {
    require_dim(mdp, v);
    if (prefer)
        require_policy(mdp, *prefer);
    std::vector<std::size_t> choice(mdp.n_states());
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        const std::size_t k = mdp.actions(s).size();
        std::vector<double> q(k);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < k; ++a) {
            q[a] = action_value(mdp, s, a, v);
            best = std::max(best, q[a]);
        }
        std::size_t pick = 0;
        while (q[pick] < best - tie_tol)
            ++pick;
        if (prefer && q[(*prefer)[s]] >= best - tie_tol)
            pick = (*prefer)[s];
        choice[s] = pick;
    }
    return Policy(std::move(choice));
}

Vector policy_value_exact(const Mdp& mdp, const Policy& p, EvalMethod method) {
    require_contractive(mdp);
    const auto pm = policy_matrices(mdp, p);
    const auto n = pm.T.rows();
    const Matrix system = Matrix::Identity(n, n) - mdp.gamma() * pm.T;
    Vector v = method == EvalMethod::Direct ? solve_linear(system, pm.r)
                                            : Vector(neumann_inverse(system) * pm.r);
    const double residual = sup_norm(Vector(system * v - pm.r));
    if (!(residual <= tol_residual))
        throw Error(ErrorKind::ResidualTooLarge, "||(I - gamma T) v - r|| = " + std::to_string(residual));
    return v;
}

double bellman_residual(const Mdp& mdp, const Policy& p, const Vector& v) {
    return sup_norm(Vector(v - apply_L(mdp, p, v)));
}

bool vmax_fixed_point_check(const Mdp& mdp, const Vector& v, double tol) {
    require_contractive(mdp);
    return sup_norm(Vector(apply_L_max(mdp, v) - v)) <= tol;
}

} // namespace fmdp
