#include "fmdp/slices.hpp"

#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <string>

namespace fmdp {

SliceEvaluator::SliceEvaluator(const Mdp& mdp, Policy p) : mdp_(&mdp), p_(std::move(p)) {
    if (!is_policy(mdp, p_))
        throw Error(ErrorKind::InvalidPolicy, "policy does not match the model");
    const std::size_t n = mdp.n_states();
    policy_reward_.resize(static_cast<Eigen::Index>(n));
    for (StateId s = 0; s < n; ++s)
        policy_reward_(static_cast<Eigen::Index>(s)) = p_.action(mdp, s).expected_reward();
    partial_sums_.resize(n);
    slice_sets_.resize(n);
    for (StateId s = 0; s < n; ++s) {
        partial_sums_[s].resize(mdp.actions(s).size());
        slice_sets_[s].resize(mdp.actions(s).size());
    }
}

void SliceEvaluator::check_action(StateId s, std::size_t a) const {
    if (s >= mdp_->n_states())
        throw Error(ErrorKind::ActionNotValid, "unknown state index " + std::to_string(s));
    if (a >= mdp_->actions(s).size())
        throw Error(ErrorKind::ActionNotValid, "action index " + std::to_string(a) +
                                                   " is not available in state '" + mdp_->state_name(s) + "'");
}

const Matrix& SliceEvaluator::policy_distribution(std::size_t k) {
    const auto n = static_cast<Eigen::Index>(mdp_->n_states());
    while (policy_dist_.size() <= k) {
        const std::size_t step = policy_dist_.size();
        Matrix next = Matrix::Zero(n, n);
        if (step == 0) {
            next.setIdentity();
        } else {
            for (Eigen::Index row = 0; row < n; ++row) {
                const auto& act = p_.action(*mdp_, static_cast<StateId>(row));
                if (step == 1) {
                    for (const auto& [t, pr] : act.probs())
                        next(row, static_cast<Eigen::Index>(t)) = pr;
                } else {
                    const Matrix& prev = policy_dist_[step - 1];
                    for (StateId mid : act.support())
                        next.row(row) += act.prob(mid) * prev.row(static_cast<Eigen::Index>(mid));
                }
            }
        }
        policy_dist_.push_back(std::move(next));
    }
    return policy_dist_[k];
}

Vector SliceEvaluator::distribution(std::size_t n, StateId s, std::size_t a) {
    check_action(s, a);
    const auto size = static_cast<Eigen::Index>(mdp_->n_states());
    Vector out = Vector::Zero(size);
    const auto& act = mdp_->action(s, a);
    if (n == 0) {
        out(static_cast<Eigen::Index>(s)) = 1.0;
    } else if (n == 1) {
        for (const auto& [t, pr] : act.probs())
            out(static_cast<Eigen::Index>(t)) = pr;
    } else {
        const Matrix& prev = policy_distribution(n - 1);
        for (StateId mid : act.support())
            out += act.prob(mid) * prev.row(static_cast<Eigen::Index>(mid)).transpose();
    }
    return out;
}

double SliceEvaluator::slice_prob(std::size_t n, StateId s, std::size_t a, StateId target) {
    if (target >= mdp_->n_states())
        throw Error(ErrorKind::DimensionMismatch, "unknown target state index " + std::to_string(target));
    return distribution(n, s, a)(static_cast<Eigen::Index>(target));
}

const std::vector<bool>& SliceEvaluator::slice_set(std::size_t n, StateId s, std::size_t a) {
    check_action(s, a);
    auto& sets = slice_sets_[s][a];
    const std::size_t size = mdp_->n_states();
    while (sets.size() <= n) {
        std::vector<bool> next(size, false);
        if (sets.empty()) {
            next[s] = true;
        } else if (sets.size() == 1) {
            for (StateId t : mdp_->action(s, a).support())
                next[t] = true;
        } else {
            const auto& prev = sets.back();
            for (StateId t = 0; t < size; ++t)
                if (prev[t])
                    for (StateId u : p_.action(*mdp_, t).support())
                        next[u] = true;
        }
        sets.push_back(std::move(next));
    }
    return sets[n];
}

std::vector<StateId> SliceEvaluator::slice(std::size_t n, StateId s, std::size_t a) {
    const auto& set = slice_set(n, s, a);
    std::vector<StateId> out;
    for (StateId t = 0; t < set.size(); ++t)
        if (set[t])
            out.push_back(t);
    return out;
}

double SliceEvaluator::step_reward(std::size_t n, StateId s, std::size_t a) {
    check_action(s, a);
    if (n == 0)
        return mdp_->action(s, a).expected_reward();
    const auto& set = slice_set(n, s, a);
    const Vector dist = distribution(n, s, a);
    double total = 0.0;
    for (StateId t = 0; t < set.size(); ++t)
        if (set[t])
            total += dist(static_cast<Eigen::Index>(t)) * policy_reward_(static_cast<Eigen::Index>(t));
    return total;
}

double SliceEvaluator::truncated_value(std::size_t horizon, StateId s, std::size_t a) {
    check_action(s, a);
    auto& sums = partial_sums_[s][a];
    const double gamma = mdp_->gamma();
    while (sums.size() <= horizon) {
        const std::size_t i = sums.size();
        const double prev = sums.empty() ? 0.0 : sums.back();
        sums.push_back(prev + std::pow(gamma, static_cast<double>(i)) * step_reward(i, s, a));
    }
    return sums[horizon];
}

std::size_t discounted_horizon(double max_abs_reward, double gamma, double tol) {
    if (!(tol > 0))
        throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
    if (!(gamma < 1.0))
        throw Error(ErrorKind::GammaNotContractive, "geometric tail bound needs gamma < 1");
    if (max_abs_reward == 0.0 || gamma == 0.0)
        return 0;
    std::size_t horizon = 0;
    double tail = max_abs_reward * gamma / (1.0 - gamma);
    while (tail > tol) {
        tail *= gamma;
        ++horizon;
    }
    return horizon;
}

ValueEstimate SliceEvaluator::q_expected(StateId s, std::size_t a, double tol) {
    check_action(s, a);
    if (!(tol > 0))
        throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
    const double gamma = mdp_->gamma();
    ValueEstimate est;
    if (gamma < 1.0) {
        const double m = mdp_->max_abs_reward();
        est.horizon = discounted_horizon(m, gamma, tol);
        est.tail_bound = (m == 0.0 || gamma == 0.0)
                             ? 0.0
                             : m * std::pow(gamma, static_cast<double>(est.horizon + 1)) / (1.0 - gamma);
    } else {
        if (!inevitable_terminal(*mdp_, p_))
            throw Error(ErrorKind::NoConvergenceGuarantee,
                        "gamma = 1 and the policy does not inevitably reach terminal states");
        est.horizon = *absorption_step(*mdp_, p_, s, a);
        est.tail_bound = 0.0;
    }
    est.value = truncated_value(est.horizon, s, a);
    return est;
}

std::vector<StateId> q_slice(const Mdp& mdp, const SliceQuery& q) {
    return SliceEvaluator(mdp, q.p).slice(q.n, q.s, q.a);
}

double q_slice_p(const Mdp& mdp, const SliceQuery& q, StateId target) {
    return SliceEvaluator(mdp, q.p).slice_prob(q.n, q.s, q.a, target);
}

double rq_slice(const Mdp& mdp, const SliceQuery& q) {
    return SliceEvaluator(mdp, q.p).step_reward(q.n, q.s, q.a);
}

double q_expected_n(const Mdp& mdp, std::size_t horizon, const SliceQuery& q) {
    return SliceEvaluator(mdp, q.p).truncated_value(horizon, q.s, q.a);
}

ValueEstimate q_expected(const Mdp& mdp, const SliceQuery& q, double tol) {
    return SliceEvaluator(mdp, q.p).q_expected(q.s, q.a, tol);
}

ValueEstimate v_expected(const Mdp& mdp, const Policy& p, StateId s, double tol) {
    return SliceEvaluator(mdp, p).v_expected(s, tol);
}

namespace slice_forms {

namespace {

// Memo keyed on (n, state, action) so the first-step recursion stays linear in n.
using Key = std::tuple<std::size_t, StateId, std::size_t>;

std::vector<StateId> first_step_set(const Mdp& mdp, const Policy& p, std::size_t n, StateId s, std::size_t a,
                                    std::map<Key, std::vector<StateId>>& memo) {
    if (n == 0)
        return {s};
    const Key key{n, s, a};
    if (const auto it = memo.find(key); it != memo.end())
        return it->second;
    std::set<StateId> out;
    for (StateId next : mdp.action(s, a).support())
        for (StateId t : first_step_set(mdp, p, n - 1, next, p[next], memo))
            out.insert(t);
    return memo[key] = std::vector<StateId>(out.begin(), out.end());
}

double first_step_reward(const Mdp& mdp, const Policy& p, std::size_t n, StateId s, std::size_t a,
                         std::map<Key, double>& memo) {
    const auto& act = mdp.action(s, a);
    if (n == 0)
        return act.expected_reward();
    const Key key{n, s, a};
    if (const auto it = memo.find(key); it != memo.end())
        return it->second;
    double total = 0.0;
    for (StateId next : act.support())
        total += act.prob(next) * first_step_reward(mdp, p, n - 1, next, p[next], memo);
    return memo[key] = total;
}

} // namespace

std::vector<StateId> q_slice_first_step(const Mdp& mdp, const Policy& p, std::size_t n, StateId s,
                                        std::size_t a) {
    std::map<Key, std::vector<StateId>> memo;
    return first_step_set(mdp, p, n, s, a, memo);
}

double q_slice_p_forward(const Mdp& mdp, const Policy& p, std::size_t n, StateId s, std::size_t a,
                         StateId target) {
    if (n == 0)
        return target == s ? 1.0 : 0.0;
    const std::size_t size = mdp.n_states();
    std::vector<double> mass(size, 0.0);
    std::set<StateId> slice;
    for (const auto& [t, pr] : mdp.action(s, a).probs())
        mass[t] = pr;
    for (StateId t : mdp.action(s, a).support())
        slice.insert(t);
    for (std::size_t k = 2; k <= n; ++k) {
        std::vector<double> next(size, 0.0);
        std::set<StateId> next_slice;
        for (StateId mid : slice) {
            const auto& act = p.action(mdp, mid);
            for (const auto& [t, pr] : act.probs())
                next[t] += mass[mid] * pr;
            for (StateId t : act.support())
                next_slice.insert(t);
        }
        mass = std::move(next);
        slice = std::move(next_slice);
    }
    return mass.at(target);
}

double rq_slice_first_step(const Mdp& mdp, const Policy& p, std::size_t n, StateId s, std::size_t a) {
    std::map<Key, double> memo;
    return first_step_reward(mdp, p, n, s, a, memo);
}

} // namespace slice_forms

} // namespace fmdp
