#include "fmdp/solvers.hpp"

#include <algorithm>
#include <string>

namespace fmdp {

std::string_view to_string(Algorithm a) noexcept {
    return a == Algorithm::ValueIteration ? "VI" : "PI";
}

std::string_view to_string(Termination t) noexcept {
    return t == Termination::Converged ? "Converged" : "IterationCapExceeded";
}

Vector value_iterate_step(const Mdp& mdp, const Vector& v) { return apply_L_max(mdp, v); }

double vi_threshold(double epsilon, double gamma) { return epsilon * (1.0 - gamma) / (2.0 * gamma); }

SolveReport value_iteration(const Mdp& mdp, const Vector& v0, double epsilon, std::size_t cap) {
    const double gamma = mdp.gamma();
    if (!(gamma > 0.0 && gamma < 1.0))
        throw Error(ErrorKind::GammaOutOfRange, "value iteration needs 0 < gamma < 1, got " + std::to_string(gamma));
    if (!(epsilon > 0.0))
        throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
    detail::require_same_size(static_cast<Eigen::Index>(mdp.n_states()), v0.size(), "initial vector");

    const double threshold = vi_threshold(epsilon, gamma);
    SolveReport report;
    report.algorithm = Algorithm::ValueIteration;
    report.certificate = epsilon;
    report.termination = Termination::IterationCapExceeded;
    report.trace.push_back({0, v0, std::nullopt, std::nullopt});

    Vector v = v0;
    while (report.iterations < cap) {
        Vector next = value_iterate_step(mdp, v);
        const double delta = sup_norm(Vector(next - v));
        ++report.iterations;
        report.trace.push_back({report.iterations, next, delta, std::nullopt});
        v = std::move(next);
        if (delta < threshold) {
            report.termination = Termination::Converged;
            break;
        }
    }
    report.final_value = v;
    report.final_policy = greedy_policy(mdp, v);
    return report;
}

std::pair<Policy, Vector> policy_iterate_step(const Mdp& mdp, const Policy& p) {
    Vector v = policy_value_exact(mdp, p);
    Policy next = greedy_policy(mdp, v, p);
    return {std::move(next), std::move(v)};
}

std::size_t default_pi_cap(const Mdp& mdp) noexcept { return std::min(policy_count(mdp), max_pi_cap); }

SolveReport policy_iteration(const Mdp& mdp, const Policy& p0, std::optional<std::size_t> cap) {
    if (!(mdp.gamma() < 1.0))
        throw Error(ErrorKind::GammaNotContractive, "policy iteration needs gamma < 1");
    if (!is_policy(mdp, p0))
        throw Error(ErrorKind::InvalidPolicy, "initial policy does not match the model");
    const std::size_t limit = cap.value_or(default_pi_cap(mdp));
    if (limit == 0)
        throw Error(ErrorKind::InvalidArgument, "policy iteration cap must be at least 1");

    SolveReport report;
    report.algorithm = Algorithm::PolicyIteration;
    report.certificate = 0.0;
    report.termination = Termination::IterationCapExceeded;

    Policy p = p0;
    while (report.iterations < limit) {
        auto [next, v] = policy_iterate_step(mdp, p);
        std::optional<double> delta;
        if (!report.trace.empty())
            delta = sup_norm(Vector(v - report.trace.back().value));
        report.trace.push_back({report.iterations, v, delta, p});
        ++report.iterations;
        report.final_value = std::move(v);
        report.final_policy = p;
        if (next == p) {
            report.termination = Termination::Converged;
            break;
        }
        p = std::move(next);
    }
    return report;
}

} // namespace fmdp
