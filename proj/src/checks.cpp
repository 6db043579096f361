#include "fmdp/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "fmdp/bellman.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/slices.hpp"
#include "fmdp/solvers.hpp"

namespace fmdp {

bool CheckReport::all_passed() const {
    return std::none_of(results.begin(), results.end(),
                        [](const CheckResult& r) { return r.status == CheckStatus::Fail; });
}

std::vector<std::string> CheckReport::warnings() const {
    std::vector<std::string> out;
    for (const auto& r : results)
        if (r.status == CheckStatus::Skipped)
            out.push_back(r.name + ": " + r.detail);
    return out;
}

namespace {

constexpr double tol_num = 1e-9;
constexpr double slice_value_tol = 1e-7;

std::string describe(double worst, double bound) {
    std::ostringstream os;
    os.precision(3);
    os << "worst " << std::scientific << worst + 0.0 << " (bound " << bound << ")";
    return os.str();
}

/// Tracks the tightest instance of a family of inequalities gap <= limit.
struct Tally {
    double margin = -std::numeric_limits<double>::infinity();
    double gap = 0.0;
    double limit = 0.0;
    std::size_t cases = 0;
    bool ok = true;

    void observe(double g, double l) {
        ++cases;
        if (!(g <= l))
            ok = false;
        if (g - l > margin || std::isnan(g)) {
            margin = g - l;
            gap = g;
            limit = l;
        }
    }
    CheckResult result(std::string name) const {
        std::string detail = cases == 0 ? "no cases" : std::to_string(cases) + " cases, " + describe(gap, limit);
        return {std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail)};
    }
};

std::vector<Policy> pick_policies(const Mdp& mdp, const CheckOptions& opts, std::mt19937_64& rng) {
    if (policy_count(mdp) <= std::max<std::size_t>(opts.sampled_policies, 1))
        return enumerate_policies(mdp);
    std::vector<Policy> out;
    for (std::size_t k = 0; k < opts.sampled_policies; ++k) {
        std::vector<std::size_t> choice(mdp.n_states());
        for (StateId s = 0; s < mdp.n_states(); ++s)
            choice[s] = std::uniform_int_distribution<std::size_t>(0, mdp.actions(s).size() - 1)(rng);
        out.emplace_back(std::move(choice));
    }
    return out;
}

Vector random_vector(std::size_t n, std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = dist(rng);
    return v;
}

void for_each_query(const Mdp& mdp, const std::function<void(StateId, std::size_t)>& fn) {
    for (StateId s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.actions(s).size(); ++a)
            fn(s, a);
}

} // namespace

CheckReport run_checks(const Mdp& mdp, const CheckOptions& opts) {
    CheckReport report;
    auto& out = report.results;
    std::mt19937_64 rng(opts.seed);
    const std::vector<Policy> policies = pick_policies(mdp, opts, rng);
    const double gamma = mdp.gamma();
    const bool contractive = gamma < 1.0;
    const std::size_t depth = opts.depth;

    {
        Tally t;
        for_each_query(mdp, [&](StateId s, std::size_t a) {
            double sum = 0.0;
            for (const auto& [succ, p] : mdp.action(s, a).probs()) {
                t.observe(-p, 0.0);
                sum += p;
            }
            t.observe(std::abs(sum - 1.0), tol_pmf);
        });
        out.push_back(t.result("pmf-normalization"));
    }

    Tally normalization, nonneg, support, recursion, qrec, split, absorb, stochastic;
    for (const auto& p : policies) {
        SliceEvaluator ev(mdp, p);
        for_each_query(mdp, [&](StateId s, std::size_t a) {
            for (std::size_t n = 0; n <= depth; ++n) {
                const Vector dist = ev.distribution(n, s, a);
                const auto slice = ev.slice(n, s, a);
                if (n >= 1) {
                    double mass = 0.0;
                    for (StateId t : slice)
                        mass += dist(static_cast<Eigen::Index>(t));
                    normalization.observe(std::abs(mass - 1.0), static_cast<double>(n) * tol_num);
                }
                nonneg.observe(-dist.minCoeff(), 0.0);
                for (StateId t = 0; t < mdp.n_states(); ++t) {
                    const bool member = std::binary_search(slice.begin(), slice.end(), t);
                    const bool positive = dist(static_cast<Eigen::Index>(t)) > tol_pmf;
                    support.observe(member == positive ? 0.0 : 1.0, 0.0);
                }

                const auto alt_slice = slice_forms::q_slice_first_step(mdp, p, n, s, a);
                recursion.observe(alt_slice == slice ? 0.0 : 1.0, 0.0);
                for (StateId t = 0; t < mdp.n_states(); ++t)
                    recursion.observe(std::abs(slice_forms::q_slice_p_forward(mdp, p, n, s, a, t) -
                                               dist(static_cast<Eigen::Index>(t))),
                                      tol_num);
                recursion.observe(std::abs(slice_forms::rq_slice_first_step(mdp, p, n, s, a) -
                                           ev.step_reward(n, s, a)),
                                  tol_num);

                if (n + 1 <= depth) {
                    const auto& act = mdp.action(s, a);
                    double rhs = 0.0;
                    for (StateId t : act.support())
                        rhs += act.prob(t) * (act.reward(t) + gamma * ev.truncated_value(n, t, p[t]));
                    qrec.observe(std::abs(ev.truncated_value(n + 1, s, a) - rhs), tol_num);
                }
                for (std::size_t m = 0; n + 1 + m <= depth; ++m) {
                    const Vector next = ev.distribution(n + 1, s, a);
                    double rhs = ev.truncated_value(n, s, a);
                    for (StateId t : ev.slice(n + 1, s, a))
                        rhs += std::pow(gamma, static_cast<double>(n + 1)) * next(static_cast<Eigen::Index>(t)) *
                               ev.truncated_value(m, t, p[t]);
                    split.observe(std::abs(ev.truncated_value(n + 1 + m, s, a) - rhs), tol_num);
                }
            }
        });
        for (StateId s = 0; s < mdp.n_states(); ++s)
            if (is_terminal_state(mdp, s))
                for (std::size_t n = 0; n <= depth; ++n)
                    absorb.observe(std::abs(ev.slice_prob(n, s, p[s], s) - 1.0), tol_num);
        stochastic.observe(is_stochastic(policy_matrices(mdp, p).T) ? 0.0 : 1.0, 0.0);
    }
    out.push_back(normalization.result("slice-normalization"));
    out.push_back(nonneg.result("slice-nonnegative"));
    out.push_back(support.result("slice-support"));
    out.push_back(recursion.result("slice-recursion-forms"));
    out.push_back(qrec.result("truncated-value-recursion"));
    out.push_back(split.result("truncated-value-split"));
    out.push_back(absorb.result("terminal-absorption"));
    out.push_back(stochastic.result("transition-matrix-stochastic"));

    const auto skip = [&](const char* name, std::string why) {
        out.push_back({name, CheckStatus::Skipped, std::move(why)});
    };

    const std::vector<const char*> gamma_checks = {"bellman-residual", "slice-vs-exact", "neumann-vs-direct",
                                                   "contraction-L", "contraction-L-max", "greedy-attainment"};
    if (!contractive) {
        for (const char* name : gamma_checks)
            skip(name, "gamma = 1; matrix evaluation needs gamma < 1");
    } else {
        Tally residual, slice_exact, neumann, contraction_l, contraction_max, attain;
        for (const auto& p : policies) {
            const Vector v = policy_value_exact(mdp, p);
            residual.observe(bellman_residual(mdp, p, v), tol_residual);
            neumann.observe(sup_norm(Vector(policy_value_exact(mdp, p, EvalMethod::Neumann) - v)), 1e-6);
            SliceEvaluator ev(mdp, p);
            for (StateId s = 0; s < mdp.n_states(); ++s) {
                const auto est = ev.v_expected(s, slice_value_tol);
                slice_exact.observe(std::abs(est.value - v(static_cast<Eigen::Index>(s))),
                                    slice_value_tol + tol_residual);
            }
        }
        const double scale = 1.0 + mdp.max_abs_reward() / (1.0 - gamma);
        for (std::size_t k = 0; k < opts.vector_pairs; ++k) {
            const Vector u = random_vector(mdp.n_states(), rng, scale);
            const Vector w = random_vector(mdp.n_states(), rng, scale);
            const double dist = sup_norm(Vector(u - w));
            const auto& p = policies[k % policies.size()];
            contraction_l.observe(sup_norm(Vector(apply_L(mdp, p, u) - apply_L(mdp, p, w))), gamma * dist + 1e-12);
            contraction_max.observe(sup_norm(Vector(apply_L_max(mdp, u) - apply_L_max(mdp, w))),
                                    gamma * dist + 1e-12);
            const Policy g = greedy_policy(mdp, u);
            attain.observe(sup_norm(Vector(apply_L(mdp, g, u) - apply_L_max(mdp, u))), tie_tol);
        }
        out.push_back(residual.result("bellman-residual"));
        out.push_back(slice_exact.result("slice-vs-exact"));
        out.push_back(neumann.result("neumann-vs-direct"));
        out.push_back(contraction_l.result("contraction-L"));
        out.push_back(contraction_max.result("contraction-L-max"));
        out.push_back(attain.result("greedy-attainment"));
    }

    const std::vector<const char*> oracle_checks = {"vmax-fixed-point", "universal-optimal-exists",
                                                    "optimality-equivalence", "L-max-policy-level",
                                                    "pi-certified"};
    const std::size_t count = policy_count(mdp);
    if (!contractive) {
        for (const char* name : oracle_checks)
            skip(name, "gamma = 1; the oracle needs gamma < 1");
    } else if (count > opts.policy_cap) {
        for (const char* name : oracle_checks)
            skip(name, "PolicySpaceTooLarge: " + std::to_string(count) + " policies exceed the cap of " +
                           std::to_string(opts.policy_cap));
    } else {
        const auto oracle = oracle_solve(mdp, {opts.policy_cap, opts.parallel});
        Tally fixed, exists, equiv, policy_level, pi;
        fixed.observe(sup_norm(Vector(apply_L_max(mdp, oracle.vmax) - oracle.vmax)), 2 * opt_tol);
        exists.observe(oracle.universal_optimal.empty() ? 1.0 : 0.0, 0.0);
        for (std::size_t k = 0; k < oracle.policies.size(); ++k) {
            const bool member = std::binary_search(oracle.universal_optimal.begin(), oracle.universal_optimal.end(), k);
            const bool at_vmax = sup_norm(Vector(oracle.value_table[k] - oracle.vmax)) <= opt_tol;
            equiv.observe(member == at_vmax ? 0.0 : 1.0, 0.0);
        }
        for (std::size_t k = 0; k < std::min<std::size_t>(opts.vector_pairs, 16); ++k) {
            const Vector u = random_vector(mdp.n_states(), rng, 1.0 + mdp.max_abs_reward() / (1.0 - gamma));
            Vector best = apply_L(mdp, oracle.policies.front(), u);
            for (const auto& p : oracle.policies)
                best = best.cwiseMax(apply_L(mdp, p, u));
            policy_level.observe(sup_norm(Vector(best - apply_L_max(mdp, u))), 1e-12);
        }
        const auto solved = policy_iteration(mdp, first_policy(mdp));
        const std::size_t idx = policy_index(mdp, solved.final_policy);
        pi.observe(std::binary_search(oracle.universal_optimal.begin(), oracle.universal_optimal.end(), idx) ? 0.0
                                                                                                               : 1.0,
                   0.0);
        out.push_back(fixed.result("vmax-fixed-point"));
        out.push_back(exists.result("universal-optimal-exists"));
        out.push_back(equiv.result("optimality-equivalence"));
        out.push_back(policy_level.result("L-max-policy-level"));
        out.push_back(pi.result("pi-certified"));
    }
    return report;
}

} // namespace fmdp
