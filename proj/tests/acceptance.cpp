// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fmdp/cli.hpp"
#include "fmdp/io.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/slices.hpp"
#include "fmdp/solvers.hpp"
#include "support/fixtures.hpp"

using namespace fmdp;
using namespace fmdp::testing;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Records the worst observed margin against a tolerance.
struct Worst {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t cases = 0;
    void add(double x) {
        value = std::max(value, x);
        ++cases;
    }
    std::string text(const char* label) const {
        std::ostringstream s;
        s << cases << " cases, worst " << label << " " << value;
        return s.str();
    }
};

std::string num(double x) {
    std::ostringstream s;
    s << x;
    return s.str();
}

Matrix random_stochastic(std::mt19937_64& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = unit(rng) < 0.3 ? 0.0 : unit(rng);
        if (m.row(i).sum() == 0.0)
            m(i, i) = 1.0;
        m.row(i) /= m.row(i).sum();
    }
    return m;
}

// Independent value oracle: dense LU on (I - gamma T) built from the raw tables.
Vector value_oracle(const Mdp& m, const Policy& p) {
    const auto n = static_cast<Eigen::Index>(m.n_states());
    Matrix t = Matrix::Zero(n, n);
    Vector r = Vector::Zero(n);
    for (StateId s = 0; s < m.n_states(); ++s)
        for (const auto& [u, pr] : m.action(s, p[s]).probs()) {
            t(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(u)) += pr;
            r(static_cast<Eigen::Index>(s)) += pr * m.action(s, p[s]).reward(u);
        }
    return (Matrix::Identity(n, n) - m.gamma() * t).fullPivLu().solve(r);
}

Vector best_value(const Mdp& m) {
    Vector best;
    for (const auto& p : enumerate_policies(m)) {
        const Vector v = value_oracle(m, p);
        best = best.size() == 0 ? v : Vector(best.cwiseMax(v));
    }
    return best;
}

int run_cli_capture(std::vector<std::string> args, std::string& out) {
    args.insert(args.begin(), "fmdp");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    return code;
}

// Shared seeded suite: 2-5 states, 1-3 actions per state, gamma cycling 0.3..0.9.
const std::vector<Mdp>& suite() {
    static const std::vector<Mdp> models = random_suite(20240501, 24);
    return models;
}

// 1. Slice masses sum to one and are non-negative.
Outcome slice_normalization() {
    Worst w;
    bool nonneg = true;
    for (const auto& m : suite())
        for (const auto& p : enumerate_policies(m)) {
            SliceEvaluator ev(m, p);
            for (StateId s = 0; s < m.n_states(); ++s)
                for (std::size_t a = 0; a < m.actions(s).size(); ++a)
                    for (std::size_t n = 1; n <= 6; ++n) {
                        const Vector d = ev.distribution(n, s, a);
                        nonneg = nonneg && d.minCoeff() >= 0.0;
                        w.add(std::abs(d.sum() - 1.0));
                    }
        }
    return {nonneg && w.value <= 1e-8, w.text("|mass - 1|")};
}

// 2. Certified truncated values satisfy the first-step Bellman recursion
//    Q(s, a) = sum_u P(s, a, u) (R(s, u, a) + gamma Q(u, p(u))) for every (s, a, p).
Outcome scalar_bellman() {
    Worst w;
    for (double g : {0.3, 0.9})
        for (const auto& base : suite()) {
            const Mdp m = base.with_gamma(g);
            for (const auto& p : enumerate_policies(m)) {
                SliceEvaluator ev(m, p);
                std::vector<double> v(m.n_states());
                for (StateId u = 0; u < m.n_states(); ++u)
                    v[u] = ev.v_expected(u, 1e-7).value;
                for (StateId s = 0; s < m.n_states(); ++s)
                    for (std::size_t a = 0; a < m.actions(s).size(); ++a) {
                        const auto& act = m.action(s, a);
                        double rhs = 0.0;
                        for (const auto& [u, pr] : act.probs())
                            rhs += pr * (act.reward(u) + g * v[u]);
                        w.add(std::abs(ev.q_expected(s, a, 1e-7).value - rhs));
                    }
            }
        }
    return {w.value <= 5e-7, w.text("residual")};
}

// 3. Stochastic matrices: unit norm, closure under products, submultiplicativity.
Outcome stochastic_matrices() {
    std::mt19937_64 rng(3001);
    Worst norm_gap, submult;
    bool closed = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index n = 1 + trial % 6;
        const Matrix a = random_stochastic(rng, n);
        const Matrix b = random_stochastic(rng, n);
        norm_gap.add(std::abs(op_norm(a) - 1.0));
        closed = closed && is_stochastic(mat_mul(a, b)) && is_stochastic(mat_pow(a, 1 + trial % 9));
        const Matrix c = Matrix::Random(n, n);
        const Matrix d = Matrix::Random(n, n);
        submult.add(op_norm(mat_mul(c, d)) - op_norm(c) * op_norm(d));
    }
    return {closed && norm_gap.value <= 1e-9 && submult.value <= 1e-12,
            norm_gap.text("|norm - 1|") + "; worst submult excess " + num(submult.value)};
}

// 4. Neumann inverse of I - gamma T: residual and agreement with LU.
Outcome neumann_inverse_check() {
    std::mt19937_64 rng(4001);
    std::uniform_real_distribution<double> gam(0.0, 0.95);
    Worst residual, agree;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 1 + trial % 6;
        const Matrix a = Matrix::Identity(n, n) - gam(rng) * random_stochastic(rng, n);
        const Matrix s = neumann_inverse(a);
        residual.add(op_norm(Matrix(a * s - Matrix::Identity(n, n))));
        agree.add(op_norm(Matrix(s - a.fullPivLu().inverse())));
    }
    return {residual.value <= 1e-8 && agree.value <= 1e-6,
            residual.text("residual") + "; worst gap to LU " + num(agree.value)};
}

// 5. Exact policy values agree with the slice semantics.
Outcome exact_vs_slices() {
    Worst w;
    for (const auto& m : suite())
        for (const auto& p : enumerate_policies(m)) {
            const Vector exact = policy_value_exact(m, p);
            SliceEvaluator ev(m, p);
            for (StateId s = 0; s < m.n_states(); ++s)
                w.add(std::abs(exact(static_cast<Eigen::Index>(s)) - ev.v_expected(s, 1e-7).value));
        }
    return {w.value <= 2e-7, w.text("gap")};
}

// 6. L_p and L_max are gamma-contractions.
Outcome contraction() {
    std::mt19937_64 rng(6001);
    std::uniform_real_distribution<double> unit(-10.0, 10.0);
    Worst w;
    for (const auto& m : suite()) {
        const auto n = static_cast<Eigen::Index>(m.n_states());
        const auto policies = enumerate_policies(m);
        for (int k = 0; k < 1000; ++k) {
            Vector u(n), v(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                u(i) = unit(rng);
                v(i) = unit(rng);
            }
            const double d = sup_norm(Vector(u - v));
            const Policy& p = policies[static_cast<std::size_t>(k) % policies.size()];
            w.add(sup_norm(Vector(apply_L(m, p, u) - apply_L(m, p, v))) - m.gamma() * d);
            w.add(sup_norm(Vector(apply_L_max(m, u) - apply_L_max(m, v))) - m.gamma() * d);
        }
    }
    return {w.value <= 1e-12, w.text("excess over gamma d")};
}

// 7. Value iteration returns an epsilon-optimal policy within the analytic iteration bound.
Outcome value_iteration_check() {
    Worst gap_excess, iter_excess;
    for (const auto& m : suite()) {
        const Vector best = best_value(m);
        const Vector v0 = Vector::Zero(static_cast<Eigen::Index>(m.n_states()));
        for (double eps : {0.5, 0.05, 0.005}) {
            const auto r = value_iteration(m, v0, eps);
            if (r.termination != Termination::Converged)
                return {false, "hit the iteration cap"};
            gap_excess.add(sup_norm(Vector(best - value_oracle(m, r.final_policy))) - eps);
            const double d1 = sup_norm(Vector(value_iterate_step(m, v0) - v0));
            const double thr = vi_threshold(eps, m.gamma());
            const double bound = d1 < thr ? 1.0 : std::ceil(std::log(thr / d1) / std::log(m.gamma())) + 2.0;
            iter_excess.add(static_cast<double>(r.iterations) - bound);
        }
    }
    return {gap_excess.value < 0.0 && iter_excess.value <= 0.0,
            gap_excess.text("gap minus epsilon") + "; worst iterations over bound " +
                num(iter_excess.value)};
}

// 8. Policy iteration from every start: monotone, bounded iterations, optimal.
Outcome policy_iteration_check() {
    Worst mono, final_gap;
    bool bounded = true;
    for (const auto& m : suite()) {
        const Vector best = best_value(m);
        const auto policies = enumerate_policies(m);
        for (const auto& p0 : policies) {
            const auto r = policy_iteration(m, p0);
            bounded = bounded && r.termination == Termination::Converged && r.iterations <= policies.size();
            for (std::size_t k = 1; k < r.trace.size(); ++k)
                mono.add((r.trace[k - 1].value - r.trace[k].value).maxCoeff());
            final_gap.add(sup_norm(Vector(r.final_value - best)));
        }
    }
    return {bounded && mono.value <= 1e-9 && final_gap.value <= 2e-7,
            final_gap.text("gap to vmax") + "; worst decrease " + num(mono.value)};
}

// 9. vmax is a fixed point of L_max; a perturbed vector is not.
Outcome vmax_fixed_point() {
    Worst w;
    bool control = true;
    for (const auto& m : suite()) {
        const auto o = oracle_solve(m);
        w.add(sup_norm(Vector(apply_L_max(m, o.vmax) - o.vmax)));
        Vector bumped = o.vmax;
        bumped(0) += 0.1;
        control = control && !vmax_fixed_point_check(m, bumped, 2e-7);
    }
    return {control && w.value <= 2e-7, w.text("||L_max vmax - vmax||")};
}

// 10. Named examples through the library and the command line.
Outcome named_examples() {
    const std::string dir = FMDP_TEST_DATA;
    std::vector<std::string> failures;
    auto expect = [&](bool cond, const char* what) {
        if (!cond)
            failures.emplace_back(what);
    };

    const Mdp m2 = make_m2();
    const auto o = oracle_solve(m2);
    expect(std::abs(o.vmax(0) - 1.0) <= 1e-9 && std::abs(o.vmax(1)) <= 1e-9, "M2 vmax");
    expect(o.universal_optimal.size() == 1 &&
               o.policies[o.universal_optimal[0]] == policy_of(m2, {"a_go", "a_stay1"}),
           "M2 optimal policy");

    for (double g : {0.5, 0.9}) {
        const auto lo = oracle_solve(make_loop1(g));
        expect(std::abs(lo.vmax(0) - 1.0 / (1.0 - g)) <= 1e-9, "loop1 geometric series");
    }

    std::string out;
    expect(run_cli_capture({"pi", dir + "/m2.json", "--json"}, out) == ExitOk, "cli pi exit");
    if (failures.empty()) {
        const auto doc = Json::parse(out);
        expect(doc["policy"]["s0"] == "a_go" && doc["policy"]["s1"] == "a_stay1", "cli pi policy");
    }
    expect(run_cli_capture({"eval", dir + "/loop1.json", dir + "/loop1.policy.json", "--json"}, out) == ExitOk,
           "cli eval exit");
    if (failures.empty())
        expect(std::abs(Json::parse(out)["values"]["s0"].get<double>() - 2.0) <= 1e-9, "cli eval value");

    std::string detail = failures.empty() ? "M2, loop1, cli pi/eval" : "failed:";
    for (const auto& f : failures)
        detail += " " + f;
    return {failures.empty(), detail};
}

} // namespace

int main() {
    suite();  // generated once, outside the timed criteria
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
        double budget_s;
    };
    const std::vector<Criterion> criteria = {
        {"slice-normalization (tol 1e-8)", slice_normalization, 10},
        {"scalar-bellman (tol 5e-7)", scalar_bellman, 60},
        {"stochastic-matrices (tol 1e-9 / 1e-12)", stochastic_matrices, 5},
        {"neumann-inverse (residual 1e-8, agreement 1e-6)", neumann_inverse_check, 10},
        {"exact-vs-slices (tol 2e-7)", exact_vs_slices, 60},
        {"contraction (tol 1e-12)", contraction, 10},
        {"value-iteration-epsilon-optimal (gap < epsilon)", value_iteration_check, 60},
        {"policy-iteration-monotone-exact (tol 1e-9 / 2e-7)", policy_iteration_check, 120},
        {"vmax-fixed-point (tol 2e-7)", vmax_fixed_point, 5},
        {"named-examples (tol 1e-9)", named_examples, 1},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = criteria[i].run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > criteria[i].budget_s) {
            r.ok = false;
            r.detail += "; over the " + num(criteria[i].budget_s) + "s budget";
        }
        std::printf("%s  %2zu %s: %s (%.2fs)\n", r.ok ? "PASS" : "FAIL", i + 1, criteria[i].name, r.detail.c_str(),
                    secs);
        failed += r.ok ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
