#include "fmdp/cli.hpp"

#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmdp/bellman.hpp"
#include "fmdp/checks.hpp"
#include "fmdp/io.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/slices.hpp"
#include "fmdp/solvers.hpp"

namespace fmdp {

namespace {

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

std::string sci(double x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << x;
    return os.str();
}

void print_values(std::ostream& out, const Mdp& mdp, const Vector& v, const std::string& indent = "  ") {
    for (StateId s = 0; s < mdp.n_states(); ++s)
        out << indent << mdp.state_name(s) << ": " << num(v(static_cast<Eigen::Index>(s))) << '\n';
}

Vector parse_vector_arg(const Mdp& mdp, const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::ParseError, "--v0: '" + item + "' is not a number");
        }
    }
    if (values.size() != mdp.n_states())
        throw Error(ErrorKind::ParseError, "--v0 has " + std::to_string(values.size()) + " entries for " +
                                               std::to_string(mdp.n_states()) + " states");
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void render_report(std::ostream& out, const Mdp& mdp, const SolveReport& report) {
    out << "algorithm: " << (report.algorithm == Algorithm::ValueIteration ? "value iteration" : "policy iteration")
        << '\n';
    out << "iterations: " << report.iterations << '\n';
    out << "trace:\n";
    for (const auto& e : report.trace) {
        out << "  [" << e.index << "] delta=" << (e.delta ? sci(*e.delta) : std::string("-")) << " values=(";
        for (Eigen::Index i = 0; i < e.value.size(); ++i)
            out << (i ? ", " : "") << num(e.value(i));
        out << ')';
        if (e.policy)
            out << " policy=" << policy_to_json(mdp, *e.policy).dump();
        out << '\n';
    }
    out << "policy: " << policy_to_json(mdp, report.final_policy).dump() << '\n';
    out << "values:\n";
    print_values(out, mdp, report.final_value);
    out << "certificate: "
        << (report.algorithm == Algorithm::ValueIteration ? "epsilon=" + num(report.certificate)
                                                           : std::string("exact"))
        << '\n';
    out << "termination: " << to_string(report.termination) << '\n';
}

int finish_report(std::ostream& out, std::ostream& err, const Mdp& mdp, const SolveReport& report, bool json) {
    if (json)
        out << report_to_json(mdp, report).dump(2) << '\n';
    else
        render_report(out, mdp, report);
    if (report.termination == Termination::IterationCapExceeded) {
        err << "IterationCapExceeded: stopped after " << report.iterations << " iterations\n";
        return ExitDomain;
    }
    return ExitOk;
}

struct Options {
    std::string mdp_file;
    std::string policy_file;
    double tol = 1e-7;
    std::string method = "direct";
    bool check = false;
    bool json = false;
    double epsilon = 0.01;
    std::string v0;
    std::optional<std::size_t> cap;
    std::string p0_file;
    std::size_t depth = 6;
    std::uint64_t seed = 0;
    bool parallel = false;
};

int cmd_validate(const Options& o, std::ostream& out) {
    const Mdp mdp = load_mdp_file(o.mdp_file);
    out << "valid: " << mdp.n_states() << " states, " << mdp.total_actions() << " actions, \xCE\xB3=" << num(mdp.gamma())
        << '\n';
    return ExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
    const Mdp mdp = load_mdp_file(o.mdp_file);
    const Policy p = load_policy_file(mdp, o.policy_file);
    Json doc;
    doc["policy"] = policy_to_json(mdp, p);

    if (o.method == "slice") {
        SliceEvaluator ev(mdp, p);
        Vector v(static_cast<Eigen::Index>(mdp.n_states()));
        Json bounds = Json::object();
        for (StateId s = 0; s < mdp.n_states(); ++s) {
            const auto est = ev.v_expected(s, o.tol);
            v(static_cast<Eigen::Index>(s)) = est.value;
            bounds[mdp.state_name(s)] = est.tail_bound;
        }
        if (o.json) {
            doc["method"] = "slice";
            doc["values"] = values_to_json(mdp, v);
            doc["tail_bounds"] = std::move(bounds);
            out << doc.dump(2) << '\n';
        } else {
            out << "method: slice (tol " << sci(o.tol) << ")\nvalues:\n";
            print_values(out, mdp, v);
        }
        return ExitOk;
    }

    const EvalMethod method = o.method == "neumann" ? EvalMethod::Neumann : EvalMethod::Direct;
    const Vector v = policy_value_exact(mdp, p, method);
    const double residual = bellman_residual(mdp, p, v);
    std::optional<Vector> slice_values;
    double gap = 0.0;
    if (o.check) {
        SliceEvaluator ev(mdp, p);
        slice_values = Vector(v.size());
        for (StateId s = 0; s < mdp.n_states(); ++s)
            (*slice_values)(static_cast<Eigen::Index>(s)) = ev.v_expected(s, o.tol).value;
        gap = sup_norm(Vector(*slice_values - v));
    }

    if (o.json) {
        doc["method"] = o.method;
        doc["values"] = values_to_json(mdp, v);
        doc["residual"] = residual;
        if (slice_values) {
            doc["slice_values"] = values_to_json(mdp, *slice_values);
            doc["slice_gap"] = gap;
            doc["slice_agrees"] = gap <= o.tol + tol_residual;
        }
        out << doc.dump(2) << '\n';
    } else {
        out << "method: " << o.method << "\nvalues:\n";
        print_values(out, mdp, v);
        out << "bellman residual: " << sci(residual) << '\n';
        if (slice_values) {
            out << "slice values (tol " << sci(o.tol) << "):\n";
            print_values(out, mdp, *slice_values);
            out << "agreement gap: " << sci(gap) << (gap <= o.tol + tol_residual ? " (ok)" : " (MISMATCH)") << '\n';
        }
    }
    return ExitOk;
}

int cmd_vi(const Options& o, std::ostream& out, std::ostream& err) {
    const Mdp mdp = load_mdp_file(o.mdp_file);
    const Vector v0 = o.v0.empty() ? Vector::Zero(static_cast<Eigen::Index>(mdp.n_states()))
                                   : parse_vector_arg(mdp, o.v0);
    const auto report = value_iteration(mdp, v0, o.epsilon, o.cap.value_or(default_vi_cap));
    return finish_report(out, err, mdp, report, o.json);
}

int cmd_pi(const Options& o, std::ostream& out, std::ostream& err) {
    const Mdp mdp = load_mdp_file(o.mdp_file);
    const Policy p0 = o.p0_file.empty() ? first_policy(mdp) : load_policy_file(mdp, o.p0_file);
    const auto report = policy_iteration(mdp, p0, o.cap);
    return finish_report(out, err, mdp, report, o.json);
}

int cmd_oracle(const Options& o, std::ostream& out) {
    const Mdp mdp = load_mdp_file(o.mdp_file);
    const auto oracle = oracle_solve(mdp, {o.cap.value_or(default_policy_cap), o.parallel});
    if (o.json) {
        out << oracle_to_json(mdp, oracle).dump(2) << '\n';
        return ExitOk;
    }
    out << "policies: " << oracle.policies.size() << "\nvmax:\n";
    print_values(out, mdp, oracle.vmax);
    out << "universally optimal:\n";
    for (std::size_t k : oracle.universal_optimal)
        out << "  #" << k << ' ' << policy_to_json(mdp, oracle.policies[k]).dump() << '\n';
    out << "optimal policies per state:\n";
    for (StateId s = 0; s < mdp.n_states(); ++s)
        out << "  " << mdp.state_name(s) << ": " << oracle.per_state_optimal[s].size() << '\n';
    return ExitOk;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
    const Mdp mdp = load_mdp_file(o.mdp_file);
    CheckOptions opts;
    opts.depth = o.depth;
    opts.seed = o.seed;
    opts.policy_cap = o.cap.value_or(default_policy_cap);
    opts.parallel = o.parallel;
    const auto report = run_checks(mdp, opts);
    for (const auto& w : report.warnings())
        err << "warning: skipped " << w << '\n';

    if (o.json) {
        Json doc;
        Json results = Json::array();
        for (const auto& r : report.results) {
            const char* status = r.status == CheckStatus::Pass ? "pass" : r.status == CheckStatus::Fail ? "fail" : "skipped";
            results.push_back({{"name", r.name}, {"status", status}, {"detail", r.detail}});
        }
        doc["checks"] = std::move(results);
        doc["passed"] = report.all_passed();
        out << doc.dump(2) << '\n';
    } else {
        for (const auto& r : report.results) {
            const char* status = r.status == CheckStatus::Pass ? "PASS" : r.status == CheckStatus::Fail ? "FAIL" : "SKIP";
            out << status << "  " << r.name << "  " << r.detail << '\n';
        }
        out << (report.all_passed() ? "all checks passed" : "some checks FAILED") << '\n';
    }
    return report.all_passed() ? ExitOk : ExitDomain;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite discounted MDP solver with brute-force certification"};
    app.require_subcommand(1);
    Options o;

    auto* validate = app.add_subcommand("validate", "Check a model document");
    validate->add_option("mdp", o.mdp_file, "Model JSON")->required();

    auto* eval = app.add_subcommand("eval", "Evaluate a fixed policy");
    eval->add_option("mdp", o.mdp_file, "Model JSON")->required();
    eval->add_option("policy", o.policy_file, "Policy JSON")->required();
    eval->add_option("--tol", o.tol, "Slice truncation tolerance")->check(CLI::PositiveNumber);
    eval->add_option("--method", o.method, "direct, neumann or slice")
        ->check(CLI::IsMember({"direct", "neumann", "slice"}));
    eval->add_flag("--check", o.check, "Cross-check against the slice semantics");
    eval->add_flag("--json", o.json, "Emit JSON");

    auto* vi = app.add_subcommand("vi", "Value iteration");
    vi->add_option("mdp", o.mdp_file, "Model JSON")->required();
    vi->add_option("--epsilon", o.epsilon, "Target optimality gap (> 0)")->check(CLI::PositiveNumber);
    vi->add_option("--v0", o.v0, "Initial vector, comma separated in state order");
    vi->add_option("--cap", o.cap, "Iteration cap");
    vi->add_flag("--json", o.json, "Emit JSON");

    auto* pi = app.add_subcommand("pi", "Policy iteration");
    pi->add_option("mdp", o.mdp_file, "Model JSON")->required();
    pi->add_option("--p0", o.p0_file, "Initial policy JSON");
    pi->add_option("--cap", o.cap, "Iteration cap");
    pi->add_flag("--json", o.json, "Emit JSON");

    auto* oracle = app.add_subcommand("oracle", "Enumerate every policy");
    oracle->add_option("mdp", o.mdp_file, "Model JSON")->required();
    oracle->add_option("--cap", o.cap, "Policy enumeration cap");
    oracle->add_flag("--parallel", o.parallel, "Evaluate policies on all cores");
    oracle->add_flag("--json", o.json, "Emit JSON");

    auto* check = app.add_subcommand("check", "Run the invariant suite on one model");
    check->add_option("mdp", o.mdp_file, "Model JSON")->required();
    check->add_option("--depth", o.depth, "Slice depth");
    check->add_option("--seed", o.seed, "Seed for randomized checks");
    check->add_option("--cap", o.cap, "Policy enumeration cap");
    check->add_flag("--parallel", o.parallel, "Parallel oracle enumeration");
    check->add_flag("--json", o.json, "Emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return ExitUsage;
    }

    try {
        if (validate->parsed())
            return cmd_validate(o, out);
        if (eval->parsed())
            return cmd_eval(o, out);
        if (vi->parsed())
            return cmd_vi(o, out, err);
        if (pi->parsed())
            return cmd_pi(o, out, err);
        if (oracle->parsed())
            return cmd_oracle(o, out);
        if (check->parsed())
            return cmd_check(o, out, err);
    } catch (const ValidationError& e) {
        for (const auto& v : e.violations())
            err << error_name(v.kind) << ": " << v.message << '\n';
        return ExitDomain;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return e.kind() == ErrorKind::ParseError ? ExitUsage : ExitDomain;
    }
    return ExitUsage;
}

} // namespace fmdp
