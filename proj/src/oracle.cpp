#include "fmdp/oracle.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "fmdp/bellman.hpp"

namespace fmdp {

namespace {

void evaluate_range(const Mdp& mdp, const std::vector<Policy>& policies, std::vector<Vector>& table,
                    std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
        table[k] = policy_value_exact(mdp, policies[k]);
}

} // namespace

OracleResult oracle_solve(const Mdp& mdp, const OracleOptions& opts) {
    if (!(mdp.gamma() < 1.0))
        throw Error(ErrorKind::GammaNotContractive, "the oracle needs gamma < 1");

    OracleResult out;
    out.policies = enumerate_policies(mdp, opts.cap);
    const std::size_t count = out.policies.size();
    out.value_table.resize(count);

    const std::size_t workers =
        opts.parallel ? std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), count)) : 1;
    if (workers <= 1) {
        evaluate_range(mdp, out.policies, out.value_table, 0, count);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::jthread> threads;
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            threads.emplace_back([&, w, begin, end] {
                try {
                    evaluate_range(mdp, out.policies, out.value_table, begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        threads.clear();
        for (const auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    const auto n = static_cast<Eigen::Index>(mdp.n_states());
    out.vmax = out.value_table.front();
    for (const auto& v : out.value_table)
        out.vmax = out.vmax.cwiseMax(v);

    out.per_state_optimal.resize(mdp.n_states());
    for (std::size_t k = 0; k < count; ++k) {
        const Vector& v = out.value_table[k];
        bool dominates = true;
        for (Eigen::Index s = 0; s < n; ++s) {
            if (v(s) >= out.vmax(s) - opt_tol)
                out.per_state_optimal[static_cast<std::size_t>(s)].push_back(k);
            else
                dominates = false;
        }
        if (dominates)
            out.universal_optimal.push_back(k);
    }
    return out;
}

double q_max_check(const Mdp& mdp, const OracleResult& oracle, StateId s, std::size_t a) {
    if (s >= mdp.n_states() || a >= mdp.actions(s).size())
        throw Error(ErrorKind::ActionNotValid, "action index " + std::to_string(a) + " at state index " +
                                                   std::to_string(s));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : oracle.value_table)
        best = std::max(best, action_value(mdp, s, a, v));
    return best;
}

double q_max_check(const Mdp& mdp, const OracleResult& oracle, StateId s, const std::string& action_id) {
    if (s >= mdp.n_states())
        throw Error(ErrorKind::ActionNotValid, "unknown state index " + std::to_string(s));
    const auto a = mdp.action_index(s, action_id);
    if (!a)
        throw Error(ErrorKind::ActionNotValid,
                    "action '" + action_id + "' is not available in state '" + mdp.state_name(s) + "'");
    return q_max_check(mdp, oracle, s, *a);
}

} // namespace fmdp
