#pragma once

// Named models and the seeded random-instance generator shared by the unit
// and acceptance suites.

#include <algorithm>
#include <cmath>
#include <map>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fmdp/bellman.hpp"
#include "fmdp/mdp.hpp"

namespace fmdp::testing {

/// s0: a_stay0 (self-loop, reward 0), a_go (to s1, reward 1); s1 terminal.
inline Mdp make_m2(double gamma = 0.5) {
    RawMdp raw;
    raw.gamma = gamma;
    raw.state_names = {"s0", "s1"};
    raw.actions = {
        {RawAction{"a_stay0", {{0, 1.0}}, {{0, 0.0}}}, RawAction{"a_go", {{1, 1.0}}, {{1, 1.0}}}},
        {RawAction{"a_stay1", {{1, 1.0}}, {}}},
    };
    return validate_mdp(raw);
}

/// One state, one self-loop with reward 1.
inline Mdp make_loop1(double gamma = 0.5) {
    RawMdp raw;
    raw.gamma = gamma;
    raw.state_names = {"s0"};
    raw.actions = {{RawAction{"loop", {{0, 1.0}}, {{0, 1.0}}}}};
    return validate_mdp(raw);
}

/// s0 has one action splitting 0.3 / 0.7 between terminal states t1 and t2.
inline Mdp make_split(double gamma = 0.5) {
    RawMdp raw;
    raw.gamma = gamma;
    raw.state_names = {"s0", "t1", "t2"};
    raw.actions = {
        {RawAction{"split", {{1, 0.3}, {2, 0.7}}, {{1, 2.0}, {2, -1.0}}}},
        {RawAction{"stay", {{1, 1.0}}, {}}},
        {RawAction{"stay", {{2, 1.0}}, {}}},
    };
    return validate_mdp(raw);
}

/// Every state terminal; two self-loop labels at state 0.
inline Mdp make_all_terminal(double gamma = 0.5) {
    RawMdp raw;
    raw.gamma = gamma;
    raw.actions = {
        {RawAction{"x", {{0, 1.0}}, {}}, RawAction{"y", {{0, 1.0}}, {{0, 0.0}}}},
        {RawAction{"z", {{1, 1.0}}, {}}},
    };
    return validate_mdp(raw);
}

inline Policy policy_of(const Mdp& mdp, std::initializer_list<const char*> labels) {
    std::map<StateId, std::string> m;
    StateId s = 0;
    for (const char* l : labels)
        m[s++] = l;
    return Policy::from_labels(mdp, m);
}

struct RandomMdpOptions {
    std::size_t min_states = 2;
    std::size_t max_states = 5;
    std::size_t min_actions = 1;
    std::size_t max_actions = 3;
    double min_prob = 0.05;
    double terminal_chance = 0.15;
    double gamma = 0.9;
};

/**
 * Random valid model. Transition probabilities are at least min_prob so that
 * path masses over a handful of steps stay far above tol_pmf.
 */
inline Mdp random_mdp(std::mt19937_64& rng, const RandomMdpOptions& o = {}) {
    std::uniform_int_distribution<std::size_t> n_states(o.min_states, o.max_states);
    std::uniform_int_distribution<std::size_t> n_actions(o.min_actions, o.max_actions);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> reward(-1.0, 1.0);

    RawMdp raw;
    raw.gamma = o.gamma;
    const std::size_t n = n_states(rng);
    raw.actions.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (unit(rng) < o.terminal_chance) {
            raw.actions[s].push_back(RawAction{"stay", {{static_cast<std::int64_t>(s), 1.0}}, {}});
            continue;
        }
        const std::size_t k = n_actions(rng);
        for (std::size_t a = 0; a < k; ++a) {
            std::vector<std::int64_t> succ(n);
            for (std::size_t t = 0; t < n; ++t)
                succ[t] = static_cast<std::int64_t>(t);
            std::shuffle(succ.begin(), succ.end(), rng);
            const std::size_t support = std::uniform_int_distribution<std::size_t>(1, n)(rng);
            succ.resize(support);

            std::vector<double> w(support);
            double total = 0.0;
            for (auto& x : w) {
                x = unit(rng);
                total += x;
            }
            const double free_mass = 1.0 - o.min_prob * static_cast<double>(support);
            RawAction act;
            act.id = "a" + std::to_string(a);
            double assigned = 0.0;
            for (std::size_t i = 0; i < support; ++i) {
                const double p = i + 1 == support ? 1.0 - assigned : o.min_prob + free_mass * w[i] / total;
                assigned += p;
                act.probs.emplace_back(succ[i], p);
                act.rewards.emplace_back(succ[i], std::round(reward(rng) * 1000.0) / 1000.0);
            }
            raw.actions[s].push_back(std::move(act));
        }
    }
    return validate_mdp(raw);
}

/**
 * True when two policies' values at some state differ by an amount that is
 * neither a genuine tie nor clearly separated from opt_tol.
 */
inline bool has_near_ties(const Mdp& mdp) {
    const auto policies = enumerate_policies(mdp);
    std::vector<Vector> values;
    for (const auto& p : policies)
        values.push_back(policy_value_exact(mdp, p));
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            for (Eigen::Index s = 0; s < values[i].size(); ++s) {
                const double d = std::abs(values[i](s) - values[j](s));
                if (d > 1e-11 && d < 1e-6)
                    return true;
            }
    return false;
}

/// Deterministic suite of random models with gamma cycling through {0.3, 0.5, 0.7, 0.9}.
inline std::vector<Mdp> random_suite(std::uint64_t seed, std::size_t count, RandomMdpOptions o = {}) {
    static constexpr double gammas[] = {0.3, 0.5, 0.7, 0.9};
    std::mt19937_64 rng(seed);
    std::vector<Mdp> out;
    while (out.size() < count) {
        o.gamma = gammas[out.size() % 4];
        Mdp m = random_mdp(rng, o);
        if (!has_near_ties(m))
            out.push_back(std::move(m));
    }
    return out;
}

} // namespace fmdp::testing
