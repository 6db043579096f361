#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fmdp/error.hpp"
#include "fmdp/linalg.hpp"

namespace fmdp {

using StateId = std::size_t;

/**
 * One labelled action: a probability mass function over successor states and
 * the reward earned on landing in each successor. Missing reward entries are 0.
 */
class ActionPmf {
public:
    ActionPmf() = default;
    ActionPmf(std::string id, std::map<StateId, double> probs, std::map<StateId, double> rewards = {})
        : id_(std::move(id)), probs_(std::move(probs)), rewards_(std::move(rewards)) {}

    const std::string& id() const noexcept { return id_; }
    const std::map<StateId, double>& probs() const noexcept { return probs_; }
    const std::map<StateId, double>& rewards() const noexcept { return rewards_; }

    double prob(StateId s) const;
    double reward(StateId s) const;

    /// Successors with probability strictly above tol_pmf, ascending.
    std::vector<StateId> support() const;

    /// sum over the support of prob(s') * reward(s').
    double expected_reward() const;

private:
    std::string id_;
    std::map<StateId, double> probs_;
    std::map<StateId, double> rewards_;
};

/// Candidate model prior to validation. Successor indices are signed so that
/// out-of-range references survive until they can be reported.
struct RawAction {
    std::string id;
    std::vector<std::pair<std::int64_t, double>> probs;
    std::vector<std::pair<std::int64_t, double>> rewards;
};

struct RawMdp {
    double gamma = 0.0;
    std::vector<std::string> state_names;          // optional; defaults to s0, s1, ...
    std::vector<std::vector<RawAction>> actions;   // one list per state
};

/**
 * Validated finite MDP: non-empty, finite action sets per state, normalized
 * PMFs, unique action labels per state, and 0 <= gamma <= 1. Immutable.
 */
class Mdp {
public:
    std::size_t n_states() const noexcept { return actions_.size(); }
    double gamma() const noexcept { return gamma_; }
    const std::vector<ActionPmf>& actions(StateId s) const { return actions_.at(s); }
    const ActionPmf& action(StateId s, std::size_t a) const { return actions_.at(s).at(a); }
    const std::string& state_name(StateId s) const { return state_names_.at(s); }
    const std::vector<std::string>& state_names() const noexcept { return state_names_; }

    std::optional<std::size_t> action_index(StateId s, const std::string& id) const;
    std::optional<StateId> state_index(const std::string& name) const;
    std::size_t total_actions() const noexcept;

    /// max |R| over every reward entry; the bound used by truncated values.
    double max_abs_reward() const noexcept;

    /// Same model with a different discount; gamma is range-checked.
    Mdp with_gamma(double gamma) const;

private:
    friend Mdp validate_mdp(const RawMdp& raw);

    double gamma_ = 0.0;
    std::vector<std::string> state_names_;
    std::vector<std::vector<ActionPmf>> actions_;
};

/// Builds an Mdp or throws ValidationError listing every violation.
Mdp validate_mdp(const RawMdp& raw);

/**
 * Deterministic stationary policy, stored as one action index per state.
 * Labels are resolved against the model the policy was built for.
 */
class Policy {
public:
    Policy() = default;
    explicit Policy(std::vector<std::size_t> choice) : choice_(std::move(choice)) {}

    /// Resolves labels; throws InvalidPolicy when the map is not a policy of mdp.
    static Policy from_labels(const Mdp& mdp, const std::map<StateId, std::string>& labels);

    std::size_t operator[](StateId s) const { return choice_.at(s); }
    std::size_t size() const noexcept { return choice_.size(); }
    const std::vector<std::size_t>& choices() const noexcept { return choice_; }

    const ActionPmf& action(const Mdp& mdp, StateId s) const { return mdp.action(s, choice_.at(s)); }
    std::map<StateId, std::string> labels(const Mdp& mdp) const;

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    std::vector<std::size_t> choice_;
};

/// True iff labels names a valid action at every state of mdp.
bool is_policy(const Mdp& mdp, const std::map<StateId, std::string>& labels);
bool is_policy(const Mdp& mdp, const Policy& p);

inline constexpr std::size_t default_policy_cap = 1'000'000;

/// prod_s |actions(s)|, saturating at SIZE_MAX.
std::size_t policy_count(const Mdp& mdp) noexcept;

/**
 * Every deterministic stationary policy, lexicographic in action indices with
 * state 0 most significant. Throws PolicySpaceTooLarge above cap.
 */
std::vector<Policy> enumerate_policies(const Mdp& mdp, std::size_t cap = default_policy_cap);

/// Position of p in the order used by enumerate_policies.
std::size_t policy_index(const Mdp& mdp, const Policy& p);

/// First policy in lexicographic order (all action indices zero).
Policy first_policy(const Mdp& mdp);

/// Every action of s returns to s with certainty and every reward entry is zero.
bool is_terminal_state(const Mdp& mdp, StateId s);

/**
 * Smallest n such that every state in the n-th slice of (p, s, a) is terminal,
 * or nullopt when no such n exists. Decided by iterating the slice-set map
 * until a set repeats.
 */
std::optional<std::size_t> absorption_step(const Mdp& mdp, const Policy& p, StateId s, std::size_t a);

/// absorption_step exists for every state and every initial action.
bool inevitable_terminal(const Mdp& mdp, const Policy& p);

} // namespace fmdp
