#include "fmdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

namespace fmdp {

double ActionPmf::prob(StateId s) const {
    const auto it = probs_.find(s);
    return it == probs_.end() ? 0.0 : it->second;
}

double ActionPmf::reward(StateId s) const {
    const auto it = rewards_.find(s);
    return it == rewards_.end() ? 0.0 : it->second;
}

std::vector<StateId> ActionPmf::support() const {
    std::vector<StateId> out;
    for (const auto& [s, p] : probs_)
        if (p > tol_pmf)
            out.push_back(s);
    return out;
}

double ActionPmf::expected_reward() const {
    double total = 0.0;
    for (const auto& [s, p] : probs_)
        if (p > tol_pmf)
            total += p * reward(s);
    return total;
}

std::optional<std::size_t> Mdp::action_index(StateId s, const std::string& id) const {
    const auto& list = actions(s);
    for (std::size_t a = 0; a < list.size(); ++a)
        if (list[a].id() == id)
            return a;
    return std::nullopt;
}

std::optional<StateId> Mdp::state_index(const std::string& name) const {
    const auto it = std::find(state_names_.begin(), state_names_.end(), name);
    if (it == state_names_.end())
        return std::nullopt;
    return static_cast<StateId>(it - state_names_.begin());
}

std::size_t Mdp::total_actions() const noexcept {
    std::size_t total = 0;
    for (const auto& list : actions_)
        total += list.size();
    return total;
}

double Mdp::max_abs_reward() const noexcept {
    double m = 0.0;
    for (const auto& list : actions_)
        for (const auto& a : list)
            for (const auto& [s, r] : a.rewards())
                m = std::max(m, std::abs(r));
    return m;
}

Mdp Mdp::with_gamma(double gamma) const {
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma > 1.0)
        throw Error(ErrorKind::GammaOutOfRange, "gamma = " + std::to_string(gamma));
    Mdp copy = *this;
    copy.gamma_ = gamma;
    return copy;
}

namespace {

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

} // namespace

Mdp validate_mdp(const RawMdp& raw) {
    std::vector<Violation> violations;
    const auto add = [&](ErrorKind kind, std::string msg) { violations.push_back({kind, std::move(msg)}); };

    const std::size_t n = raw.actions.size();
    if (n == 0)
        add(ErrorKind::InvalidArgument, "model declares no states");

    if (!std::isfinite(raw.gamma) || raw.gamma < 0.0 || raw.gamma > 1.0)
        add(ErrorKind::GammaOutOfRange, "gamma = " + fmt_double(raw.gamma) + " is outside [0, 1]");

    std::vector<std::string> names = raw.state_names;
    if (names.empty()) {
        for (std::size_t s = 0; s < n; ++s)
            names.push_back("s" + std::to_string(s));
    } else if (names.size() != n) {
        add(ErrorKind::InvalidArgument, std::to_string(names.size()) + " state names for " +
                                            std::to_string(n) + " states");
        names.resize(n);
        for (std::size_t s = 0; s < n; ++s)
            if (names[s].empty())
                names[s] = "s" + std::to_string(s);
    }
    {
        std::unordered_set<std::string> seen;
        for (const auto& name : names)
            if (!seen.insert(name).second)
                add(ErrorKind::InvalidArgument, "duplicate state name '" + name + "'");
    }

    const auto in_range = [n](std::int64_t idx) { return idx >= 0 && static_cast<std::uint64_t>(idx) < n; };

    Mdp mdp;
    mdp.gamma_ = raw.gamma;
    mdp.state_names_ = names;
    mdp.actions_.resize(n);

    for (std::size_t s = 0; s < n; ++s) {
        const std::string where = "state '" + names[s] + "'";
        const auto& list = raw.actions[s];
        if (list.empty())
            add(ErrorKind::EmptyActionSet, where + " has no actions");

        std::unordered_set<std::string> ids;
        for (const auto& ra : list) {
            const std::string at = where + " action '" + ra.id + "'";
            if (!ids.insert(ra.id).second)
                add(ErrorKind::DuplicateActionId, at + " is declared twice");

            std::map<StateId, double> probs;
            std::map<StateId, double> rewards;
            double sum = 0.0;
            bool sum_valid = true;
            for (const auto& [idx, p] : ra.probs) {
                if (!in_range(idx)) {
                    add(ErrorKind::UnknownSuccessorState,
                        at + " has a transition to unknown state index " + std::to_string(idx));
                    sum += p;
                    continue;
                }
                const auto succ = static_cast<StateId>(idx);
                if (!std::isfinite(p)) {
                    add(ErrorKind::NonFiniteValue, at + " has non-finite probability to '" + names[succ] + "'");
                    sum_valid = false;
                    continue;
                }
                if (p < 0.0)
                    add(ErrorKind::NegativeProbability,
                        at + " has negative probability " + fmt_double(p) + " to '" + names[succ] + "'");
                if (!probs.emplace(succ, p).second)
                    add(ErrorKind::InvalidArgument, at + " lists successor '" + names[succ] + "' twice");
                sum += p;
            }
            if (sum_valid && std::abs(sum - 1.0) > tol_pmf)
                add(ErrorKind::PmfNotNormalized, at + " probabilities sum to " + fmt_double(sum));

            for (const auto& [idx, r] : ra.rewards) {
                if (!in_range(idx)) {
                    add(ErrorKind::UnknownSuccessorState,
                        at + " has a reward for unknown state index " + std::to_string(idx));
                    continue;
                }
                const auto succ = static_cast<StateId>(idx);
                if (!std::isfinite(r)) {
                    add(ErrorKind::NonFiniteValue, at + " has non-finite reward for '" + names[succ] + "'");
                    continue;
                }
                if (!rewards.emplace(succ, r).second)
                    add(ErrorKind::InvalidArgument, at + " lists a reward for '" + names[succ] + "' twice");
            }
            mdp.actions_[s].emplace_back(ra.id, std::move(probs), std::move(rewards));
        }
    }

    if (!violations.empty())
        throw ValidationError(std::move(violations));
    return mdp;
}

Policy Policy::from_labels(const Mdp& mdp, const std::map<StateId, std::string>& labels) {
    std::vector<std::size_t> choice(mdp.n_states());
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        const auto it = labels.find(s);
        if (it == labels.end())
            throw Error(ErrorKind::InvalidPolicy, "no action chosen for state '" + mdp.state_name(s) + "'");
        const auto a = mdp.action_index(s, it->second);
        if (!a)
            throw Error(ErrorKind::InvalidPolicy,
                        "action '" + it->second + "' is not available in state '" + mdp.state_name(s) + "'");
        choice[s] = *a;
    }
    for (const auto& [s, label] : labels)
        if (s >= mdp.n_states())
            throw Error(ErrorKind::InvalidPolicy, "choice for unknown state index " + std::to_string(s));
    return Policy(std::move(choice));
}

std::map<StateId, std::string> Policy::labels(const Mdp& mdp) const {
    std::map<StateId, std::string> out;
    for (StateId s = 0; s < choice_.size(); ++s)
        out.emplace(s, mdp.action(s, choice_[s]).id());
    return out;
}

bool is_policy(const Mdp& mdp, const std::map<StateId, std::string>& labels) {
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        const auto it = labels.find(s);
        if (it == labels.end() || !mdp.action_index(s, it->second))
            return false;
    }
    return std::all_of(labels.begin(), labels.end(), [&](const auto& kv) { return kv.first < mdp.n_states(); });
}

bool is_policy(const Mdp& mdp, const Policy& p) {
    if (p.size() != mdp.n_states())
        return false;
    for (StateId s = 0; s < mdp.n_states(); ++s)
        if (p[s] >= mdp.actions(s).size())
            return false;
    return true;
}

std::size_t policy_count(const Mdp& mdp) noexcept {
    constexpr auto max = std::numeric_limits<std::size_t>::max();
    std::size_t count = 1;
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        const std::size_t k = mdp.actions(s).size();
        if (k != 0 && count > max / k)
            return max;
        count *= k;
    }
    return count;
}

std::vector<Policy> enumerate_policies(const Mdp& mdp, std::size_t cap) {
    const std::size_t count = policy_count(mdp);
    if (count > cap)
        throw Error(ErrorKind::PolicySpaceTooLarge,
                    std::to_string(count) + " policies exceed the cap of " + std::to_string(cap));

    const std::size_t n = mdp.n_states();
    std::vector<Policy> out;
    out.reserve(count);
    std::vector<std::size_t> digits(n, 0);
    for (std::size_t k = 0; k < count; ++k) {
        out.emplace_back(digits);
        // odometer increment, last state least significant
        for (std::size_t i = n; i-- > 0;) {
            if (++digits[i] < mdp.actions(i).size())
                break;
            digits[i] = 0;
        }
    }
    return out;
}

std::size_t policy_index(const Mdp& mdp, const Policy& p) {
    if (!is_policy(mdp, p))
        throw Error(ErrorKind::InvalidPolicy, "policy does not match the model");
    std::size_t index = 0;
    for (StateId s = 0; s < mdp.n_states(); ++s)
        index = index * mdp.actions(s).size() + p[s];
    return index;
}

Policy first_policy(const Mdp& mdp) {
    return Policy(std::vector<std::size_t>(mdp.n_states(), 0));
}

bool is_terminal_state(const Mdp& mdp, StateId s) {
    for (const auto& a : mdp.actions(s)) {
        const auto support = a.support();
        if (support.size() != 1 || support.front() != s)
            return false;
        for (const auto& [succ, r] : a.rewards())
            if (r != 0.0)
                return false;
    }
    return true;
}

std::optional<std::size_t> absorption_step(const Mdp& mdp, const Policy& p, StateId s, std::size_t a) {
    if (!is_policy(mdp, p))
        throw Error(ErrorKind::InvalidPolicy, "policy does not match the model");
    if (a >= mdp.actions(s).size())
        throw Error(ErrorKind::ActionNotValid, "action index " + std::to_string(a) + " at state '" +
                                                   mdp.state_name(s) + "'");
    const std::size_t n = mdp.n_states();
    std::vector<bool> terminal(n);
    for (StateId t = 0; t < n; ++t)
        terminal[t] = is_terminal_state(mdp, t);

    const auto all_terminal = [&](const std::vector<bool>& set) {
        for (StateId t = 0; t < n; ++t)
            if (set[t] && !terminal[t])
                return false;
        return true;
    };

    std::vector<bool> current(n, false);
    current[s] = true;
    if (all_terminal(current))
        return 0;

    current.assign(n, false);
    for (StateId t : mdp.action(s, a).support())
        current[t] = true;

    // From step 1 on the slice evolves by a fixed map on subsets of S.
    std::set<std::vector<bool>> seen;
    for (std::size_t step = 1;; ++step) {
        if (all_terminal(current))
            return step;
        if (!seen.insert(current).second)
            return std::nullopt;
        std::vector<bool> next(n, false);
        for (StateId t = 0; t < n; ++t)
            if (current[t])
                for (StateId u : p.action(mdp, t).support())
                    next[u] = true;
        current = std::move(next);
    }
}

bool inevitable_terminal(const Mdp& mdp, const Policy& p) {
    for (StateId s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.actions(s).size(); ++a)
            if (!absorption_step(mdp, p, s, a))
                return false;
    return true;
}

} // namespace fmdp
