#pragma once

// Invariant suite run against a single model: slice normalization and
// recursion identities, stochasticity, Bellman residuals, contraction, and
// the oracle-backed optimality properties. Backs the `check` subcommand.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fmdp/mdp.hpp"

namespace fmdp {

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    std::string detail;
};

struct CheckOptions {
    std::size_t depth = 6;
    std::uint64_t seed = 0;
    std::size_t policy_cap = default_policy_cap;
    std::size_t sampled_policies = 8;  // used when the policy space is larger
    std::size_t vector_pairs = 100;
    bool parallel = false;
};

struct CheckReport {
    std::vector<CheckResult> results;

    bool all_passed() const;
    std::vector<std::string> warnings() const;
};

CheckReport run_checks(const Mdp& mdp, const CheckOptions& opts = {});

} // namespace fmdp
