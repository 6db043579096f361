#pragma once

// JSON documents for models, policies, and solver output.
//
// Model document:
//   {"gamma": 0.5,
//    "states": ["s0", "s1"],
//    "actions": {"s0": {"go": {"transitions": {"s1": 1.0}, "rewards": {"s1": 1.0}}}, ...}}
// Action order inside each state is significant (tie-breaking, enumeration).
// "rewards" is optional and missing entries are 0.
//
// Policy document: {"s0": "go", "s1": "stay"}

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fmdp/mdp.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/solvers.hpp"

namespace fmdp {

using Json = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path);

/// Parses and validates a model document. Throws Error(ParseError) for
/// malformed input and ValidationError for well-formed but invalid models.
Mdp load_mdp(std::string_view text);
Mdp load_mdp_file(const std::filesystem::path& path);

Json mdp_to_json(const Mdp& mdp);

Policy load_policy(const Mdp& mdp, std::string_view text);
Policy load_policy_file(const Mdp& mdp, const std::filesystem::path& path);
Json policy_to_json(const Mdp& mdp, const Policy& p);

Json values_to_json(const Mdp& mdp, const Vector& v);

/// Keys: algorithm, iterations, trace, policy, values, certificate, termination.
Json report_to_json(const Mdp& mdp, const SolveReport& report);

Json oracle_to_json(const Mdp& mdp, const OracleResult& oracle);

} // namespace fmdp
