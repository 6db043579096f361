#include "fmdp/io.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace fmdp {

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::ParseError, where + ": " + what);
}

Json parse_json(std::string_view text) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
        parse_fail("document", "empty input");
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset -> line for the diagnostic
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        parse_fail("line " + std::to_string(line), e.what());
    }
}

double number_at(const Json& j, const std::string& where) {
    if (!j.is_number())
        parse_fail(where, "expected a number, found " + std::string(j.type_name()));
    return j.get<double>();
}

const Json& object_at(const Json& j, const std::string& where) {
    if (!j.is_object())
        parse_fail(where, "expected an object, found " + std::string(j.type_name()));
    return j;
}

} // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::ParseError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Mdp load_mdp(std::string_view text) {
    const Json doc = parse_json(text);
    object_at(doc, "$");
    for (const char* key : {"gamma", "states", "actions"})
        if (!doc.contains(key))
            parse_fail("$", std::string("missing key '") + key + "'");

    RawMdp raw;
    raw.gamma = number_at(doc["gamma"], "$.gamma");

    const Json& states = doc["states"];
    if (!states.is_array())
        parse_fail("$.states", "expected an array of state names");
    std::unordered_map<std::string, std::int64_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!states[i].is_string())
            parse_fail("$.states[" + std::to_string(i) + "]", "expected a string");
        const auto name = states[i].get<std::string>();
        raw.state_names.push_back(name);
        index.emplace(name, static_cast<std::int64_t>(i));
    }
    raw.actions.resize(raw.state_names.size());

    std::vector<Violation> violations;
    const Json& actions = object_at(doc["actions"], "$.actions");
    for (const auto& [state_name, state_actions] : actions.items()) {
        const std::string where = "$.actions." + state_name;
        const auto it = index.find(state_name);
        if (it == index.end()) {
            violations.push_back({ErrorKind::UnknownSuccessorState,
                                  "actions declared for undeclared state '" + state_name + "'"});
            continue;
        }
        object_at(state_actions, where);
        for (const auto& [action_name, body] : state_actions.items()) {
            const std::string at = where + "." + action_name;
            object_at(body, at);
            if (!body.contains("transitions"))
                parse_fail(at, "missing key 'transitions'");
            RawAction ra;
            ra.id = action_name;
            for (const auto& [succ, prob] : object_at(body["transitions"], at + ".transitions").items()) {
                const double p = number_at(prob, at + ".transitions." + succ);
                const auto s = index.find(succ);
                if (s == index.end()) {
                    violations.push_back({ErrorKind::UnknownSuccessorState,
                                          "state '" + state_name + "' action '" + action_name +
                                              "' has a transition to undeclared state '" + succ + "'"});
                    continue;
                }
                ra.probs.emplace_back(s->second, p);
            }
            if (body.contains("rewards")) {
                for (const auto& [succ, reward] : object_at(body["rewards"], at + ".rewards").items()) {
                    const double r = number_at(reward, at + ".rewards." + succ);
                    const auto s = index.find(succ);
                    if (s == index.end()) {
                        violations.push_back({ErrorKind::UnknownSuccessorState,
                                              "state '" + state_name + "' action '" + action_name +
                                                  "' has a reward for undeclared state '" + succ + "'"});
                        continue;
                    }
                    ra.rewards.emplace_back(s->second, r);
                }
            }
            raw.actions[static_cast<std::size_t>(it->second)].push_back(std::move(ra));
        }
    }

    std::optional<Mdp> mdp;
    try {
        mdp = validate_mdp(raw);
    } catch (const ValidationError& e) {
        violations.insert(violations.end(), e.violations().begin(), e.violations().end());
    }
    if (!violations.empty())
        throw ValidationError(std::move(violations));
    return std::move(*mdp);
}

Mdp load_mdp_file(const std::filesystem::path& path) { return load_mdp(read_text_file(path)); }

Json mdp_to_json(const Mdp& mdp) {
    Json doc;
    doc["gamma"] = mdp.gamma();
    doc["states"] = mdp.state_names();
    Json actions = Json::object();
    for (StateId s = 0; s < mdp.n_states(); ++s) {
        Json per_state = Json::object();
        for (const auto& a : mdp.actions(s)) {
            Json body;
            Json transitions = Json::object();
            for (const auto& [t, p] : a.probs())
                transitions[mdp.state_name(t)] = p;
            body["transitions"] = std::move(transitions);
            if (!a.rewards().empty()) {
                Json rewards = Json::object();
                for (const auto& [t, r] : a.rewards())
                    rewards[mdp.state_name(t)] = r;
                body["rewards"] = std::move(rewards);
            }
            per_state[a.id()] = std::move(body);
        }
        actions[mdp.state_name(s)] = std::move(per_state);
    }
    doc["actions"] = std::move(actions);
    return doc;
}

Policy load_policy(const Mdp& mdp, std::string_view text) {
    const Json doc = parse_json(text);
    object_at(doc, "$");
    std::map<StateId, std::string> labels;
    for (const auto& [state_name, action] : doc.items()) {
        const auto s = mdp.state_index(state_name);
        if (!s)
            throw Error(ErrorKind::InvalidPolicy, "policy names undeclared state '" + state_name + "'");
        if (!action.is_string())
            parse_fail("$." + state_name, "expected an action name");
        labels[*s] = action.get<std::string>();
    }
    return Policy::from_labels(mdp, labels);
}

Policy load_policy_file(const Mdp& mdp, const std::filesystem::path& path) {
    return load_policy(mdp, read_text_file(path));
}

Json policy_to_json(const Mdp& mdp, const Policy& p) {
    Json doc = Json::object();
    for (StateId s = 0; s < p.size(); ++s)
        doc[mdp.state_name(s)] = p.action(mdp, s).id();
    return doc;
}

Json values_to_json(const Mdp& mdp, const Vector& v) {
    Json doc = Json::object();
    for (StateId s = 0; s < static_cast<StateId>(v.size()); ++s)
        doc[mdp.state_name(s)] = v(static_cast<Eigen::Index>(s));
    return doc;
}

Json report_to_json(const Mdp& mdp, const SolveReport& report) {
    Json doc;
    doc["algorithm"] = to_string(report.algorithm);
    doc["iterations"] = report.iterations;
    Json trace = Json::array();
    for (const auto& e : report.trace) {
        Json entry;
        entry["iteration"] = e.index;
        entry["values"] = values_to_json(mdp, e.value);
        entry["delta"] = e.delta ? Json(*e.delta) : Json(nullptr);
        if (e.policy)
            entry["policy"] = policy_to_json(mdp, *e.policy);
        trace.push_back(std::move(entry));
    }
    doc["trace"] = std::move(trace);
    doc["policy"] = policy_to_json(mdp, report.final_policy);
    doc["values"] = values_to_json(mdp, report.final_value);
    doc["certificate"] = report.certificate;
    doc["termination"] = to_string(report.termination);
    return doc;
}

Json oracle_to_json(const Mdp& mdp, const OracleResult& oracle) {
    Json doc;
    doc["policy_count"] = oracle.policies.size();
    doc["vmax"] = values_to_json(mdp, oracle.vmax);
    Json universal = Json::array();
    for (std::size_t k : oracle.universal_optimal)
        universal.push_back({{"index", k}, {"policy", policy_to_json(mdp, oracle.policies[k])}});
    doc["universal_optimal"] = std::move(universal);
    Json per_state = Json::object();
    for (StateId s = 0; s < mdp.n_states(); ++s)
        per_state[mdp.state_name(s)] = oracle.per_state_optimal[s];
    doc["per_state_optimal"] = std::move(per_state);
    Json table = Json::array();
    for (std::size_t k = 0; k < oracle.policies.size(); ++k)
        table.push_back({{"index", k},
                         {"policy", policy_to_json(mdp, oracle.policies[k])},
                         {"values", values_to_json(mdp, oracle.value_table[k])}});
    doc["value_table"] = std::move(table);
    return doc;
}

} // namespace fmdp
