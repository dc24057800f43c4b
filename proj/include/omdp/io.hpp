#pragma once

#include <string>

#include <json.hpp>

#include "omdp/mdp.hpp"
#include "omdp/td.hpp"

namespace omdp {

/// JSON document formats, row-major in the natural nesting order:
///   mdp:     {"n_states": S, "n_actions": A, "transition": [s][a][s']}
///   reward:  {"values": [s][a]}
///   policy:  {"probs": [s][a]}
///   features:{"phi": [s][k]}
nlohmann::json mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const nlohmann::json& doc);

nlohmann::json reward_to_json(const RewardFunction& reward);
RewardFunction reward_from_json(const nlohmann::json& doc);

nlohmann::json policy_to_json(const StochasticPolicy& policy);
StochasticPolicy policy_from_json(const nlohmann::json& doc);

FeatureMap features_from_json(const nlohmann::json& doc);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace omdp
