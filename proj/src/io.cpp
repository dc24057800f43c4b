#include "omdp/io.hpp"

#include <fstream>

namespace omdp {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index s = 0; s < m.rows(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index a = 0; a < m.cols(); ++a) row.push_back(m(s, a));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& doc, const char* what) {
  if (!doc.is_array() || doc.empty())
    throw std::invalid_argument(std::string(what) + ": expected a non-empty array of rows");
  const std::size_t cols = doc[0].size();
  Eigen::MatrixXd m(doc.size(), cols);
  for (std::size_t s = 0; s < doc.size(); ++s) {
    if (!doc[s].is_array() || doc[s].size() != cols)
      throw std::invalid_argument(std::string(what) + ": ragged rows");
    for (std::size_t a = 0; a < cols; ++a) m(s, a) = doc[s][a].get<double>();
  }
  return m;
}

void require_keys(const nlohmann::json& doc, std::initializer_list<const char*> keys,
                  const char* what) {
  if (!doc.is_object()) throw std::invalid_argument(std::string(what) + ": expected an object");
  for (const char* key : keys)
    if (!doc.contains(key))
      throw std::invalid_argument(std::string(what) + ": missing key '" + key + "'");
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known)
      throw std::invalid_argument(std::string(what) + ": unknown key '" + key + "'");
  }
}

}  // namespace

nlohmann::json mdp_to_json(const TabularMdp& mdp) {
  nlohmann::json transition = nlohmann::json::array();
  for (int s = 0; s < mdp.n_states(); ++s) {
    nlohmann::json per_action = nlohmann::json::array();
    for (int a = 0; a < mdp.n_actions(); ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < mdp.n_states(); ++j) row.push_back(mdp.p(s, a, j));
      per_action.push_back(std::move(row));
    }
    transition.push_back(std::move(per_action));
  }
  return {{"n_states", mdp.n_states()},
          {"n_actions", mdp.n_actions()},
          {"transition", std::move(transition)}};
}

TabularMdp mdp_from_json(const nlohmann::json& doc) {
  require_keys(doc, {"n_states", "n_actions", "transition"}, "mdp document");
  const int n = doc["n_states"].get<int>();
  const int m = doc["n_actions"].get<int>();
  if (n < 1 || m < 1) throw std::invalid_argument("mdp document: sizes must be positive");
  const auto& transition = doc["transition"];
  if (!transition.is_array() || static_cast<int>(transition.size()) != n)
    throw std::invalid_argument("mdp document: transition must have one entry per state");
  std::vector<Eigen::MatrixXd> kernels(m, Eigen::MatrixXd::Zero(n, n));
  for (int s = 0; s < n; ++s) {
    const auto& per_action = transition[s];
    if (!per_action.is_array() || static_cast<int>(per_action.size()) != m)
      throw std::invalid_argument("mdp document: transition[" + std::to_string(s) +
                                  "] must have one row per action");
    for (int a = 0; a < m; ++a) {
      const auto& row = per_action[a];
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw std::invalid_argument("mdp document: transition[" + std::to_string(s) +
                                    "][" + std::to_string(a) + "] has wrong length");
      for (int j = 0; j < n; ++j) kernels[a](s, j) = row[j].get<double>();
    }
  }
  return TabularMdp(std::move(kernels));
}

nlohmann::json reward_to_json(const RewardFunction& reward) {
  return {{"values", matrix_to_json(reward.values())}};
}

RewardFunction reward_from_json(const nlohmann::json& doc) {
  require_keys(doc, {"values"}, "reward document");
  return RewardFunction(matrix_from_json(doc["values"], "reward document"));
}

nlohmann::json policy_to_json(const StochasticPolicy& policy) {
  return {{"probs", matrix_to_json(policy.probs())}};
}

StochasticPolicy policy_from_json(const nlohmann::json& doc) {
  require_keys(doc, {"probs"}, "policy document");
  return StochasticPolicy(matrix_from_json(doc["probs"], "policy document"));
}

FeatureMap features_from_json(const nlohmann::json& doc) {
  require_keys(doc, {"phi"}, "feature document");
  return FeatureMap(matrix_from_json(doc["phi"], "feature document"));
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  return doc;
}

void save_json_file(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace omdp
