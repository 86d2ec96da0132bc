#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qshift/errors.hpp"
#include "qshift/learners/train.hpp"

namespace qshift::persist {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kCreatedBy = "qshift 0.1.0";

namespace detail {

using learn::Model;
using learn::ModelKind;
using learn::ModelPtr;

inline void ensure_finite(const ordered_json& j, const std::string& path) {
  if (j.is_number_float() && !std::isfinite(j.get<double>()))
    throw PersistError("refusing to save non-finite value at " + path);
  if (j.is_object())
    for (auto it = j.begin(); it != j.end(); ++it) ensure_finite(it.value(), path + "." + it.key());
  if (j.is_array())
    for (std::size_t i = 0; i < j.size(); ++i)
      ensure_finite(j[i], path + "[" + std::to_string(i) + "]");
}

inline const ordered_json& require(const ordered_json& j, const char* key,
                                   const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw PersistError("missing field " + path + "." + key);
  return j.at(key);
}

inline double require_double(const ordered_json& j, const char* key, const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_number()) throw PersistError("field " + path + "." + key + " is not a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw PersistError("field " + path + "." + key + " is not finite");
  return d;
}

inline std::int64_t require_int(const ordered_json& j, const char* key, const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw PersistError("field " + path + "." + key + " is not an integer");
  return v.get<std::int64_t>();
}

inline bool require_bool(const ordered_json& j, const char* key, const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_boolean()) throw PersistError("field " + path + "." + key + " is not a boolean");
  return v.get<bool>();
}

inline std::vector<double> require_double_array(const ordered_json& j, const char* key,
                                                const std::string& path) {
  const auto& v = require(j, key, path);
  if (!v.is_array()) throw PersistError("field " + path + "." + key + " is not an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw PersistError("field " + path + "." + key + "[" + std::to_string(i) +
                         "] is not a number");
    double d = v[i].get<double>();
    if (!std::isfinite(d))
      throw PersistError("field " + path + "." + key + "[" + std::to_string(i) + "] is not finite");
    out.push_back(d);
  }
  return out;
}

// --- scaler ---

inline ordered_json scaler_to_json(const learn::Scaler& s) {
  return ordered_json{{"mean", s.mean}, {"scale", s.scale}};
}

inline learn::Scaler scaler_from_json(const ordered_json& j, const std::string& path,
                                      std::size_t expected_dim) {
  learn::Scaler s;
  s.mean = require_double_array(j, "mean", path);
  s.scale = require_double_array(j, "scale", path);
  if (s.mean.size() != expected_dim || s.scale.size() != expected_dim)
    throw PersistError("field " + path + " has wrong dimension (want " +
                       std::to_string(expected_dim) + ")");
  for (std::size_t i = 0; i < s.scale.size(); ++i)
    if (s.scale[i] <= 0.0)
      throw PersistError("field " + path + ".scale[" + std::to_string(i) + "] must be positive");
  return s;
}

// --- trees ---
// A node is the 5-tuple [feature, threshold, left, right, value]; children
// always point forward, which load re-checks to rule out cycles.

inline ordered_json tree_to_json(const learn::Tree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back(ordered_json::array({n.feature, n.threshold, n.left, n.right, n.value}));
  return nodes;
}

inline learn::Tree tree_from_json(const ordered_json& j, const std::string& path,
                                  bool leaves_are_probabilities) {
  if (!j.is_array() || j.empty()) throw PersistError("field " + path + " is not a non-empty array");
  learn::Tree tree;
  tree.nodes.reserve(j.size());
  const auto count = static_cast<std::int64_t>(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string node_path = path + "[" + std::to_string(i) + "]";
    const auto& nj = j[i];
    if (!nj.is_array() || nj.size() != 5)
      throw PersistError("field " + node_path + " is not a 5-element node");
    for (int f = 0; f < 5; ++f)
      if (!nj[static_cast<std::size_t>(f)].is_number())
        throw PersistError("field " + node_path + "[" + std::to_string(f) + "] is not a number");
    learn::TreeNode node;
    node.feature = nj[0].get<std::int32_t>();
    node.threshold = nj[1].get<double>();
    node.left = nj[2].get<std::int32_t>();
    node.right = nj[3].get<std::int32_t>();
    node.value = nj[4].get<double>();
    if (!std::isfinite(node.threshold) || !std::isfinite(node.value))
      throw PersistError("field " + node_path + " has a non-finite value");
    if (node.feature < -1 || node.feature >= kFeatureCount)
      throw PersistError("field " + node_path + " feature index " +
                         std::to_string(node.feature) + " out of range");
    if (node.feature < 0) {
      if (node.left != -1 || node.right != -1)
        throw PersistError("field " + node_path + " leaf has children");
      if (leaves_are_probabilities && (node.value < 0.0 || node.value > 1.0))
        throw PersistError("field " + node_path + " leaf probability outside [0,1]");
    } else {
      auto self = static_cast<std::int64_t>(i);
      if (node.left <= self || node.left >= count || node.right <= self || node.right >= count)
        throw PersistError("field " + node_path + " child index out of range");
    }
    tree.nodes.push_back(node);
  }
  return tree;
}

inline ordered_json logreg_to_json(const learn::LogRegCore& core) {
  return ordered_json{{"weights", core.weights},
                      {"intercept", core.intercept},
                      {"converged", core.converged},
                      {"iterations", core.iterations}};
}

inline learn::LogRegCore logreg_from_json(const ordered_json& j, const std::string& path,
                                          std::size_t expected_dim) {
  learn::LogRegCore core;
  core.weights = require_double_array(j, "weights", path);
  if (core.weights.size() != expected_dim)
    throw PersistError("field " + path + ".weights has wrong dimension (want " +
                       std::to_string(expected_dim) + ")");
  core.intercept = require_double(j, "intercept", path);
  core.converged = require_bool(j, "converged", path);
  core.iterations = static_cast<int>(require_int(j, "iterations", path));
  return core;
}

inline ordered_json core_to_json(const Model& m);

inline ordered_json kind_payload(const Model& m) {
  switch (m.kind()) {
    case ModelKind::DecisionTree: {
      const auto& dt = static_cast<const learn::DecisionTreeModel&>(m);
      return ordered_json{{"nodes", tree_to_json(dt.tree())}};
    }
    case ModelKind::RandomForest: {
      const auto& rf = static_cast<const learn::RandomForestModel&>(m);
      ordered_json trees = ordered_json::array();
      for (const auto& t : rf.trees()) trees.push_back(tree_to_json(t));
      return ordered_json{{"trees", std::move(trees)}};
    }
    case ModelKind::LogisticRegression: {
      const auto& lr = static_cast<const learn::LogisticRegressionModel&>(m);
      return logreg_to_json(lr.core());
    }
    case ModelKind::LinearSvm: {
      const auto& svm = static_cast<const learn::LinearSvmModel&>(m);
      return ordered_json{{"weights", svm.weights()}, {"bias", svm.bias()}};
    }
    case ModelKind::GradientBoosting: {
      const auto& gbt = static_cast<const learn::GradientBoostingModel&>(m);
      ordered_json trees = ordered_json::array();
      for (const auto& t : gbt.trees()) trees.push_back(tree_to_json(t));
      return ordered_json{{"base_score", gbt.base_score()},
                          {"trees", std::move(trees)},
                          {"loss_trace", gbt.loss_trace()}};
    }
    case ModelKind::Stacking: {
      const auto& st = static_cast<const learn::StackingModel&>(m);
      ordered_json bases = ordered_json::array();
      for (const auto& b : st.bases()) bases.push_back(core_to_json(*b));
      return ordered_json{{"bases", std::move(bases)},
                          {"meta_standardization", scaler_to_json(st.meta_scaler())},
                          {"meta", logreg_to_json(st.meta())}};
    }
    case ModelKind::SoftVoting: {
      const auto& vote = static_cast<const learn::VotingModel&>(m);
      ordered_json members = ordered_json::array();
      for (const auto& member : vote.members()) members.push_back(core_to_json(*member));
      return ordered_json{{"members", std::move(members)}};
    }
    case ModelKind::Mlp: {
      const auto& mlp = static_cast<const learn::MlpModel&>(m);
      const auto& net = mlp.network();
      auto matrix = [](const Eigen::MatrixXd& w) {
        ordered_json rows = ordered_json::array();
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          ordered_json row = ordered_json::array();
          for (Eigen::Index j = 0; j < w.cols(); ++j) row.push_back(w(i, j));
          rows.push_back(std::move(row));
        }
        return rows;
      };
      auto vector = [](const Eigen::VectorXd& v) {
        ordered_json out = ordered_json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
        return out;
      };
      ordered_json w3 = ordered_json::array();
      for (Eigen::Index i = 0; i < net.w3.size(); ++i) w3.push_back(net.w3[i]);
      return ordered_json{{"w1", matrix(net.w1)}, {"b1", vector(net.b1)},
                          {"w2", matrix(net.w2)}, {"b2", vector(net.b2)},
                          {"w3", std::move(w3)},  {"b3", net.b3}};
    }
  }
  throw PersistError("unknown model kind");
}

inline ordered_json kind_hyperparameters(const Model& m) {
  switch (m.kind()) {
    case ModelKind::DecisionTree: {
      const auto& cfg = static_cast<const learn::DecisionTreeModel&>(m).config();
      return ordered_json{{"max_depth", cfg.max_depth},
                          {"min_samples_split", cfg.min_samples_split}};
    }
    case ModelKind::RandomForest: {
      const auto& cfg = static_cast<const learn::RandomForestModel&>(m).config();
      return ordered_json{{"n_trees", cfg.n_trees},
                          {"bootstrap", cfg.bootstrap},
                          {"features_per_split", cfg.features_per_split},
                          {"max_depth", cfg.max_depth},
                          {"min_samples_split", cfg.min_samples_split}};
    }
    case ModelKind::LogisticRegression: {
      const auto& cfg = static_cast<const learn::LogisticRegressionModel&>(m).config();
      return ordered_json{{"c", cfg.c}, {"max_iter", cfg.max_iter}, {"tol", cfg.tol}};
    }
    case ModelKind::LinearSvm: {
      const auto& cfg = static_cast<const learn::LinearSvmModel&>(m).config();
      return ordered_json{{"lambda", cfg.lambda}, {"epochs", cfg.epochs}};
    }
    case ModelKind::GradientBoosting: {
      const auto& cfg = static_cast<const learn::GradientBoostingModel&>(m).config();
      return ordered_json{{"rounds", cfg.rounds},
                          {"max_depth", cfg.max_depth},
                          {"shrinkage", cfg.shrinkage},
                          {"lambda", cfg.lambda}};
    }
    case ModelKind::Stacking: {
      const auto& st = static_cast<const learn::StackingModel&>(m);
      ordered_json bases = ordered_json::array();
      for (const auto& b : st.bases()) bases.push_back(std::string(learn::kind_name(b->kind())));
      return ordered_json{{"folds", st.folds()}, {"bases", std::move(bases)}};
    }
    case ModelKind::SoftVoting: {
      const auto& vote = static_cast<const learn::VotingModel&>(m);
      ordered_json members = ordered_json::array();
      for (const auto& member : vote.members())
        members.push_back(std::string(learn::kind_name(member->kind())));
      return ordered_json{{"members", std::move(members)}};
    }
    case ModelKind::Mlp: {
      const auto& cfg = static_cast<const learn::MlpModel&>(m).config();
      return ordered_json{{"hidden1", cfg.hidden1},
                          {"hidden2", cfg.hidden2},
                          {"epochs", cfg.epochs},
                          {"learning_rate", cfg.learning_rate}};
    }
  }
  throw PersistError("unknown model kind");
}

inline ordered_json standardization_json(const Model& m) {
  switch (m.kind()) {
    case ModelKind::LogisticRegression:
      return scaler_to_json(static_cast<const learn::LogisticRegressionModel&>(m).scaler());
    case ModelKind::LinearSvm:
      return scaler_to_json(static_cast<const learn::LinearSvmModel&>(m).scaler());
    case ModelKind::Mlp:
      return scaler_to_json(static_cast<const learn::MlpModel&>(m).scaler());
    default:
      return nullptr;  // trees and ensembles consume raw features
  }
}

inline ordered_json core_to_json(const Model& m) {
  ordered_json j;
  j["kind"] = std::string(learn::kind_name(m.kind()));
  j["seed"] = m.seed();
  j["hyperparameters"] = kind_hyperparameters(m);
  j["standardization"] = standardization_json(m);
  j["payload"] = kind_payload(m);
  return j;
}

inline ModelPtr core_from_json(const ordered_json& j, const std::string& path);

inline ModelPtr kind_from_payload(ModelKind kind, const ordered_json& j, const std::string& path) {
  const auto& hyper = require(j, "hyperparameters", path);
  const auto& payload = require(j, "payload", path);
  const std::string hyper_path = path + ".hyperparameters";
  const std::string payload_path = path + ".payload";
  const auto seed = static_cast<std::uint64_t>(require_int(j, "seed", path));

  auto scaler3 = [&]() {
    return scaler_from_json(require(j, "standardization", path), path + ".standardization", 3);
  };

  switch (kind) {
    case ModelKind::DecisionTree: {
      learn::DtConfig cfg;
      cfg.max_depth = static_cast<int>(require_int(hyper, "max_depth", hyper_path));
      cfg.min_samples_split = static_cast<int>(require_int(hyper, "min_samples_split", hyper_path));
      auto tree = tree_from_json(require(payload, "nodes", payload_path),
                                 payload_path + ".nodes", true);
      return std::make_shared<learn::DecisionTreeModel>(std::move(tree), cfg, seed);
    }
    case ModelKind::RandomForest: {
      learn::RfConfig cfg;
      cfg.n_trees = static_cast<int>(require_int(hyper, "n_trees", hyper_path));
      cfg.bootstrap = require_bool(hyper, "bootstrap", hyper_path);
      cfg.features_per_split = static_cast<int>(require_int(hyper, "features_per_split", hyper_path));
      cfg.max_depth = static_cast<int>(require_int(hyper, "max_depth", hyper_path));
      cfg.min_samples_split = static_cast<int>(require_int(hyper, "min_samples_split", hyper_path));
      const auto& trees_json = require(payload, "trees", payload_path);
      if (!trees_json.is_array() || trees_json.empty())
        throw PersistError("field " + payload_path + ".trees is not a non-empty array");
      std::vector<learn::Tree> trees;
      trees.reserve(trees_json.size());
      for (std::size_t i = 0; i < trees_json.size(); ++i)
        trees.push_back(tree_from_json(trees_json[i],
                                       payload_path + ".trees[" + std::to_string(i) + "]", true));
      return std::make_shared<learn::RandomForestModel>(std::move(trees), cfg, seed);
    }
    case ModelKind::LogisticRegression: {
      learn::LrConfig cfg;
      cfg.c = require_double(hyper, "c", hyper_path);
      cfg.max_iter = static_cast<int>(require_int(hyper, "max_iter", hyper_path));
      cfg.tol = require_double(hyper, "tol", hyper_path);
      auto core = logreg_from_json(payload, payload_path, 3);
      return std::make_shared<learn::LogisticRegressionModel>(scaler3(), std::move(core), cfg,
                                                              seed);
    }
    case ModelKind::LinearSvm: {
      learn::SvmConfig cfg;
      cfg.lambda = require_double(hyper, "lambda", hyper_path);
      cfg.epochs = static_cast<int>(require_int(hyper, "epochs", hyper_path));
      auto weights = require_double_array(payload, "weights", payload_path);
      if (weights.size() != 3)
        throw PersistError("field " + payload_path + ".weights has wrong dimension (want 3)");
      double bias = require_double(payload, "bias", payload_path);
      return std::make_shared<learn::LinearSvmModel>(scaler3(), std::move(weights), bias, cfg,
                                                     seed);
    }
    case ModelKind::GradientBoosting: {
      learn::GbtConfig cfg;
      cfg.rounds = static_cast<int>(require_int(hyper, "rounds", hyper_path));
      cfg.max_depth = static_cast<int>(require_int(hyper, "max_depth", hyper_path));
      cfg.shrinkage = require_double(hyper, "shrinkage", hyper_path);
      cfg.lambda = require_double(hyper, "lambda", hyper_path);
      double base_score = require_double(payload, "base_score", payload_path);
      const auto& trees_json = require(payload, "trees", payload_path);
      if (!trees_json.is_array())
        throw PersistError("field " + payload_path + ".trees is not an array");
      std::vector<learn::Tree> trees;
      trees.reserve(trees_json.size());
      for (std::size_t i = 0; i < trees_json.size(); ++i)
        trees.push_back(tree_from_json(trees_json[i],
                                       payload_path + ".trees[" + std::to_string(i) + "]", false));
      auto loss_trace = require_double_array(payload, "loss_trace", payload_path);
      if (loss_trace.size() != trees.size() + 1)
        throw PersistError("field " + payload_path + ".loss_trace length mismatch");
      return std::make_shared<learn::GradientBoostingModel>(base_score, std::move(trees),
                                                            std::move(loss_trace), cfg, seed);
    }
    case ModelKind::Stacking: {
      int folds = static_cast<int>(require_int(hyper, "folds", hyper_path));
      const auto& bases_json = require(payload, "bases", payload_path);
      if (!bases_json.is_array() || bases_json.empty())
        throw PersistError("field " + payload_path + ".bases is not a non-empty array");
      std::vector<ModelPtr> bases;
      bases.reserve(bases_json.size());
      for (std::size_t i = 0; i < bases_json.size(); ++i)
        bases.push_back(core_from_json(bases_json[i],
                                       payload_path + ".bases[" + std::to_string(i) + "]"));
      auto meta_scaler = scaler_from_json(require(payload, "meta_standardization", payload_path),
                                          payload_path + ".meta_standardization", bases.size());
      auto meta = logreg_from_json(require(payload, "meta", payload_path),
                                   payload_path + ".meta", bases.size());
      return std::make_shared<learn::StackingModel>(std::move(bases), std::move(meta_scaler),
                                                    std::move(meta), folds, seed);
    }
    case ModelKind::SoftVoting: {
      const auto& members_json = require(payload, "members", payload_path);
      if (!members_json.is_array() || members_json.empty())
        throw PersistError("field " + payload_path + ".members is not a non-empty array");
      std::vector<ModelPtr> members;
      members.reserve(members_json.size());
      for (std::size_t i = 0; i < members_json.size(); ++i)
        members.push_back(core_from_json(members_json[i],
                                         payload_path + ".members[" + std::to_string(i) + "]"));
      return std::make_shared<learn::VotingModel>(std::move(members), seed);
    }
    case ModelKind::Mlp: {
      learn::MlpConfig cfg;
      cfg.hidden1 = static_cast<int>(require_int(hyper, "hidden1", hyper_path));
      cfg.hidden2 = static_cast<int>(require_int(hyper, "hidden2", hyper_path));
      cfg.epochs = static_cast<int>(require_int(hyper, "epochs", hyper_path));
      cfg.learning_rate = require_double(hyper, "learning_rate", hyper_path);
      if (cfg.hidden1 < 1 || cfg.hidden2 < 1)
        throw PersistError("field " + hyper_path + " has non-positive hidden width");
      auto matrix = [&](const char* key, Eigen::Index rows, Eigen::Index cols) {
        const auto& mj = require(payload, key, payload_path);
        const std::string mpath = payload_path + "." + key;
        if (!mj.is_array() || static_cast<Eigen::Index>(mj.size()) != rows)
          throw PersistError("field " + mpath + " has wrong row count");
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
          const auto& row = mj[static_cast<std::size_t>(i)];
          if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw PersistError("field " + mpath + "[" + std::to_string(i) +
                               "] has wrong column count");
          for (Eigen::Index jcol = 0; jcol < cols; ++jcol) {
            const auto& cell = row[static_cast<std::size_t>(jcol)];
            if (!cell.is_number())
              throw PersistError("field " + mpath + " has a non-numeric cell");
            double d = cell.get<double>();
            if (!std::isfinite(d)) throw PersistError("field " + mpath + " has a non-finite cell");
            w(i, jcol) = d;
          }
        }
        return w;
      };
      learn::MlpNetwork net;
      net.w1 = matrix("w1", cfg.hidden1, 3);
      auto b1 = require_double_array(payload, "b1", payload_path);
      auto b2 = require_double_array(payload, "b2", payload_path);
      auto w3 = require_double_array(payload, "w3", payload_path);
      if (static_cast<int>(b1.size()) != cfg.hidden1)
        throw PersistError("field " + payload_path + ".b1 has wrong dimension");
      net.w2 = matrix("w2", cfg.hidden2, cfg.hidden1);
      if (static_cast<int>(b2.size()) != cfg.hidden2)
        throw PersistError("field " + payload_path + ".b2 has wrong dimension");
      if (static_cast<int>(w3.size()) != cfg.hidden2)
        throw PersistError("field " + payload_path + ".w3 has wrong dimension");
      net.b1 = Eigen::Map<const Eigen::VectorXd>(b1.data(), static_cast<Eigen::Index>(b1.size()));
      net.b2 = Eigen::Map<const Eigen::VectorXd>(b2.data(), static_cast<Eigen::Index>(b2.size()));
      net.w3 = Eigen::Map<const Eigen::RowVectorXd>(w3.data(), static_cast<Eigen::Index>(w3.size()));
      net.b3 = require_double(payload, "b3", payload_path);
      return std::make_shared<learn::MlpModel>(scaler3(), std::move(net), cfg, seed);
    }
  }
  throw PersistError("unknown model kind");
}

inline ModelPtr core_from_json(const ordered_json& j, const std::string& path) {
  const auto& kind_json = require(j, "kind", path);
  if (!kind_json.is_string()) throw PersistError("field " + path + ".kind is not a string");
  auto kind = learn::kind_from_name(kind_json.get<std::string>());
  if (!kind)
    throw PersistError("field " + path + ".kind names unknown model '" +
                       kind_json.get<std::string>() + "'");
  return kind_from_payload(*kind, j, path);
}

}  // namespace detail

/// Canonical serialization: fixed key order and shortest round-trip number
/// encoding, so identical models always produce identical bytes. Non-finite
/// parameters are refused.
inline std::size_t save_model(const learn::Model& m, std::ostream& out) {
  ordered_json doc;
  doc["format"] = "qsm";
  doc["format_version"] = kFormatVersion;
  doc["created_by"] = std::string(kCreatedBy);
  auto core = detail::core_to_json(m);
  for (auto it = core.begin(); it != core.end(); ++it) doc[it.key()] = std::move(it.value());
  detail::ensure_finite(doc, "model");
  std::string text = doc.dump(2);
  text.push_back('\n');
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw PersistError("failed writing model file");
  return text.size();
}

/// Parses and fully validates a model file; any error leaves no usable model.
inline learn::ModelPtr load_model(std::istream& in, const std::string& source_name = "model") {
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw PersistError(source_name + ": not a valid model file: " + e.what());
  }
  const auto& format = detail::require(doc, "format", source_name);
  if (!format.is_string() || format.get<std::string>() != "qsm")
    throw PersistError(source_name + ": not a qsm model file");
  auto version = detail::require_int(doc, "format_version", source_name);
  if (version != kFormatVersion)
    throw PersistError(source_name + ": unsupported format version " + std::to_string(version) +
                       " (expected " + std::to_string(kFormatVersion) + ")");
  return detail::core_from_json(doc, source_name);
}

}  // namespace qshift::persist
