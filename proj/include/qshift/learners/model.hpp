#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qshift/errors.hpp"
#include "qshift/types.hpp"

namespace qshift::learn {

enum class ModelKind {
  DecisionTree,
  RandomForest,
  LogisticRegression,
  LinearSvm,
  GradientBoosting,
  Stacking,
  SoftVoting,
  Mlp,
};

inline constexpr std::array<ModelKind, 8> kAllModelKinds{
    ModelKind::DecisionTree,   ModelKind::RandomForest, ModelKind::LogisticRegression,
    ModelKind::LinearSvm,      ModelKind::GradientBoosting,
    ModelKind::Stacking,       ModelKind::SoftVoting,   ModelKind::Mlp,
};

inline std::string_view kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::DecisionTree: return "decision_tree";
    case ModelKind::RandomForest: return "random_forest";
    case ModelKind::LogisticRegression: return "logistic_regression";
    case ModelKind::LinearSvm: return "linear_svm";
    case ModelKind::GradientBoosting: return "gradient_boosting";
    case ModelKind::Stacking: return "stacking";
    case ModelKind::SoftVoting: return "soft_voting";
    case ModelKind::Mlp: return "mlp";
  }
  return "unknown";
}

/// Accepts canonical names and the short CLI aliases (dt, rf, lr, svm, gbt,
/// xgboost, voting, nn, ...).
inline std::optional<ModelKind> kind_from_name(std::string_view name) {
  if (name == "decision_tree" || name == "dt") return ModelKind::DecisionTree;
  if (name == "random_forest" || name == "rf") return ModelKind::RandomForest;
  if (name == "logistic_regression" || name == "lr") return ModelKind::LogisticRegression;
  if (name == "linear_svm" || name == "svm") return ModelKind::LinearSvm;
  if (name == "gradient_boosting" || name == "gbt" || name == "xgboost")
    return ModelKind::GradientBoosting;
  if (name == "stacking" || name == "stack") return ModelKind::Stacking;
  if (name == "soft_voting" || name == "voting") return ModelKind::SoftVoting;
  if (name == "mlp" || name == "nn") return ModelKind::Mlp;
  return std::nullopt;
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

/// A fitted classifier. Immutable after fit; safe to share across threads.
/// The uniform decision rule is High iff predict_proba(x) >= 0.5, which for
/// the margin-based SVM coincides with margin >= 0.
class Model {
 public:
  virtual ~Model() = default;

  virtual ModelKind kind() const = 0;

  /// Probability of the High class. Non-finite features are rejected.
  double predict_proba(const FeatureVector& x) const {
    if (!std::isfinite(x.rsrp) || !std::isfinite(x.rsrq) || !std::isfinite(x.snr))
      throw std::invalid_argument("predict: non-finite feature");
    return proba_impl(x);
  }

  BinaryClass predict(const FeatureVector& x) const {
    return predict_proba(x) >= 0.5 ? BinaryClass::High : BinaryClass::Low;
  }

  std::uint64_t seed() const { return seed_; }

 protected:
  explicit Model(std::uint64_t seed) : seed_(seed) {}
  virtual double proba_impl(const FeatureVector& x) const = 0;

 private:
  std::uint64_t seed_;
};

using ModelPtr = std::shared_ptr<const Model>;

}  // namespace qshift::learn
