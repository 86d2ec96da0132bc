#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "qshift/errors.hpp"
#include "qshift/learners/linear.hpp"
#include "qshift/learners/model.hpp"
#include "qshift/learners/scaler.hpp"
#include "qshift/types.hpp"

namespace qshift::learn {

/// Base models plus a logistic meta-model over their probabilities. The meta
/// model was trained on out-of-fold base predictions; the bases held here are
/// refit on the full training data.
class StackingModel : public Model {
 public:
  StackingModel(std::vector<ModelPtr> bases, Scaler meta_scaler, LogRegCore meta, int folds,
                std::uint64_t seed)
      : Model(seed),
        bases_(std::move(bases)),
        meta_scaler_(std::move(meta_scaler)),
        meta_(std::move(meta)),
        folds_(folds) {}

  ModelKind kind() const override { return ModelKind::Stacking; }
  const std::vector<ModelPtr>& bases() const { return bases_; }
  const Scaler& meta_scaler() const { return meta_scaler_; }
  const LogRegCore& meta() const { return meta_; }
  int folds() const { return folds_; }

 protected:
  double proba_impl(const FeatureVector& x) const override {
    std::vector<double> meta_features;
    meta_features.reserve(bases_.size());
    for (const auto& base : bases_) meta_features.push_back(base->predict_proba(x));
    meta_scaler_.transform_inplace(meta_features);
    return sigmoid(meta_.decision(meta_features));
  }

 private:
  std::vector<ModelPtr> bases_;
  Scaler meta_scaler_;
  LogRegCore meta_;
  int folds_;
};

/// Soft voting: the unweighted mean of member probabilities.
class VotingModel : public Model {
 public:
  VotingModel(std::vector<ModelPtr> members, std::uint64_t seed)
      : Model(seed), members_(std::move(members)) {
    if (members_.empty()) throw DomainError("voting ensemble needs at least one member");
  }

  ModelKind kind() const override { return ModelKind::SoftVoting; }
  const std::vector<ModelPtr>& members() const { return members_; }

 protected:
  double proba_impl(const FeatureVector& x) const override {
    double sum = 0.0;
    for (const auto& m : members_) sum += m->predict_proba(x);
    return sum / static_cast<double>(members_.size());
  }

 private:
  std::vector<ModelPtr> members_;
};

}  // namespace qshift::learn
