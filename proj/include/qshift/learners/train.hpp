#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qshift/errors.hpp"
#include "qshift/folds.hpp"
#include "qshift/learners/decision_tree.hpp"
#include "qshift/learners/ensemble.hpp"
#include "qshift/learners/gradient_boosting.hpp"
#include "qshift/learners/linear.hpp"
#include "qshift/learners/mlp.hpp"
#include "qshift/learners/model.hpp"
#include "qshift/learners/random_forest.hpp"
#include "qshift/types.hpp"

namespace qshift::learn {

/// Effective hyperparameters for every learner, filled with the documented
/// defaults. A fit consumes only the blocks relevant to its kind plus the
/// seed; the full struct is recorded into saved model files.
struct TrainConfig {
  std::uint64_t seed = 1;
  DtConfig dt;
  RfConfig rf;
  LrConfig lr;
  SvmConfig svm;
  GbtConfig gbt;
  MlpConfig mlp;
  std::vector<ModelKind> stacking_bases{ModelKind::DecisionTree, ModelKind::RandomForest,
                                        ModelKind::LogisticRegression, ModelKind::LinearSvm,
                                        ModelKind::GradientBoosting};
  int stacking_folds = 5;
  std::vector<ModelKind> voting_members{ModelKind::DecisionTree, ModelKind::RandomForest,
                                        ModelKind::LogisticRegression, ModelKind::LinearSvm,
                                        ModelKind::GradientBoosting};
};

inline ModelPtr fit_model(ModelKind kind, const Dataset& d, const TrainConfig& config);

namespace train_detail {

inline void check_ensemble_member(ModelKind kind, const char* what) {
  if (kind == ModelKind::Stacking || kind == ModelKind::SoftVoting)
    throw DomainError(std::string(what) + " cannot contain another ensemble");
}

inline ModelPtr fit_with_seed(ModelKind kind, const Dataset& d, const TrainConfig& config,
                              std::uint64_t seed) {
  TrainConfig local = config;
  local.seed = seed;
  return fit_model(kind, d, local);
}

}  // namespace train_detail

/// Out-of-fold stacking: base probabilities collected across an internal
/// k-fold feed a logistic meta-model; the bases are then refit on all rows.
/// The internal split is stratified when every class has at least k members,
/// otherwise plain shuffled folds keep tiny fixtures workable.
inline std::shared_ptr<const StackingModel> fit_stacking(const Dataset& d,
                                                         const TrainConfig& config) {
  if (!d.has_both_classes()) throw DomainError("stacking needs both classes in the training data");
  if (config.stacking_bases.empty()) throw DomainError("stacking needs at least one base model");
  if (config.stacking_folds < 2) throw DomainError("stacking needs at least 2 internal folds");
  const auto k = static_cast<std::size_t>(config.stacking_folds);
  if (d.size() < k) throw DomainError("stacking needs at least as many rows as internal folds");
  for (ModelKind kind : config.stacking_bases)
    train_detail::check_ensemble_member(kind, "stacking bases");

  auto counts = d.class_counts();
  std::vector<std::vector<std::size_t>> folds =
      std::min(counts[0], counts[1]) >= k ? stratified_kfold(d, k, config.seed)
                                          : plain_kfold(d.size(), k, config.seed);

  const std::size_t n_bases = config.stacking_bases.size();
  std::vector<std::vector<double>> meta_x(d.size(), std::vector<double>(n_bases, 0.0));
  for (std::size_t fold = 0; fold < folds.size(); ++fold) {
    std::vector<std::size_t> train_idx;
    for (std::size_t other = 0; other < folds.size(); ++other) {
      if (other == fold) continue;
      train_idx.insert(train_idx.end(), folds[other].begin(), folds[other].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    Dataset train_part = d.subset(train_idx);
    for (std::size_t b = 0; b < n_bases; ++b) {
      ModelPtr base;
      try {
        base = train_detail::fit_with_seed(config.stacking_bases[b], train_part, config,
                                           derive_seed(config.seed, (fold + 1) * 64 + b));
      } catch (const DomainError& e) {
        throw DomainError("stacking internal fold " + std::to_string(fold) + ": " + e.what());
      }
      for (std::size_t i : folds[fold])
        meta_x[i][b] = base->predict_proba(d.rows()[i].features());
    }
  }

  std::vector<int> y;
  y.reserve(d.size());
  for (const auto& r : d.rows()) y.push_back(static_cast<int>(r.klass()));

  Scaler meta_scaler = Scaler::fit(meta_x);
  for (auto& row : meta_x) meta_scaler.transform_inplace(row);
  LrConfig meta_cfg;
  const double lambda = 1.0 / (static_cast<double>(d.size()) * meta_cfg.c);
  LogRegCore meta = LogRegCore::fit(meta_x, y, lambda, meta_cfg.max_iter, meta_cfg.tol);

  std::vector<ModelPtr> bases;
  bases.reserve(n_bases);
  for (std::size_t b = 0; b < n_bases; ++b)
    bases.push_back(train_detail::fit_with_seed(config.stacking_bases[b], d, config,
                                                derive_seed(config.seed, b)));

  return std::make_shared<StackingModel>(std::move(bases), std::move(meta_scaler), std::move(meta),
                                         config.stacking_folds, config.seed);
}

/// Soft voting over independently fitted members.
inline std::shared_ptr<const VotingModel> fit_voting(const Dataset& d, const TrainConfig& config) {
  if (config.voting_members.empty()) throw DomainError("voting needs at least one member");
  for (ModelKind kind : config.voting_members)
    train_detail::check_ensemble_member(kind, "voting members");
  std::vector<ModelPtr> members;
  members.reserve(config.voting_members.size());
  for (std::size_t i = 0; i < config.voting_members.size(); ++i)
    members.push_back(train_detail::fit_with_seed(config.voting_members[i], d,
                                                  config, derive_seed(config.seed, i)));
  return std::make_shared<VotingModel>(std::move(members), config.seed);
}

inline ModelPtr fit_model(ModelKind kind, const Dataset& d, const TrainConfig& config) {
  switch (kind) {
    case ModelKind::DecisionTree: return fit_decision_tree(d, config.dt, config.seed);
    case ModelKind::RandomForest: return fit_random_forest(d, config.rf, config.seed);
    case ModelKind::LogisticRegression: return fit_logistic_regression(d, config.lr, config.seed);
    case ModelKind::LinearSvm: return fit_linear_svm(d, config.svm, config.seed);
    case ModelKind::GradientBoosting: return fit_gradient_boosting(d, config.gbt, config.seed);
    case ModelKind::Stacking: return fit_stacking(d, config);
    case ModelKind::SoftVoting: return fit_voting(d, config);
    case ModelKind::Mlp: return fit_mlp(d, config.mlp, config.seed);
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace qshift::learn
