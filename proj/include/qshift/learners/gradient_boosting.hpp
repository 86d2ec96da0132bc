#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "qshift/errors.hpp"
#include "qshift/learners/model.hpp"
#include "qshift/learners/tree.hpp"
#include "qshift/types.hpp"

namespace qshift::learn {

struct GbtConfig {
  int rounds = 100;
  int max_depth = 3;
  double shrinkage = 0.1;
  double lambda = 1.0;  // L2 on leaf weights
};

/// Second-order gradient-boosted trees on logistic loss. The score starts at
/// the prior log-odds; each round adds shrinkage * tree(x) where the tree is
/// fit to per-row gradients and hessians with Newton leaf weights.
class GradientBoostingModel : public Model {
 public:
  GradientBoostingModel(double base_score, std::vector<Tree> trees, std::vector<double> loss_trace,
                        GbtConfig config, std::uint64_t seed)
      : Model(seed),
        base_score_(base_score),
        trees_(std::move(trees)),
        loss_trace_(std::move(loss_trace)),
        config_(config) {}

  ModelKind kind() const override { return ModelKind::GradientBoosting; }
  double base_score() const { return base_score_; }
  const std::vector<Tree>& trees() const { return trees_; }
  /// Mean training log-loss before any tree and after each round.
  const std::vector<double>& loss_trace() const { return loss_trace_; }
  const GbtConfig& config() const { return config_; }

  double score(const FeatureVector& x) const {
    auto a = x.as_array();
    double s = base_score_;
    for (const auto& t : trees_) s += config_.shrinkage * t.predict(a);
    return s;
  }

 protected:
  double proba_impl(const FeatureVector& x) const override { return sigmoid(score(x)); }

 private:
  double base_score_;
  std::vector<Tree> trees_;
  std::vector<double> loss_trace_;
  GbtConfig config_;
};

inline std::shared_ptr<const GradientBoostingModel> fit_gradient_boosting(
    const Dataset& d, const GbtConfig& config = {}, std::uint64_t seed = 0) {
  if (config.rounds < 0) throw DomainError("gradient boosting needs rounds >= 0");
  std::vector<FeatureRow> x;
  std::vector<int> y;
  dataset_to_matrix(d, x, y);
  const std::size_t n = d.size();

  double p1 = 0.0;
  for (int label : y) p1 += label;
  p1 = std::clamp(p1 / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
  const double base_score = std::log(p1 / (1.0 - p1));

  std::vector<double> score(n, base_score);
  std::vector<double> grad(n), hess(n);
  auto mean_log_loss = [&]() {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      // log-loss from the logit, stable for large |score|
      double z = score[i];
      double ce = z > 0.0 ? z * (1 - y[i]) + std::log1p(std::exp(-z))
                          : -z * y[i] + std::log1p(std::exp(z));
      loss += ce;
    }
    return loss / static_cast<double>(n);
  };

  std::vector<double> loss_trace;
  loss_trace.reserve(static_cast<std::size_t>(config.rounds) + 1);
  loss_trace.push_back(mean_log_loss());

  RegressionGrowth growth;
  growth.max_depth = config.max_depth;
  growth.lambda = config.lambda;

  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(config.rounds));
  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(score[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Tree tree = grow_regression_tree(x, grad, hess, std::move(rows), growth);
    for (std::size_t i = 0; i < n; ++i) score[i] += config.shrinkage * tree.predict(x[i]);
    trees.push_back(std::move(tree));
    loss_trace.push_back(mean_log_loss());
  }
  return std::make_shared<GradientBoostingModel>(base_score, std::move(trees),
                                                 std::move(loss_trace), config, seed);
}

}  // namespace qshift::learn
