#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "qshift/errors.hpp"
#include "qshift/learners/model.hpp"
#include "qshift/learners/tree.hpp"
#include "qshift/rng.hpp"
#include "qshift/types.hpp"

namespace qshift::learn {

struct RfConfig {
  int n_trees = 100;
  bool bootstrap = true;
  int features_per_split = 1;  // floor(sqrt(3))
  int max_depth = -1;
  int min_samples_split = 2;
};

class RandomForestModel : public Model {
 public:
  RandomForestModel(std::vector<Tree> trees, RfConfig config, std::uint64_t seed)
      : Model(seed), trees_(std::move(trees)), config_(config) {}

  ModelKind kind() const override { return ModelKind::RandomForest; }
  const std::vector<Tree>& trees() const { return trees_; }
  const RfConfig& config() const { return config_; }

 protected:
  double proba_impl(const FeatureVector& x) const override {
    auto a = x.as_array();
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(a);
    return sum / static_cast<double>(trees_.size());
  }

 private:
  std::vector<Tree> trees_;
  RfConfig config_;
};

/// Bootstrap-resampled Gini trees with per-split feature subsampling. Each
/// tree draws from its own seed derived from the master seed, so the fit is
/// reproducible independent of evaluation order.
inline std::shared_ptr<const RandomForestModel> fit_random_forest(const Dataset& d,
                                                                  const RfConfig& config = {},
                                                                  std::uint64_t seed = 0) {
  if (config.n_trees <= 0) throw DomainError("random forest needs n_trees >= 1");
  if (d.size() < 2) throw DomainError("random forest needs at least 2 rows");
  if (config.features_per_split < 1 || config.features_per_split > kFeatureCount)
    throw DomainError("features_per_split must be within 1..3");

  std::vector<FeatureRow> x;
  std::vector<int> y;
  dataset_to_matrix(d, x, y);
  const std::size_t n = d.size();

  ClassificationGrowth growth;
  growth.max_depth = config.max_depth;
  growth.min_samples_split = config.min_samples_split;
  growth.features_per_split = config.features_per_split;

  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(config.n_trees));
  for (int i = 0; i < config.n_trees; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<std::size_t> rows(n);
    if (config.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees.push_back(grow_classification_tree(x, y, std::move(rows), growth, &rng));
  }
  return std::make_shared<RandomForestModel>(std::move(trees), config, seed);
}

}  // namespace qshift::learn
