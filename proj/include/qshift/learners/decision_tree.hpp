#pragma once

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

struct DtConfig {
  int max_depth = -1;  // unlimited
  int min_samples_split = 2;
};

class DecisionTreeModel : public Model {
 public:
  DecisionTreeModel(Tree tree, DtConfig config, std::uint64_t seed)
      : Model(seed), tree_(std::move(tree)), config_(config) {}

  ModelKind kind() const override { return ModelKind::DecisionTree; }
  const Tree& tree() const { return tree_; }
  const DtConfig& config() const { return config_; }

 protected:
  double proba_impl(const FeatureVector& x) const override { return tree_.predict(x.as_array()); }

 private:
  Tree tree_;
  DtConfig config_;
};

/// Grows a Gini tree until leaves are pure or below min_samples_split.
/// Single-class input is allowed and yields a constant predictor.
inline std::shared_ptr<const DecisionTreeModel> fit_decision_tree(const Dataset& d,
                                                                  const DtConfig& config = {},
                                                                  std::uint64_t seed = 0) {
  if (d.size() < 2) throw DomainError("decision tree needs at least 2 rows");
  std::vector<FeatureRow> x;
  std::vector<int> y;
  dataset_to_matrix(d, x, y);
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  ClassificationGrowth growth;
  growth.max_depth = config.max_depth;
  growth.min_samples_split = config.min_samples_split;
  Tree tree = grow_classification_tree(x, y, std::move(rows), growth);
  return std::make_shared<DecisionTreeModel>(std::move(tree), config, seed);
}

}  // namespace qshift::learn
