#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "qshift/rng.hpp"
#include "qshift/types.hpp"

namespace qshift::learn {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] < threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf payload: P(High) for classifiers, additive weight for boosting
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const std::array<double, 3>& x) const {
    const TreeNode* node = &nodes[0];
    while (node->feature >= 0)
      node = &nodes[x[static_cast<std::size_t>(node->feature)] < node->threshold ? node->left
                                                                                 : node->right];
    return node->value;
  }

  /// Number of splits on the longest root-to-leaf path (0 for a bare leaf).
  int depth() const {
    std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
    int deepest = 0;
    while (!stack.empty()) {
      auto [at, d] = stack.back();
      stack.pop_back();
      const TreeNode& node = nodes[static_cast<std::size_t>(at)];
      if (node.feature < 0) {
        deepest = std::max(deepest, d);
      } else {
        stack.push_back({node.left, d + 1});
        stack.push_back({node.right, d + 1});
      }
    }
    return deepest;
  }
};

using FeatureRow = std::array<double, 3>;

namespace tree_detail {

// Midpoint threshold between two consecutive distinct values. Skipped by the
// caller if rounding collapses it onto the left value.
inline double midpoint(double lo, double hi) { return lo + (hi - lo) / 2.0; }

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
};

// Candidate features in ascending order; a forest samples a subset per split.
inline void candidate_features(int features_per_split, Rng* rng, std::vector<int>& out) {
  out.clear();
  if (features_per_split >= kFeatureCount || rng == nullptr) {
    for (int f = 0; f < kFeatureCount; ++f) out.push_back(f);
    return;
  }
  std::array<int, 3> pool{0, 1, 2};
  for (int i = 0; i < features_per_split; ++i) {
    int j = i + static_cast<int>(rng->below(static_cast<std::uint64_t>(kFeatureCount - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  out.assign(pool.begin(), pool.begin() + features_per_split);
  std::sort(out.begin(), out.end());
}

}  // namespace tree_detail

struct ClassificationGrowth {
  int max_depth = -1;  // -1 = grow until pure or too small to split
  int min_samples_split = 2;
  int features_per_split = kFeatureCount;
};

/// CART-style binary classification tree on Gini impurity. Thresholds are
/// midpoints of consecutive distinct feature values; among equally impure
/// splits the lowest feature index, then the lowest threshold, wins. Leaves
/// carry the fraction of High-class rows.
///
/// `rows` may contain repeats (bootstrap resamples). `rng` is only consumed
/// when features_per_split < 3.
inline Tree grow_classification_tree(const std::vector<FeatureRow>& features,
                                     const std::vector<int>& labels, std::vector<std::size_t> rows,
                                     const ClassificationGrowth& cfg, Rng* rng = nullptr) {
  Tree tree;
  if (rows.empty()) return tree;

  struct Work {
    std::int32_t node;
    std::size_t begin, end;
    int depth;
  };

  tree.nodes.emplace_back();
  std::vector<Work> stack{{0, 0, rows.size(), 0}};
  std::vector<std::pair<double, int>> scratch;
  std::vector<int> candidates;

  while (!stack.empty()) {
    Work work = stack.back();
    stack.pop_back();
    const std::size_t n = work.end - work.begin;
    std::size_t high = 0;
    for (std::size_t i = work.begin; i < work.end; ++i) high += static_cast<std::size_t>(labels[rows[i]]);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(work.node)];
    node.value = static_cast<double>(high) / static_cast<double>(n);

    const bool pure = high == 0 || high == n;
    const bool too_small = n < static_cast<std::size_t>(cfg.min_samples_split);
    const bool too_deep = cfg.max_depth >= 0 && work.depth >= cfg.max_depth;
    if (pure || too_small || too_deep) continue;

    tree_detail::candidate_features(cfg.features_per_split, rng, candidates);

    tree_detail::SplitChoice best;
    double best_impurity = std::numeric_limits<double>::infinity();
    for (int f : candidates) {
      scratch.clear();
      for (std::size_t i = work.begin; i < work.end; ++i)
        scratch.emplace_back(features[rows[i]][static_cast<std::size_t>(f)], labels[rows[i]]);
      std::sort(scratch.begin(), scratch.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::size_t left_high = 0;
      for (std::size_t i = 1; i < n; ++i) {
        left_high += static_cast<std::size_t>(scratch[i - 1].second);
        if (scratch[i].first == scratch[i - 1].first) continue;
        double t = tree_detail::midpoint(scratch[i - 1].first, scratch[i].first);
        if (!(t > scratch[i - 1].first) || !(t <= scratch[i].first)) continue;
        // Weighted Gini over both children, scaled by n (constant factor).
        double nl = static_cast<double>(i), nr = static_cast<double>(n - i);
        double hl = static_cast<double>(left_high), hr = static_cast<double>(high - left_high);
        double impurity = (nl - (hl * hl + (nl - hl) * (nl - hl)) / nl) +
                          (nr - (hr * hr + (nr - hr) * (nr - hr)) / nr);
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best = {f, t};
        }
      }
    }
    if (best.feature < 0) continue;  // every candidate feature is constant here

    auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(work.begin),
                              rows.begin() + static_cast<std::ptrdiff_t>(work.end),
                              [&](std::size_t r) {
                                return features[r][static_cast<std::size_t>(best.feature)] <
                                       best.threshold;
                              });
    std::size_t split_at = static_cast<std::size_t>(mid - rows.begin());

    std::int32_t left = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::int32_t right = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode& parent = tree.nodes[static_cast<std::size_t>(work.node)];
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.left = left;
    parent.right = right;
    stack.push_back({left, work.begin, split_at, work.depth + 1});
    stack.push_back({right, split_at, work.end, work.depth + 1});
  }
  return tree;
}

struct RegressionGrowth {
  int max_depth = 3;
  double lambda = 1.0;  // L2 on leaf weights
};

/// Second-order regression tree for boosting: splits maximize the Newton gain
///   1/2 (GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l))
/// and leaves carry -G/(H+l). Only strictly positive gains split.
inline Tree grow_regression_tree(const std::vector<FeatureRow>& features,
                                 const std::vector<double>& grad, const std::vector<double>& hess,
                                 std::vector<std::size_t> rows, const RegressionGrowth& cfg) {
  Tree tree;
  if (rows.empty()) return tree;

  struct Work {
    std::int32_t node;
    std::size_t begin, end;
    int depth;
  };

  tree.nodes.emplace_back();
  std::vector<Work> stack{{0, 0, rows.size(), 0}};
  std::vector<std::pair<double, std::size_t>> scratch;  // (feature value, row)

  while (!stack.empty()) {
    Work work = stack.back();
    stack.pop_back();
    const std::size_t n = work.end - work.begin;
    double total_g = 0.0, total_h = 0.0;
    for (std::size_t i = work.begin; i < work.end; ++i) {
      total_g += grad[rows[i]];
      total_h += hess[rows[i]];
    }
    TreeNode& node = tree.nodes[static_cast<std::size_t>(work.node)];
    node.value = -total_g / (total_h + cfg.lambda);

    if (n < 2 || (cfg.max_depth >= 0 && work.depth >= cfg.max_depth)) continue;

    // Zero-gain splits are accepted (first candidate wins) so symmetric
    // structure with no first-order signal at the root, XOR-like data, can
    // still be separated one level down. Negative gains never split, which
    // keeps constant-gradient regions as leaves.
    tree_detail::SplitChoice best;
    double best_gain = 0.0;
    const double parent_score = total_g * total_g / (total_h + cfg.lambda);
    for (int f = 0; f < kFeatureCount; ++f) {
      scratch.clear();
      for (std::size_t i = work.begin; i < work.end; ++i)
        scratch.emplace_back(features[rows[i]][static_cast<std::size_t>(f)], rows[i]);
      std::sort(scratch.begin(), scratch.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double gl = 0.0, hl = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        gl += grad[scratch[i - 1].second];
        hl += hess[scratch[i - 1].second];
        if (scratch[i].first == scratch[i - 1].first) continue;
        double t = tree_detail::midpoint(scratch[i - 1].first, scratch[i].first);
        if (!(t > scratch[i - 1].first) || !(t <= scratch[i].first)) continue;
        double gr = total_g - gl, hr = total_h - hl;
        double gain = 0.5 * (gl * gl / (hl + cfg.lambda) + gr * gr / (hr + cfg.lambda) -
                             parent_score);
        if (gain > best_gain || (best.feature < 0 && gain >= 0.0)) {
          best_gain = gain;
          best = {f, t};
        }
      }
    }
    if (best.feature < 0) continue;

    auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(work.begin),
                              rows.begin() + static_cast<std::ptrdiff_t>(work.end),
                              [&](std::size_t r) {
                                return features[r][static_cast<std::size_t>(best.feature)] <
                                       best.threshold;
                              });
    std::size_t split_at = static_cast<std::size_t>(mid - rows.begin());

    std::int32_t left = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::int32_t right = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode& parent = tree.nodes[static_cast<std::size_t>(work.node)];
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.left = left;
    parent.right = right;
    stack.push_back({left, work.begin, split_at, work.depth + 1});
    stack.push_back({right, split_at, work.end, work.depth + 1});
  }
  return tree;
}

/// Extracts the feature matrix and 0/1 labels a learner consumes.
inline void dataset_to_matrix(const Dataset& d, std::vector<FeatureRow>& x, std::vector<int>& y) {
  x.clear();
  y.clear();
  x.reserve(d.size());
  y.reserve(d.size());
  for (const auto& r : d.rows()) {
    x.push_back({r.rsrp, r.rsrq, r.snr});
    y.push_back(static_cast<int>(r.klass()));
  }
}

}  // namespace qshift::learn
