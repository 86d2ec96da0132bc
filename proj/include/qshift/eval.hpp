#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qshift/errors.hpp"
#include "qshift/folds.hpp"
#include "qshift/learners/train.hpp"
#include "qshift/types.hpp"

namespace qshift::eval {

/// 2x2 counts with High as the positive class.
struct ConfusionMatrix {
  std::int64_t tp = 0, fn = 0, fp = 0, tn = 0;

  std::int64_t total() const { return tp + fn + fp + tn; }

  /// Row-normalized percentages, rows = actual class (High first), matching
  /// the usual confusion heatmap presentation. An absent class yields zeros.
  std::array<std::array<double, 2>, 2> row_percent() const {
    std::array<std::array<double, 2>, 2> out{{{0.0, 0.0}, {0.0, 0.0}}};
    if (tp + fn > 0) {
      out[0][0] = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
      out[0][1] = 100.0 * static_cast<double>(fn) / static_cast<double>(tp + fn);
    }
    if (fp + tn > 0) {
      out[1][0] = 100.0 * static_cast<double>(fp) / static_cast<double>(fp + tn);
      out[1][1] = 100.0 * static_cast<double>(tn) / static_cast<double>(fp + tn);
    }
    return out;
  }
};

inline ConfusionMatrix confusion_matrix(std::span<const BinaryClass> preds,
                                        std::span<const BinaryClass> labels) {
  if (preds.size() != labels.size())
    throw std::invalid_argument("confusion_matrix: length mismatch");
  if (preds.empty()) throw std::invalid_argument("confusion_matrix: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool actual_high = labels[i] == BinaryClass::High;
    const bool pred_high = preds[i] == BinaryClass::High;
    if (actual_high && pred_high) ++cm.tp;
    else if (actual_high && !pred_high) ++cm.fn;
    else if (!actual_high && pred_high) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

/// Accuracy plus per-class precision/recall/F1 and their macro (unweighted)
/// and weighted (support-weighted) averages. Zero-denominator cases are
/// reported as 0 and flagged.
struct EvalMetrics {
  double accuracy = 0.0;
  double precision_high = 0.0, recall_high = 0.0, f1_high = 0.0;
  double precision_low = 0.0, recall_low = 0.0, f1_low = 0.0;
  double precision_macro = 0.0, recall_macro = 0.0, f1_macro = 0.0;
  double precision_weighted = 0.0, recall_weighted = 0.0, f1_weighted = 0.0;
  std::vector<std::string> undefined_as_zero;
};

inline EvalMetrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() < 1) throw std::invalid_argument("metrics: empty confusion matrix");
  EvalMetrics m;
  const double n = static_cast<double>(cm.total());
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / n;

  auto ratio = [&m](std::int64_t num, std::int64_t den, const char* name) {
    if (den == 0) {
      m.undefined_as_zero.push_back(name);
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision_high = ratio(cm.tp, cm.tp + cm.fp, "precision_high");
  m.recall_high = ratio(cm.tp, cm.tp + cm.fn, "recall_high");
  m.precision_low = ratio(cm.tn, cm.tn + cm.fn, "precision_low");
  m.recall_low = ratio(cm.tn, cm.tn + cm.fp, "recall_low");
  auto f1 = [&m](double p, double r, const char* name) {
    if (p + r == 0.0) {
      m.undefined_as_zero.push_back(name);
      return 0.0;
    }
    return 2.0 * p * r / (p + r);
  };
  m.f1_high = f1(m.precision_high, m.recall_high, "f1_high");
  m.f1_low = f1(m.precision_low, m.recall_low, "f1_low");

  const double support_high = static_cast<double>(cm.tp + cm.fn);
  const double support_low = static_cast<double>(cm.fp + cm.tn);
  m.precision_macro = (m.precision_high + m.precision_low) / 2.0;
  m.recall_macro = (m.recall_high + m.recall_low) / 2.0;
  m.f1_macro = (m.f1_high + m.f1_low) / 2.0;
  m.precision_weighted = (m.precision_high * support_high + m.precision_low * support_low) / n;
  m.recall_weighted = (m.recall_high * support_high + m.recall_low * support_low) / n;
  m.f1_weighted = (m.f1_high * support_high + m.f1_low * support_low) / n;
  return m;
}

struct FoldResult {
  std::size_t fold = 0;
  ConfusionMatrix cm;
  EvalMetrics metrics;
};

struct HoldoutResult {
  double test_fraction = 0.2;
  ConfusionMatrix cm;
  EvalMetrics metrics;
};

struct EvalReport {
  std::string classifier;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::size_t n = 0;
  std::array<std::size_t, 2> class_counts{0, 0};
  Provenance provenance;
  std::vector<FoldResult> folds;
  EvalMetrics mean;  // arithmetic mean of the fold metrics
  std::optional<HoldoutResult> holdout;
};

namespace eval_detail {

inline EvalMetrics mean_metrics(const std::vector<FoldResult>& folds) {
  EvalMetrics mean;
  const double k = static_cast<double>(folds.size());
  auto add = [&](double EvalMetrics::* field) {
    double sum = 0.0;
    for (const auto& f : folds) sum += f.metrics.*field;
    mean.*field = sum / k;
  };
  add(&EvalMetrics::accuracy);
  add(&EvalMetrics::precision_high);
  add(&EvalMetrics::recall_high);
  add(&EvalMetrics::f1_high);
  add(&EvalMetrics::precision_low);
  add(&EvalMetrics::recall_low);
  add(&EvalMetrics::f1_low);
  add(&EvalMetrics::precision_macro);
  add(&EvalMetrics::recall_macro);
  add(&EvalMetrics::f1_macro);
  add(&EvalMetrics::precision_weighted);
  add(&EvalMetrics::recall_weighted);
  add(&EvalMetrics::f1_weighted);
  return mean;
}

}  // namespace eval_detail

/// Stratified k-fold cross-validation: fit on k-1 folds, score on the held
/// fold, report per-fold and mean metrics. Fit errors carry the fold index.
inline EvalReport cross_validate(learn::ModelKind kind, const Dataset& d, std::size_t k,
                                 const learn::TrainConfig& config) {
  EvalReport report;
  report.classifier = std::string(learn::kind_name(kind));
  report.seed = config.seed;
  report.k = k;
  report.n = d.size();
  report.class_counts = d.class_counts();
  report.provenance = d.provenance();

  auto folds = stratified_kfold(d, k, config.seed);
  for (std::size_t fold = 0; fold < folds.size(); ++fold) {
    std::vector<std::size_t> train_idx;
    for (std::size_t other = 0; other < folds.size(); ++other) {
      if (other == fold) continue;
      train_idx.insert(train_idx.end(), folds[other].begin(), folds[other].end());
    }
    std::sort(train_idx.begin(), train_idx.end());

    learn::ModelPtr model;
    try {
      learn::TrainConfig fold_config = config;
      fold_config.seed = derive_seed(config.seed, fold + 1);
      model = learn::fit_model(kind, d.subset(train_idx), fold_config);
    } catch (const DomainError& e) {
      throw DomainError("fold " + std::to_string(fold) + ": " + e.what());
    }

    std::vector<BinaryClass> preds, labels;
    preds.reserve(folds[fold].size());
    labels.reserve(folds[fold].size());
    for (std::size_t i : folds[fold]) {
      preds.push_back(model->predict(d.rows()[i].features()));
      labels.push_back(d.rows()[i].klass());
    }
    FoldResult fr;
    fr.fold = fold;
    fr.cm = confusion_matrix(preds, labels);
    fr.metrics = metrics(fr.cm);
    report.folds.push_back(std::move(fr));
  }
  report.mean = eval_detail::mean_metrics(report.folds);
  return report;
}

/// Stratified hold-out: fit on the training side, produce the test-side
/// confusion matrix. Kept disjoint from the cross-validation folds.
inline HoldoutResult holdout_eval(learn::ModelKind kind, const Dataset& d, double test_fraction,
                                  const learn::TrainConfig& config) {
  auto [train, test] = holdout_split(d, test_fraction, config.seed);
  learn::TrainConfig fit_config = config;
  fit_config.seed = derive_seed(config.seed, 0x801d);
  learn::ModelPtr model = learn::fit_model(kind, train, fit_config);

  std::vector<BinaryClass> preds, labels;
  preds.reserve(test.size());
  labels.reserve(test.size());
  for (const auto& row : test.rows()) {
    preds.push_back(model->predict(row.features()));
    labels.push_back(row.klass());
  }
  HoldoutResult result;
  result.test_fraction = test_fraction;
  result.cm = confusion_matrix(preds, labels);
  result.metrics = metrics(result.cm);
  return result;
}

}  // namespace qshift::eval
