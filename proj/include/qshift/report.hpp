#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qshift/eval.hpp"
#include "qshift/ingest.hpp"
#include "qshift/stats.hpp"
#include "qshift/types.hpp"

namespace qshift::report {

using ordered_json = nlohmann::ordered_json;

enum class Averaging { Weighted, Macro };

inline std::string_view averaging_name(Averaging a) {
  return a == Averaging::Weighted ? "weighted" : "macro";
}

/// Human-facing classifier names used in rendered tables.
inline std::string display_name(std::string_view kind) {
  if (kind == "decision_tree") return "Decision Tree";
  if (kind == "random_forest") return "Random Forest";
  if (kind == "logistic_regression") return "Logistic Regression";
  if (kind == "linear_svm") return "Linear SVM";
  if (kind == "gradient_boosting") return "Gradient Boosting";
  if (kind == "stacking") return "Stacking";
  if (kind == "soft_voting") return "Voting (soft)";
  if (kind == "mlp") return "MLP";
  return std::string(kind);
}

namespace detail {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return std::string(buf);
}

inline std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.7g", v);
  return std::string(buf);
}

}  // namespace detail

// --- correlation output -----------------------------------------------------

inline std::string correlation_markdown(const std::array<stats::CorrelationResult, 3>& results) {
  std::string out;
  out += "| Variables | Correlation coefficient | p-value |\n";
  out += "| --- | --- | --- |\n";
  for (const auto& r : results) {
    std::string metric = r.metric;
    for (auto& c : metric) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    out += "| " + metric + " and Resolution | " + detail::general(r.rho) + " | " +
           stats::format_p_value(r.p_value) + " |\n";
  }
  return out;
}

inline std::string correlation_csv(const std::array<stats::CorrelationResult, 3>& results) {
  std::string out = "metric,rho,p_value,p_display,n\n";
  for (const auto& r : results)
    out += r.metric + "," + detail::general(r.rho) + "," + detail::general(r.p_value) + ",\"" +
           stats::format_p_value(r.p_value) + "\"," + std::to_string(r.n) + "\n";
  return out;
}

inline ordered_json correlation_json(const std::array<stats::CorrelationResult, 3>& results) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    arr.push_back(ordered_json{{"metric", r.metric},
                               {"rho", r.rho},
                               {"p_value", r.p_value},
                               {"p_display", stats::format_p_value(r.p_value)},
                               {"n", r.n},
                               {"degenerate", r.degenerate}});
  }
  return arr;
}

// --- evaluation output ------------------------------------------------------

inline ordered_json metrics_json(const eval::EvalMetrics& m) {
  return ordered_json{{"accuracy", m.accuracy},
                      {"precision_high", m.precision_high},
                      {"recall_high", m.recall_high},
                      {"f1_high", m.f1_high},
                      {"precision_low", m.precision_low},
                      {"recall_low", m.recall_low},
                      {"f1_low", m.f1_low},
                      {"precision_macro", m.precision_macro},
                      {"recall_macro", m.recall_macro},
                      {"f1_macro", m.f1_macro},
                      {"precision_weighted", m.precision_weighted},
                      {"recall_weighted", m.recall_weighted},
                      {"f1_weighted", m.f1_weighted},
                      {"undefined_as_zero", m.undefined_as_zero}};
}

inline ordered_json confusion_json(const eval::ConfusionMatrix& cm) {
  auto pct = cm.row_percent();
  return ordered_json{{"tp", cm.tp},
                      {"fn", cm.fn},
                      {"fp", cm.fp},
                      {"tn", cm.tn},
                      {"row_percent", ordered_json::array({ordered_json::array({pct[0][0], pct[0][1]}),
                                                           ordered_json::array({pct[1][0], pct[1][1]})})}};
}

inline ordered_json eval_report_json(const eval::EvalReport& report) {
  ordered_json folds = ordered_json::array();
  for (const auto& f : report.folds)
    folds.push_back(ordered_json{{"fold", f.fold},
                                 {"confusion", confusion_json(f.cm)},
                                 {"metrics", metrics_json(f.metrics)}});
  ordered_json j{{"classifier", report.classifier},
                 {"seed", report.seed},
                 {"k", report.k},
                 {"n", report.n},
                 {"class_counts", ordered_json{{"low", report.class_counts[0]},
                                               {"high", report.class_counts[1]}}},
                 {"provenance", ordered_json{{"sources", report.provenance.sources},
                                             {"tolerance_ms", report.provenance.tolerance_ms}}},
                 {"folds", std::move(folds)},
                 {"mean", metrics_json(report.mean)}};
  if (report.holdout) {
    j["holdout"] = ordered_json{{"test_fraction", report.holdout->test_fraction},
                                {"confusion", confusion_json(report.holdout->cm)},
                                {"metrics", metrics_json(report.holdout->metrics)}};
  } else {
    j["holdout"] = nullptr;
  }
  return j;
}

inline eval::EvalReport eval_report_from_json(const ordered_json& j);

/// One table row per report, columns in the classic Accuracy / Precision /
/// Recall / F-score order at two decimals.
inline std::string eval_table_markdown(const std::vector<eval::EvalReport>& reports,
                                       Averaging averaging) {
  std::string out;
  out += "| Classifiers | Accuracy | Precision | Recall | F-score |\n";
  out += "| --- | --- | --- | --- | --- |\n";
  for (const auto& r : reports) {
    const auto& m = r.mean;
    const bool w = averaging == Averaging::Weighted;
    out += "| " + display_name(r.classifier) + " | " + detail::fixed(m.accuracy, 2) + " | " +
           detail::fixed(w ? m.precision_weighted : m.precision_macro, 2) + " | " +
           detail::fixed(w ? m.recall_weighted : m.recall_macro, 2) + " | " +
           detail::fixed(w ? m.f1_weighted : m.f1_macro, 2) + " |\n";
  }
  return out;
}

inline std::string eval_table_csv(const std::vector<eval::EvalReport>& reports,
                                  Averaging averaging) {
  std::string out = "classifier,accuracy,precision,recall,f_score,averaging\n";
  for (const auto& r : reports) {
    const auto& m = r.mean;
    const bool w = averaging == Averaging::Weighted;
    out += r.classifier + "," + detail::fixed(m.accuracy, 4) + "," +
           detail::fixed(w ? m.precision_weighted : m.precision_macro, 4) + "," +
           detail::fixed(w ? m.recall_weighted : m.recall_macro, 4) + "," +
           detail::fixed(w ? m.f1_weighted : m.f1_macro, 4) + "," +
           std::string(averaging_name(averaging)) + "\n";
  }
  return out;
}

/// Confusion matrix as CSV: counts plus row-normalized percentages.
inline std::string confusion_csv(const eval::ConfusionMatrix& cm) {
  auto pct = cm.row_percent();
  std::string out = "actual,predicted_high,predicted_low,pct_predicted_high,pct_predicted_low\n";
  out += "High," + std::to_string(cm.tp) + "," + std::to_string(cm.fn) + "," +
         detail::fixed(pct[0][0], 2) + "," + detail::fixed(pct[0][1], 2) + "\n";
  out += "Low," + std::to_string(cm.fp) + "," + std::to_string(cm.tn) + "," +
         detail::fixed(pct[1][0], 2) + "," + detail::fixed(pct[1][1], 2) + "\n";
  return out;
}

/// Row-normalized 2x2 heatmap, percentages at two decimals, High first --
/// the usual confusion-matrix figure, as a self-contained SVG.
inline std::string confusion_svg(const eval::ConfusionMatrix& cm, const std::string& title) {
  auto pct = cm.row_percent();
  auto cell_color = [](double percent) {
    // white -> deep blue ramp
    double t = percent / 100.0;
    int r = static_cast<int>(247 + t * (8 - 247));
    int g = static_cast<int>(251 + t * (48 - 251));
    int b = static_cast<int>(255 + t * (107 - 255));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };
  auto text_color = [](double percent) { return percent > 55.0 ? "#ffffff" : "#1a1a1a"; };

  const int cell = 120, left = 110, top = 70;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(left + 2 * cell + 30) +
         "\" height=\"" + std::to_string(top + 2 * cell + 60) + "\" font-family=\"sans-serif\">\n";
  svg += "<text x=\"" + std::to_string(left + cell) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         title + "</text>\n";
  const char* col_labels[2] = {"High Res.", "Low Res."};
  const char* row_labels[2] = {"High Res.", "Low Res."};
  for (int c = 0; c < 2; ++c)
    svg += "<text x=\"" + std::to_string(left + c * cell + cell / 2) + "\" y=\"" +
           std::to_string(top - 12) + "\" text-anchor=\"middle\" font-size=\"13\">" +
           col_labels[c] + "</text>\n";
  for (int r = 0; r < 2; ++r)
    svg += "<text x=\"" + std::to_string(left - 10) + "\" y=\"" +
           std::to_string(top + r * cell + cell / 2 + 5) +
           "\" text-anchor=\"end\" font-size=\"13\">" + row_labels[r] + "</text>\n";
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      double value = pct[r][c];
      int x = left + c * cell, y = top + r * cell;
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" +
             cell_color(value) + "\" stroke=\"#ffffff\"/>\n";
      svg += "<text x=\"" + std::to_string(x + cell / 2) + "\" y=\"" +
             std::to_string(y + cell / 2 + 6) + "\" text-anchor=\"middle\" font-size=\"17\" fill=\"" +
             text_color(value) + "\">" + detail::fixed(value, 2) + "%</text>\n";
    }
  }
  svg += "<text x=\"" + std::to_string(left + cell) + "\" y=\"" +
         std::to_string(top + 2 * cell + 40) +
         "\" text-anchor=\"middle\" font-size=\"13\">Predicted class (rows: actual)</text>\n";
  svg += "</svg>\n";
  return svg;
}

// --- ingest report ----------------------------------------------------------

inline ordered_json parse_report_json(const ingest::ParseReport& r) {
  return ordered_json{{"rows_seen", r.rows_seen},
                      {"accepted", r.accepted},
                      {"rejected", r.rejected},
                      {"warnings", r.warnings}};
}

inline ordered_json ingest_report_json(const ingest::ParseReport& channel,
                                       const ingest::ParseReport& qoe, std::size_t aligned,
                                       std::size_t dropped, std::int64_t tolerance_ms) {
  return ordered_json{{"channel", parse_report_json(channel)},
                      {"qoe", parse_report_json(qoe)},
                      {"alignment", ordered_json{{"aligned", aligned},
                                                 {"dropped_no_match", dropped},
                                                 {"tolerance_ms", tolerance_ms}}}};
}

// --- report loading (for the `report` subcommand) ----------------------------

namespace detail {

inline eval::EvalMetrics metrics_from_json(const ordered_json& j) {
  eval::EvalMetrics m;
  m.accuracy = j.at("accuracy").get<double>();
  m.precision_high = j.at("precision_high").get<double>();
  m.recall_high = j.at("recall_high").get<double>();
  m.f1_high = j.at("f1_high").get<double>();
  m.precision_low = j.at("precision_low").get<double>();
  m.recall_low = j.at("recall_low").get<double>();
  m.f1_low = j.at("f1_low").get<double>();
  m.precision_macro = j.at("precision_macro").get<double>();
  m.recall_macro = j.at("recall_macro").get<double>();
  m.f1_macro = j.at("f1_macro").get<double>();
  m.precision_weighted = j.at("precision_weighted").get<double>();
  m.recall_weighted = j.at("recall_weighted").get<double>();
  m.f1_weighted = j.at("f1_weighted").get<double>();
  m.undefined_as_zero = j.at("undefined_as_zero").get<std::vector<std::string>>();
  return m;
}

inline eval::ConfusionMatrix confusion_from_json(const ordered_json& j) {
  eval::ConfusionMatrix cm;
  cm.tp = j.at("tp").get<std::int64_t>();
  cm.fn = j.at("fn").get<std::int64_t>();
  cm.fp = j.at("fp").get<std::int64_t>();
  cm.tn = j.at("tn").get<std::int64_t>();
  return cm;
}

}  // namespace detail

inline eval::EvalReport eval_report_from_json(const ordered_json& j) {
  try {
    eval::EvalReport report;
    report.classifier = j.at("classifier").get<std::string>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.k = j.at("k").get<std::size_t>();
    report.n = j.at("n").get<std::size_t>();
    report.class_counts[0] = j.at("class_counts").at("low").get<std::size_t>();
    report.class_counts[1] = j.at("class_counts").at("high").get<std::size_t>();
    report.provenance.sources = j.at("provenance").at("sources").get<std::vector<std::string>>();
    report.provenance.tolerance_ms = j.at("provenance").at("tolerance_ms").get<std::int64_t>();
    for (const auto& fj : j.at("folds")) {
      eval::FoldResult f;
      f.fold = fj.at("fold").get<std::size_t>();
      f.cm = detail::confusion_from_json(fj.at("confusion"));
      f.metrics = detail::metrics_from_json(fj.at("metrics"));
      report.folds.push_back(std::move(f));
    }
    report.mean = detail::metrics_from_json(j.at("mean"));
    if (!j.at("holdout").is_null()) {
      eval::HoldoutResult h;
      h.test_fraction = j.at("holdout").at("test_fraction").get<double>();
      h.cm = detail::confusion_from_json(j.at("holdout").at("confusion"));
      h.metrics = detail::metrics_from_json(j.at("holdout").at("metrics"));
      report.holdout = std::move(h);
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed evaluation report: ") + e.what());
  }
}

}  // namespace qshift::report
