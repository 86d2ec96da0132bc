// Acceptance runner. Prints one [PASS]/[FAIL]/[SKIP] line per criterion and
// exits nonzero if anything failed.
//
// The dataset replication block needs the public 5G QoE capture prepared as
// aligned dataset CSVs (see README: scripts/fetch_dataset.sh + qshift ingest)
// under $QSHIFT_DATA_DIR (default: <source>/data). Without those files it is
// skipped and the property suite below stands as the acceptance gate; the
// property suite always runs either way.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qshift/eval.hpp"
#include "qshift/folds.hpp"
#include "qshift/ingest.hpp"
#include "qshift/learners/train.hpp"
#include "qshift/persist.hpp"
#include "qshift/report.hpp"
#include "qshift/stats.hpp"
#include "qshift/stream.hpp"

#include "../fixtures.hpp"
#include "../oracles.hpp"

namespace fs = std::filesystem;
using namespace qshift;

namespace {

struct Checker {
  int failures = 0;

  void pass(const std::string& name, const std::string& detail) {
    std::cout << "[PASS] " << name << ": " << detail << "\n";
  }
  void fail(const std::string& name, const std::string& detail) {
    std::cout << "[FAIL] " << name << ": " << detail << "\n";
    ++failures;
  }
  void skip(const std::string& name, const std::string& reason) {
    std::cout << "[SKIP] " << name << ": " << reason << "\n";
  }
  void check(bool ok, const std::string& name, const std::string& detail) {
    if (ok)
      pass(name, detail);
    else
      fail(name, detail);
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double training_accuracy(const learn::Model& m, const Dataset& d) {
  std::size_t correct = 0;
  for (const auto& r : d.rows()) correct += m.predict(r.features()) == r.klass();
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

// --- criterion 1: dataset replication ---------------------------------------

struct TableRow {
  learn::ModelKind kind;
  double accuracy;
  double tolerance;
};

void replicate_spearman(Checker& c, const Dataset& d, const std::string& name,
                        const std::array<double, 3>& expected_rho, bool rsrp_p_is_finite,
                        double rsrp_p_expected) {
  auto results = stats::correlate_dataset(d);
  bool rho_ok = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    double diff = std::abs(results[i].rho - expected_rho[i]);
    detail += results[i].metric + " rho " + fmt(results[i].rho) + " (want " +
              fmt(expected_rho[i]) + " +-0.01) ";
    if (diff > 0.01) rho_ok = false;
  }
  c.check(rho_ok, "replication-spearman-" + name, detail);

  bool p_ok = true;
  std::string p_detail;
  for (int i = 0; i < 3; ++i) {
    if (i == 0 && rsrp_p_is_finite) {
      double ratio = results[i].p_value / rsrp_p_expected;
      p_detail += "rsrp p " + fmt(results[i].p_value) + " (want within x3 of " +
                  fmt(rsrp_p_expected) + ") ";
      if (!(ratio > 1.0 / 3.0 && ratio < 3.0)) p_ok = false;
    } else {
      p_detail += results[i].metric + " p " + stats::format_p_value(results[i].p_value) + " ";
      if (results[i].p_value >= stats::kPValueFloor) p_ok = false;
    }
  }
  c.check(p_ok, "replication-pvalues-" + name, p_detail);
}

void replicate_cv(Checker& c, const Dataset& d, const std::string& name,
                  const std::vector<TableRow>& rows) {
  learn::TrainConfig config;
  config.seed = 1;
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    auto report = eval::cross_validate(row.kind, d, 5, config);
    double acc = report.mean.accuracy;
    detail += std::string(learn::kind_name(row.kind)) + " " + fmt(acc) + " (want " +
              fmt(row.accuracy) + " +-" + fmt(row.tolerance) + ") ";
    if (std::abs(acc - row.accuracy) > row.tolerance) ok = false;
  }
  c.check(ok, "replication-cv-" + name, detail);
}

void replicate_confusion(Checker& c, const Dataset& indoor) {
  learn::TrainConfig config;
  config.seed = 1;
  auto holdout = eval::holdout_eval(learn::ModelKind::DecisionTree, indoor, 0.2, config);
  auto pct = holdout.cm.row_percent();
  const double want[2][2] = {{80.84, 19.16}, {26.78, 73.22}};
  bool ok = true;
  std::string detail;
  for (int r = 0; r < 2; ++r)
    for (int col = 0; col < 2; ++col) {
      detail += fmt(pct[r][col]) + "/" + fmt(want[r][col]) + " ";
      if (std::abs(pct[r][col] - want[r][col]) > 5.0) ok = false;
    }
  c.check(ok, "replication-confusion-indoor", "cells got/want: " + detail + "(+-5pp)");
}

void run_replication(Checker& c) {
  const char* env = std::getenv("QSHIFT_DATA_DIR");
  fs::path data_dir = env ? fs::path(env) : fs::path(QSHIFT_SOURCE_DIR) / "data";
  fs::path mobility_path = data_dir / "mobility_sa.csv";
  fs::path indoor_path = data_dir / "indoor_nsa.csv";

  const std::string how =
      "aligned dataset not found under " + data_dir.string() +
      " (fetch the public dataset and run qshift ingest; see README)";
  if (!fs::exists(mobility_path) || !fs::exists(indoor_path)) {
    c.skip("replication-spearman-mobility", how);
    c.skip("replication-pvalues-mobility", how);
    c.skip("replication-spearman-indoor", how);
    c.skip("replication-pvalues-indoor", how);
    c.skip("replication-cv-indoor", how);
    c.skip("replication-cv-mobility", how);
    c.skip("replication-confusion-indoor", how);
    return;
  }

  std::ifstream mob_in(mobility_path), ind_in(indoor_path);
  Dataset mobility = ingest::read_dataset_csv(mob_in, mobility_path.string());
  Dataset indoor = ingest::read_dataset_csv(ind_in, indoor_path.string());

  replicate_spearman(c, mobility, "mobility", {0.181342, 0.2649958, 0.2836258}, false, 0.0);
  replicate_spearman(c, indoor, "indoor", {0.06318236, 0.1616512, 0.260046}, true, 0.0006058);

  using MK = learn::ModelKind;
  replicate_cv(c, indoor, "indoor",
               {{MK::DecisionTree, 0.77, 0.03},
                {MK::RandomForest, 0.77, 0.03},
                {MK::LogisticRegression, 0.62, 0.03},
                {MK::LinearSvm, 0.60, 0.06},
                {MK::GradientBoosting, 0.76, 0.06},
                {MK::Stacking, 0.76, 0.06},
                {MK::Mlp, 0.68, 0.06}});
  replicate_cv(c, mobility, "mobility",
               {{MK::DecisionTree, 0.74, 0.03},
                {MK::RandomForest, 0.75, 0.03},
                {MK::LogisticRegression, 0.62, 0.03},
                {MK::SoftVoting, 0.77, 0.03},
                {MK::LinearSvm, 0.68, 0.06},
                {MK::GradientBoosting, 0.74, 0.06},
                {MK::Stacking, 0.75, 0.06},
                {MK::Mlp, 0.74, 0.06}});
  replicate_confusion(c, indoor);
}

// --- criterion 2: property suite ---------------------------------------------

void check_spearman_oracle(Checker& c) {
  Rng rng(20240809);
  double worst = 0.0;
  int compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 3 + rng.below(48);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::floor(rng.uniform(-8, 8)) / 2.0;
      y[i] = std::floor(rng.uniform(-8, 8)) / 2.0;
    }
    try {
      double ours = stats::spearman_rho(x, y);
      worst = std::max(worst, std::abs(ours - test::spearman_oracle(x, y)));
      ++compared;
    } catch (const DomainError&) {
      continue;  // zero-variance draw
    }
  }
  c.check(worst <= 1e-12 && compared > 900, "spearman-oracle",
          std::to_string(compared) + " random tied pairs, worst |diff| " + fmt(worst));

  double worst_inv = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 4 + rng.below(40);
    std::vector<double> x(n), y(n), tx(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::floor(rng.uniform(-6, 6));
      y[i] = rng.uniform(-3, 3);
      tx[i] = x[i] * x[i] * x[i] + 100.0;
    }
    try {
      worst_inv = std::max(worst_inv,
                           std::abs(stats::spearman_rho(x, y) - stats::spearman_rho(tx, y)));
    } catch (const DomainError&) {
      continue;
    }
  }
  c.check(worst_inv <= 1e-12, "spearman-monotone-invariance",
          "strictly increasing transform, worst |diff| " + fmt(worst_inv));
}

void check_pvalue_oracle(Checker& c) {
  Rng rng(7771);
  double worst = 0.0;
  std::string detail;
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> x(10), y(10);
    for (int i = 0; i < 10; ++i) {
      x[i] = std::floor(rng.uniform(0, 6));
      y[i] = 0.6 * x[i] + 3.0 * rng.uniform(-1, 1);
    }
    auto t_result = stats::spearman_test(x, y);
    double perm = test::permutation_p_value(x, y, 200000, derive_seed(42, trial));
    double diff = std::abs(t_result.p_value - perm);
    worst = std::max(worst, diff);
    detail += "t=" + fmt(t_result.p_value) + " perm=" + fmt(perm) + " ";
  }
  c.check(worst <= 0.02, "pvalue-permutation-oracle",
          "n=10, 200k shuffles: " + detail + "worst |diff| " + fmt(worst));
}

void check_gradients(Checker& c) {
  // logistic regression
  {
    Rng rng(88);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
      x.push_back({rng.normal(), rng.normal(), rng.normal()});
      y.push_back(static_cast<int>(rng.below(2)));
    }
    std::vector<double> w{0.4, -0.9, 0.3};
    double b = -0.2;
    const double lambda = 0.03, h = 1e-6;
    std::vector<double> grad_w;
    double grad_b;
    learn::LogRegCore::gradient(x, y, w, b, lambda, grad_w, grad_b);
    double worst = 0.0;
    for (std::size_t j = 0; j <= 3; ++j) {
      auto at = [&](double delta) {
        auto wp = w;
        double bp = b;
        if (j < 3)
          wp[j] += delta;
        else
          bp += delta;
        return learn::LogRegCore::objective(x, y, wp, bp, lambda);
      };
      double numeric = (at(h) - at(-h)) / (2 * h);
      double analytic = j < 3 ? grad_w[j] : grad_b;
      worst = std::max(worst, std::abs(analytic - numeric) /
                                  std::max({1e-8, std::abs(analytic), std::abs(numeric)}));
    }
    c.check(worst < 1e-5, "gradient-check-lr", "max relative error " + fmt(worst) + " (< 1e-5)");
  }
  // mlp, every parameter of the full 3->32->100->1 architecture
  {
    Rng rng(31);
    learn::MlpNetwork net = learn::MlpNetwork::init(3, 32, 100, rng);
    Eigen::MatrixXd x(4, 3);
    Eigen::VectorXd y(4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
      y[i] = static_cast<double>(i % 2);
    }
    auto g = net.gradients(x, y);
    const double h = 1e-6;
    double worst = 0.0;
    auto probe = [&](double& param, double analytic) {
      const double saved = param;
      param = saved + h;
      double up = net.loss(x, y);
      param = saved - h;
      double down = net.loss(x, y);
      param = saved;
      double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(analytic - numeric) /
                                  std::max({1e-8, std::abs(analytic), std::abs(numeric)}));
    };
    for (Eigen::Index i = 0; i < net.w1.rows(); ++i)
      for (Eigen::Index j = 0; j < net.w1.cols(); ++j) probe(net.w1(i, j), g.w1(i, j));
    for (Eigen::Index i = 0; i < net.b1.size(); ++i) probe(net.b1[i], g.b1[i]);
    for (Eigen::Index i = 0; i < net.w2.rows(); ++i)
      for (Eigen::Index j = 0; j < net.w2.cols(); ++j) probe(net.w2(i, j), g.w2(i, j));
    for (Eigen::Index i = 0; i < net.b2.size(); ++i) probe(net.b2[i], g.b2[i]);
    for (Eigen::Index i = 0; i < net.w3.size(); ++i) probe(net.w3[i], g.w3[i]);
    probe(net.b3, g.b3);
    c.check(worst < 1e-4, "gradient-check-mlp", "max relative error " + fmt(worst) + " (< 1e-4)");
  }
}

void check_learner_sanity(Checker& c) {
  auto d_sep = test::make_dsep();
  learn::TrainConfig config;
  config.seed = 42;

  bool sep_ok = true;
  std::string sep_detail;
  for (auto kind : learn::kAllModelKinds) {
    auto model = learn::fit_model(kind, d_sep, config);
    double acc = training_accuracy(*model, d_sep);
    sep_detail += std::string(learn::kind_name(kind)) + "=" + fmt(acc) + " ";
    if (acc != 1.0) sep_ok = false;
  }
  c.check(sep_ok, "learner-sanity-dsep", "training accuracy " + sep_detail);

  auto d_diag = test::make_ddiag();
  bool diag_ok = true;
  std::string diag_detail;
  for (auto kind : {learn::ModelKind::DecisionTree, learn::ModelKind::RandomForest,
                    learn::ModelKind::GradientBoosting}) {
    auto model = learn::fit_model(kind, d_diag, config);
    double acc = training_accuracy(*model, d_diag);
    diag_detail += std::string(learn::kind_name(kind)) + "=" + fmt(acc) + " ";
    if (acc != 1.0) diag_ok = false;
  }
  c.check(diag_ok, "learner-sanity-ddiag", "training accuracy " + diag_detail);

  auto synthetic = test::make_synthetic(2000, 20240809);
  auto counts = synthetic.class_counts();
  const double baseline =
      static_cast<double>(std::max(counts[0], counts[1])) / static_cast<double>(synthetic.size());
  bool synth_ok = true;
  std::string synth_detail = "majority baseline " + fmt(baseline) + "; ";
  for (auto kind : learn::kAllModelKinds) {
    auto model = learn::fit_model(kind, synthetic, config);
    double acc = training_accuracy(*model, synthetic);
    synth_detail += std::string(learn::kind_name(kind)) + "=" + fmt(acc) + " ";
    if (acc < baseline + 0.05) synth_ok = false;
  }
  c.check(synth_ok, "learner-sanity-synthetic",
          "2000 rows, 70:30 imbalance: " + synth_detail + "(all must beat baseline by 0.05)");
}

void check_rf_reduction(Checker& c) {
  learn::RfConfig cfg;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  cfg.features_per_split = 3;
  bool ok = true;
  for (const auto& d : {test::make_dsep(), test::make_ddiag(), test::make_synthetic(400, 5)}) {
    auto dt = learn::fit_decision_tree(d);
    auto rf = learn::fit_random_forest(d, cfg, 42);
    for (const auto& r : d.rows())
      if (rf->predict(r.features()) != dt->predict(r.features())) ok = false;
  }
  c.check(ok, "rf-reduction", "RF(1 tree, no bootstrap, all features) == DT on fixture grids");
}

void check_gbt_properties(Checker& c) {
  // zero rounds -> class prior
  std::vector<LabeledRecord> rows;
  for (int i = 0; i < 10; ++i)
    rows.push_back(test::row(i, -100 + i, -12, 3 + i, i < 7 ? "1080p" : "360p"));
  Dataset skew(rows, Provenance{});
  learn::GbtConfig zero;
  zero.rounds = 0;
  auto prior_model = learn::fit_gradient_boosting(skew, zero, 1);
  double proba = prior_model->predict_proba({-95, -11, 8});
  bool prior_ok = std::abs(proba - 0.7) <= 1e-12;
  c.check(prior_ok, "gbt-zero-rounds-prior",
          "rounds=0 on 70% High data predicts " + fmt(proba));

  auto d_sep = test::make_dsep();
  auto model = learn::fit_gradient_boosting(d_sep, {}, 1);
  const auto& trace = model->loss_trace();
  bool monotone = trace.size() == 101;
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1] + 1e-12) monotone = false;
  c.check(monotone, "gbt-loss-non-increasing",
          "100 rounds on D_SEP, loss " + fmt(trace.front()) + " -> " + fmt(trace.back()));
}

void check_fold_laws(Checker& c) {
  Rng rng(99);
  std::vector<LabeledRecord> rows;
  for (int i = 0; i < 83; ++i)
    rows.push_back(test::row(i, -100 + rng.uniform(-5, 5), -12, 5 + rng.uniform(-3, 3),
                             i % 3 == 0 ? "360p" : "1080p"));
  Dataset d(rows, Provenance{});
  auto counts = d.class_counts();

  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 44ULL}) {
    auto folds = stratified_kfold(d, 5, seed);
    std::vector<int> seen(d.size(), 0);
    for (const auto& fold : folds)
      for (auto i : fold) ++seen[i];
    for (int s : seen)
      if (s != 1) ok = false;  // exact partition
    for (const auto& fold : folds) {
      std::array<double, 2> fold_counts{0, 0};
      for (auto i : fold) ++fold_counts[static_cast<int>(d.rows()[i].klass())];
      for (int klass = 0; klass < 2; ++klass) {
        double share = static_cast<double>(counts[klass]) / 5.0;
        if (std::abs(fold_counts[klass] - share) > 1.0) ok = false;
      }
    }
  }
  detail = "partition exact, per-fold class counts within 1 of proportional share";

  bool error_ok = false;
  std::vector<LabeledRecord> skew_rows;
  for (int i = 0; i < 10; ++i) skew_rows.push_back(test::row(i, -100, -12, 5, i < 3 ? "360p" : "1080p"));
  try {
    stratified_kfold(Dataset(skew_rows, Provenance{}), 5, 1);
  } catch (const DomainError& e) {
    error_ok = std::string(e.what()).find("Low") != std::string::npos;
  }
  c.check(ok && error_ok, "fold-laws", detail + "; undersized class raises naming it");
}

void check_persistence(Checker& c) {
  auto d = test::make_synthetic(150, 31);
  learn::TrainConfig config;
  config.seed = 7;
  config.mlp.epochs = 300;  // model content, not training quality, is under test

  Rng rng(61);
  bool ok = true;
  std::string detail;
  for (auto kind : learn::kAllModelKinds) {
    auto model = learn::fit_model(kind, d, config);
    std::ostringstream first;
    persist::save_model(*model, first);
    std::istringstream in(first.str());
    auto loaded = persist::load_model(in);
    std::ostringstream second;
    persist::save_model(*loaded, second);
    if (first.str() != second.str()) {
      ok = false;
      detail += std::string(learn::kind_name(kind)) + ":bytes ";
    }
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      FeatureVector x{rng.uniform(kRsrpMin, kRsrpMax), rng.uniform(kRsrqMin, kRsrqMax),
                      rng.uniform(kSnrMin, kSnrMax)};
      worst = std::max(worst, std::abs(loaded->predict_proba(x) - model->predict_proba(x)));
    }
    if (worst > 1e-12) {
      ok = false;
      detail += std::string(learn::kind_name(kind)) + ":proba(" + fmt(worst) + ") ";
    }
  }
  c.check(ok, "persistence-round-trip",
          ok ? "8 kinds x 1000 random inputs, byte fixpoint + proba equality <= 1e-12"
             : "mismatches: " + detail);

  // corrupt files must be rejected, never partially loaded
  auto model = learn::fit_decision_tree(d);
  std::ostringstream buf;
  persist::save_model(*model, buf);
  bool rejected = true;
  try {
    auto doc = nlohmann::ordered_json::parse(buf.str());
    doc["format_version"] = 999;
    std::istringstream bad(doc.dump());
    persist::load_model(bad);
    rejected = false;
  } catch (const PersistError&) {
  }
  try {
    auto doc = nlohmann::ordered_json::parse(buf.str());
    doc["payload"]["nodes"][0][0] = 5;
    std::istringstream bad(doc.dump());
    persist::load_model(bad);
    rejected = false;
  } catch (const PersistError&) {
  }
  try {
    std::istringstream truncated(buf.str().substr(0, buf.str().size() / 3));
    persist::load_model(truncated);
    rejected = false;
  } catch (const PersistError&) {
  }
  c.check(rejected, "persistence-rejects-corrupt",
          "version mismatch, bad feature index and truncation all raise");
}

void check_determinism(Checker& c) {
  auto d = test::make_synthetic(300, 15);
  learn::TrainConfig config;
  config.seed = 42;
  config.mlp.epochs = 200;

  bool ok = true;
  std::string detail;
  for (auto kind : {learn::ModelKind::RandomForest, learn::ModelKind::LinearSvm,
                    learn::ModelKind::Stacking, learn::ModelKind::Mlp}) {
    std::ostringstream a, b;
    persist::save_model(*learn::fit_model(kind, d, config), a);
    persist::save_model(*learn::fit_model(kind, d, config), b);
    if (a.str() != b.str()) {
      ok = false;
      detail += std::string(learn::kind_name(kind)) + " ";
    }
  }

  auto report_a = eval::cross_validate(learn::ModelKind::RandomForest, d, 5, config);
  report_a.holdout = eval::holdout_eval(learn::ModelKind::RandomForest, d, 0.2, config);
  auto report_b = eval::cross_validate(learn::ModelKind::RandomForest, d, 5, config);
  report_b.holdout = eval::holdout_eval(learn::ModelKind::RandomForest, d, 0.2, config);
  std::string json_a = report::eval_report_json(report_a).dump(2);
  std::string json_b = report::eval_report_json(report_b).dump(2);
  if (json_a != json_b) {
    ok = false;
    detail += "eval-report ";
  }
  c.check(ok, "determinism",
          ok ? "fixed seed: byte-identical model files and JSON reports across two runs"
             : "differs for: " + detail);
}

// --- criterion 3: streaming performance --------------------------------------

void check_streaming(Checker& c) {
  auto d = test::make_synthetic(2000, 77);
  auto model = learn::fit_random_forest(d, {}, 42);  // 100 trees

  std::ostringstream input_builder;
  Rng rng(123);
  for (int i = 0; i < 10000; ++i) {
    char ts[40];
    std::snprintf(ts, sizeof(ts), "2024-03-01T%02d:%02d:%02d", 10 + i / 3600, (i / 60) % 60,
                  i % 60);
    input_builder << ts << "," << -110.0 + rng.uniform(0, 20) << "," << -15.0 + rng.uniform(0, 5)
                  << "," << rng.uniform(0, 15) << "\n";
  }
  std::istringstream in(input_builder.str());
  std::ostringstream sink;

  auto start = std::chrono::steady_clock::now();
  auto summary = stream::run_stream(*model, in, sink);
  auto stop = std::chrono::steady_clock::now();
  double seconds = std::chrono::duration<double>(stop - start).count();
  double throughput = static_cast<double>(summary.predictions) / seconds;

  bool ok = summary.predictions == 10000 && throughput >= 10000.0 &&
            summary.p99_latency_us < 1000.0;
  c.check(ok, "streaming-performance",
          "RF-100 over 10000 lines: " + fmt(throughput) + " predictions/s, p99 " +
              fmt(summary.p99_latency_us) + " us (need >= 10000/s, < 1000 us)");
}

}  // namespace

int main() {
  Checker c;
  std::cout << "== dataset replication ==\n";
  run_replication(c);
  std::cout << "== property suite ==\n";
  check_spearman_oracle(c);
  check_pvalue_oracle(c);
  check_gradients(c);
  check_learner_sanity(c);
  check_rf_reduction(c);
  check_gbt_properties(c);
  check_fold_laws(c);
  check_persistence(c);
  check_determinism(c);
  std::cout << "== streaming ==\n";
  check_streaming(c);

  if (c.failures > 0) {
    std::cout << c.failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed (or were skipped pending the dataset)\n";
  return 0;
}
