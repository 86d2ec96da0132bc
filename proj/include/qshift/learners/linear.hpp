#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "qshift/errors.hpp"
#include "qshift/learners/model.hpp"
#include "qshift/learners/scaler.hpp"
#include "qshift/rng.hpp"
#include "qshift/types.hpp"

namespace qshift::learn {

namespace linear_detail {

// log(1 + exp(t)) without overflow
inline double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

inline std::vector<std::vector<double>> dataset_features(const Dataset& d) {
  std::vector<std::vector<double>> x;
  x.reserve(d.size());
  for (const auto& r : d.rows()) x.push_back({r.rsrp, r.rsrq, r.snr});
  return x;
}

inline std::vector<int> dataset_labels(const Dataset& d) {
  std::vector<int> y;
  y.reserve(d.size());
  for (const auto& r : d.rows()) y.push_back(static_cast<int>(r.klass()));
  return y;
}

}  // namespace linear_detail

/// Dimension-generic L2-regularized logistic regression core, reused by the
/// 3-feature classifier and by the stacking meta-model. The intercept is not
/// regularized. Fitting is full-batch gradient descent with Armijo
/// backtracking; convergence means gradient norm below tol.
struct LogRegCore {
  std::vector<double> weights;
  double intercept = 0.0;
  bool converged = false;
  int iterations = 0;

  double decision(const std::vector<double>& x) const {
    double z = intercept;
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
    return z;
  }

  static double objective(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                          const std::vector<double>& w, double b, double lambda) {
    const std::size_t n = x.size();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[i][j];
      double s = y[i] == 1 ? 1.0 : -1.0;
      loss += linear_detail::softplus(-s * z);
    }
    loss /= static_cast<double>(n);
    double reg = 0.0;
    for (double wj : w) reg += wj * wj;
    return loss + 0.5 * lambda * reg;
  }

  static void gradient(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                       const std::vector<double>& w, double b, double lambda,
                       std::vector<double>& grad_w, double& grad_b) {
    const std::size_t n = x.size();
    grad_w.assign(w.size(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[i][j];
      double err = sigmoid(z) - static_cast<double>(y[i]);
      for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] += err * x[i][j];
      grad_b += err;
    }
    for (std::size_t j = 0; j < w.size(); ++j)
      grad_w[j] = grad_w[j] / static_cast<double>(n) + lambda * w[j];
    grad_b /= static_cast<double>(n);
  }

  static LogRegCore fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                        double lambda, int max_iter, double tol) {
    const std::size_t dim = x.empty() ? 0 : x[0].size();
    LogRegCore core;
    core.weights.assign(dim, 0.0);

    std::vector<double> grad_w(dim, 0.0);
    double grad_b = 0.0;
    double current = objective(x, y, core.weights, core.intercept, lambda);
    std::vector<double> trial_w(dim, 0.0);

    for (int iter = 0; iter < max_iter; ++iter) {
      core.iterations = iter + 1;
      gradient(x, y, core.weights, core.intercept, lambda, grad_w, grad_b);
      double norm_sq = grad_b * grad_b;
      for (double g : grad_w) norm_sq += g * g;
      if (std::sqrt(norm_sq) < tol) {
        core.converged = true;
        break;
      }
      // Armijo backtracking from a unit step.
      double step = 1.0;
      const double slope = 1e-4 * norm_sq;
      while (step > 1e-14) {
        for (std::size_t j = 0; j < dim; ++j) trial_w[j] = core.weights[j] - step * grad_w[j];
        double trial_b = core.intercept - step * grad_b;
        double trial = objective(x, y, trial_w, trial_b, lambda);
        if (trial <= current - step * slope) {
          core.weights = trial_w;
          core.intercept = trial_b;
          current = trial;
          break;
        }
        step *= 0.5;
      }
      if (step <= 1e-14) break;  // no descent step found; gradient is numerically flat
    }
    return core;
  }
};

struct LrConfig {
  double c = 1.0;  // lambda = 1 / (n * c)
  int max_iter = 1000;
  double tol = 1e-6;
};

class LogisticRegressionModel : public Model {
 public:
  LogisticRegressionModel(Scaler scaler, LogRegCore core, LrConfig config, std::uint64_t seed)
      : Model(seed), scaler_(std::move(scaler)), core_(std::move(core)), config_(config) {}

  ModelKind kind() const override { return ModelKind::LogisticRegression; }
  const Scaler& scaler() const { return scaler_; }
  const LogRegCore& core() const { return core_; }
  const LrConfig& config() const { return config_; }

 protected:
  double proba_impl(const FeatureVector& x) const override {
    std::vector<double> row{x.rsrp, x.rsrq, x.snr};
    scaler_.transform_inplace(row);
    return sigmoid(core_.decision(row));
  }

 private:
  Scaler scaler_;
  LogRegCore core_;
  LrConfig config_;
};

inline std::shared_ptr<const LogisticRegressionModel> fit_logistic_regression(
    const Dataset& d, const LrConfig& config = {}, std::uint64_t seed = 0) {
  if (!d.has_both_classes())
    throw DomainError("logistic regression needs both classes in the training data");
  auto x = linear_detail::dataset_features(d);
  auto y = linear_detail::dataset_labels(d);
  Scaler scaler = Scaler::fit(x);
  for (auto& row : x) scaler.transform_inplace(row);
  const double lambda = 1.0 / (static_cast<double>(d.size()) * config.c);
  LogRegCore core = LogRegCore::fit(x, y, lambda, config.max_iter, config.tol);
  return std::make_shared<LogisticRegressionModel>(std::move(scaler), std::move(core), config,
                                                   seed);
}

struct SvmConfig {
  double lambda = 1e-4;
  int epochs = 200;
};

/// Linear maximum-margin classifier. The decision is the sign of the margin;
/// sigmoid(margin) serves as a pseudo-probability so the model can join
/// soft-voting and stacking ensembles.
class LinearSvmModel : public Model {
 public:
  LinearSvmModel(Scaler scaler, std::vector<double> weights, double bias, SvmConfig config,
                 std::uint64_t seed)
      : Model(seed),
        scaler_(std::move(scaler)),
        weights_(std::move(weights)),
        bias_(bias),
        config_(config) {}

  ModelKind kind() const override { return ModelKind::LinearSvm; }
  const Scaler& scaler() const { return scaler_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  const SvmConfig& config() const { return config_; }

  double margin(const FeatureVector& x) const {
    std::vector<double> row{x.rsrp, x.rsrq, x.snr};
    scaler_.transform_inplace(row);
    double m = bias_;
    for (std::size_t j = 0; j < weights_.size(); ++j) m += weights_[j] * row[j];
    return m;
  }

 protected:
  double proba_impl(const FeatureVector& x) const override { return sigmoid(margin(x)); }

 private:
  Scaler scaler_;
  std::vector<double> weights_;
  double bias_;
  SvmConfig config_;
};

/// Pegasos-style stochastic subgradient descent on the L2-regularized hinge
/// loss. The bias rides along as an extra always-one feature. The returned
/// weights are the average over the second half of the updates, which is far
/// steadier than the last iterate at small lambda.
inline std::shared_ptr<const LinearSvmModel> fit_linear_svm(const Dataset& d,
                                                            const SvmConfig& config = {},
                                                            std::uint64_t seed = 0) {
  if (!d.has_both_classes()) throw DomainError("linear svm needs both classes in the training data");
  auto x = linear_detail::dataset_features(d);
  auto y = linear_detail::dataset_labels(d);
  Scaler scaler = Scaler::fit(x);
  for (auto& row : x) {
    scaler.transform_inplace(row);
    row.push_back(1.0);  // bias feature
  }
  const std::size_t n = x.size();
  const std::size_t dim = x[0].size();

  std::vector<double> w(dim, 0.0);
  std::vector<double> w_avg(dim, 0.0);
  std::size_t averaged = 0;
  const std::size_t total_steps = static_cast<std::size_t>(config.epochs) * n;
  const std::size_t tail_start = total_steps / 2;

  Rng rng(derive_seed(seed, 0x5faf));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (config.lambda * static_cast<double>(t));
      const double s = y[i] == 1 ? 1.0 : -1.0;
      double margin = 0.0;
      for (std::size_t j = 0; j < dim; ++j) margin += w[j] * x[i][j];
      const double decay = 1.0 - 1.0 / static_cast<double>(t);
      for (auto& wj : w) wj *= decay;
      if (s * margin < 1.0) {
        for (std::size_t j = 0; j < dim; ++j) w[j] += eta * s * x[i][j];
      }
      if (t > tail_start) {
        for (std::size_t j = 0; j < dim; ++j) w_avg[j] += w[j];
        ++averaged;
      }
    }
  }
  if (averaged > 0)
    for (auto& wj : w_avg) wj /= static_cast<double>(averaged);
  else
    w_avg = w;

  double bias = w_avg.back();
  w_avg.pop_back();
  return std::make_shared<LinearSvmModel>(std::move(scaler), std::move(w_avg), bias, config, seed);
}

}  // namespace qshift::learn
