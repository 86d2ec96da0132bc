#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qshift/errors.hpp"
#include "qshift/learners/model.hpp"
#include "qshift/learners/scaler.hpp"
#include "qshift/rng.hpp"
#include "qshift/types.hpp"

namespace qshift::learn {

struct MlpConfig {
  int hidden1 = 32;
  int hidden2 = 100;
  int epochs = 10000;
  double learning_rate = 1e-4;
};

/// Fully-connected 3 -> hidden1 -> hidden2 -> 1 network with ReLU activations
/// and a single output logit. The loss is binary cross-entropy computed from
/// the logit in log-sum-exp form; no sigmoid appears in the loss path.
struct MlpNetwork {
  Eigen::MatrixXd w1, w2;   // (h1 x in), (h2 x h1)
  Eigen::VectorXd b1, b2;   // (h1), (h2)
  Eigen::RowVectorXd w3;    // (1 x h2)
  double b3 = 0.0;

  /// PyTorch-style init: every weight and bias of a layer is uniform in
  /// (-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static MlpNetwork init(int inputs, int h1, int h2, Rng& rng) {
    MlpNetwork net;
    net.w1.resize(h1, inputs);
    net.b1.resize(h1);
    net.w2.resize(h2, h1);
    net.b2.resize(h2);
    net.w3.resize(h2);
    auto fill = [&rng](auto& m, double bound) {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-bound, bound);
    };
    const double k1 = 1.0 / std::sqrt(static_cast<double>(inputs));
    const double k2 = 1.0 / std::sqrt(static_cast<double>(h1));
    const double k3 = 1.0 / std::sqrt(static_cast<double>(h2));
    fill(net.w1, k1);
    fill(net.b1, k1);
    fill(net.w2, k2);
    fill(net.b2, k2);
    fill(net.w3, k3);
    net.b3 = rng.uniform(-k3, k3);
    return net;
  }

  /// One logit per row of x (rows are samples).
  Eigen::VectorXd logits(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd a1 = (x * w1.transpose()).rowwise() + b1.transpose();
    a1 = a1.cwiseMax(0.0);
    Eigen::MatrixXd a2 = (a1 * w2.transpose()).rowwise() + b2.transpose();
    a2 = a2.cwiseMax(0.0);
    return (a2 * w3.transpose()).array() + b3;
  }

  /// Mean BCE-with-logits: max(z,0) - z*y + log(1 + exp(-|z|)).
  double loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd z = logits(x);
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      total += std::max(z[i], 0.0) - z[i] * y[i] + std::log1p(std::exp(-std::abs(z[i])));
    return total / static_cast<double>(z.size());
  }

  struct Gradients {
    Eigen::MatrixXd w1, w2;
    Eigen::VectorXd b1, b2;
    Eigen::RowVectorXd w3;
    double b3 = 0.0;
  };

  Gradients gradients(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const {
    const double n = static_cast<double>(x.rows());
    Eigen::MatrixXd pre1 = (x * w1.transpose()).rowwise() + b1.transpose();
    Eigen::MatrixXd act1 = pre1.cwiseMax(0.0);
    Eigen::MatrixXd pre2 = (act1 * w2.transpose()).rowwise() + b2.transpose();
    Eigen::MatrixXd act2 = pre2.cwiseMax(0.0);
    Eigen::VectorXd z = (act2 * w3.transpose()).array() + b3;

    Eigen::VectorXd dz(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) dz[i] = (sigmoid(z[i]) - y[i]) / n;

    Gradients g;
    g.w3 = dz.transpose() * act2;
    g.b3 = dz.sum();
    Eigen::MatrixXd d2 = (dz * w3).cwiseProduct((pre2.array() > 0.0).cast<double>().matrix());
    g.w2 = d2.transpose() * act1;
    g.b2 = d2.colwise().sum().transpose();
    Eigen::MatrixXd d1 = (d2 * w2).cwiseProduct((pre1.array() > 0.0).cast<double>().matrix());
    g.w1 = d1.transpose() * x;
    g.b1 = d1.colwise().sum().transpose();
    return g;
  }
};

class MlpModel : public Model {
 public:
  MlpModel(Scaler scaler, MlpNetwork net, MlpConfig config, std::uint64_t seed)
      : Model(seed), scaler_(std::move(scaler)), net_(std::move(net)), config_(config) {}

  ModelKind kind() const override { return ModelKind::Mlp; }
  const Scaler& scaler() const { return scaler_; }
  const MlpNetwork& network() const { return net_; }
  const MlpConfig& config() const { return config_; }

 protected:
  double proba_impl(const FeatureVector& x) const override {
    std::vector<double> row{x.rsrp, x.rsrq, x.snr};
    scaler_.transform_inplace(row);
    Eigen::MatrixXd m(1, 3);
    m << row[0], row[1], row[2];
    return sigmoid(net_.logits(m)[0]);
  }

 private:
  Scaler scaler_;
  MlpNetwork net_;
  MlpConfig config_;
};

/// Full-batch Adam on standardized features for the configured epoch count.
inline std::shared_ptr<const MlpModel> fit_mlp(const Dataset& d, const MlpConfig& config = {},
                                               std::uint64_t seed = 0) {
  if (!d.has_both_classes()) throw DomainError("mlp needs both classes in the training data");
  if (config.hidden1 < 1 || config.hidden2 < 1) throw DomainError("mlp hidden widths must be >= 1");

  std::vector<std::vector<double>> rows;
  rows.reserve(d.size());
  for (const auto& r : d.rows()) rows.push_back({r.rsrp, r.rsrq, r.snr});
  Scaler scaler = Scaler::fit(rows);

  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = scaler.transform(rows[static_cast<std::size_t>(i)]);
    x(i, 0) = row[0];
    x(i, 1) = row[1];
    x(i, 2) = row[2];
    y[i] = static_cast<double>(d.rows()[static_cast<std::size_t>(i)].klass());
  }

  Rng rng(derive_seed(seed, 0x3141));
  MlpNetwork net = MlpNetwork::init(3, config.hidden1, config.hidden2, rng);

  // Adam state, one (m, v) pair per parameter block.
  Eigen::MatrixXd m_w1 = 0.0 * net.w1, v_w1 = m_w1, m_w2 = 0.0 * net.w2, v_w2 = m_w2;
  Eigen::VectorXd m_b1 = 0.0 * net.b1, v_b1 = m_b1, m_b2 = 0.0 * net.b2, v_b2 = m_b2;
  Eigen::RowVectorXd m_w3 = 0.0 * net.w3, v_w3 = m_w3;
  double m_b3 = 0.0, v_b3 = 0.0;

  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double beta1_pow = 1.0, beta2_pow = 1.0;
  auto adam_step = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    p.array() -= config.learning_rate * (m.array() / (1.0 - beta1_pow)) /
                 ((v.array() / (1.0 - beta2_pow)).sqrt() + eps);
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    auto g = net.gradients(x, y);
    beta1_pow *= beta1;
    beta2_pow *= beta2;
    adam_step(net.w1, m_w1, v_w1, g.w1);
    adam_step(net.b1, m_b1, v_b1, g.b1);
    adam_step(net.w2, m_w2, v_w2, g.w2);
    adam_step(net.b2, m_b2, v_b2, g.b2);
    adam_step(net.w3, m_w3, v_w3, g.w3);
    m_b3 = beta1 * m_b3 + (1.0 - beta1) * g.b3;
    v_b3 = beta2 * v_b3 + (1.0 - beta2) * g.b3 * g.b3;
    net.b3 -= config.learning_rate * (m_b3 / (1.0 - beta1_pow)) /
              (std::sqrt(v_b3 / (1.0 - beta2_pow)) + eps);
  }
  return std::make_shared<MlpModel>(std::move(scaler), std::move(net), config, seed);
}

}  // namespace qshift::learn
