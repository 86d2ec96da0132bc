#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "qshift/errors.hpp"
#include "qshift/types.hpp"

namespace qshift::stats {

/// 1-based ranks with ties resolved to the arithmetic mean of the ranks they
/// span, so the rank sum is always n(n+1)/2.
inline std::vector<double> rank_with_ties(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("rank_with_ties: empty input");
  for (double v : values)
    if (std::isnan(v)) throw std::invalid_argument("rank_with_ties: NaN in input");

  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the average of ranks i+1..j+1
    double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace detail {

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DomainError("correlation undefined: one variable has zero rank variance");
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace detail

/// Spearman's rho: Pearson correlation of the tie-averaged ranks.
inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman_rho: length mismatch");
  if (x.size() < 3) throw DomainError("spearman_rho: need at least 3 observations");
  auto rx = rank_with_ties(x);
  auto ry = rank_with_ties(y);
  return detail::pearson(rx, ry);
}

/// Two-sided p-value of Student's t with the given degrees of freedom,
/// computed through the regularized incomplete beta function.
inline double student_t_two_sided_p(double t, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("student_t_two_sided_p: dof must be positive");
  if (std::isinf(t)) return 0.0;
  double x = dof / (dof + t * t);
  return boost::math::ibeta(dof / 2.0, 0.5, x);
}

struct CorrelationResult {
  std::string metric;
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool degenerate = false;  // |rho| == 1, t statistic undefined, p pinned to 0
};

/// Values below this print as "below 2.2e-16"; the exact value is kept.
inline constexpr double kPValueFloor = 2.2e-16;

inline std::string format_p_value(double p) {
  if (p < kPValueFloor) return "below 2.2e-16";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.7g", p);
  return std::string(buf);
}

/// Spearman test: rho plus a two-sided p-value from the t approximation
/// t = rho * sqrt((n-2) / (1-rho^2)) with n-2 degrees of freedom.
inline CorrelationResult spearman_test(std::span<const double> x, std::span<const double> y) {
  CorrelationResult result;
  result.n = x.size();
  result.rho = spearman_rho(x, y);
  const double n = static_cast<double>(result.n);
  if (std::abs(result.rho) >= 1.0) {
    result.p_value = 0.0;
    result.degenerate = true;
    return result;
  }
  double t = result.rho * std::sqrt((n - 2.0) / (1.0 - result.rho * result.rho));
  result.p_value = student_t_two_sided_p(t, n - 2.0);
  return result;
}

/// Each channel metric against the ordinal resolution code (1..8). Needs at
/// least two distinct resolutions, otherwise the rank variance is zero.
inline std::array<CorrelationResult, 3> correlate_dataset(const Dataset& dataset) {
  if (dataset.size() < 3) throw DomainError("correlation needs at least 3 rows");
  if (dataset.distinct_resolutions() < 2)
    throw DomainError("correlation undefined: dataset has a single resolution");

  const std::size_t n = dataset.size();
  std::vector<double> ordinal(n);
  std::array<std::vector<double>, 3> features;
  for (auto& f : features) f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = dataset.rows()[i];
    ordinal[i] = static_cast<double>(r.resolution.ordinal());
    features[0][i] = r.rsrp;
    features[1][i] = r.rsrq;
    features[2][i] = r.snr;
  }

  std::array<CorrelationResult, 3> results;
  for (int f = 0; f < 3; ++f) {
    results[f] = spearman_test(features[f], ordinal);
    results[f].metric = std::string(kFeatureNames[f]);
  }
  return results;
}

}  // namespace qshift::stats
