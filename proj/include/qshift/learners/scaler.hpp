#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qshift/types.hpp"

namespace qshift::learn {

/// Zero-mean / unit-variance standardization. Constant columns get scale 1 so
/// they map to zero instead of dividing by zero (the fixtures hold two of the
/// three channel metrics constant).
struct Scaler {
  std::vector<double> mean;
  std::vector<double> scale;

  static Scaler fit(const std::vector<std::vector<double>>& rows) {
    Scaler s;
    if (rows.empty()) return s;
    const std::size_t dim = rows[0].size();
    s.mean.assign(dim, 0.0);
    s.scale.assign(dim, 1.0);
    for (const auto& row : rows)
      for (std::size_t j = 0; j < dim; ++j) s.mean[j] += row[j];
    for (std::size_t j = 0; j < dim; ++j) s.mean[j] /= static_cast<double>(rows.size());
    std::vector<double> var(dim, 0.0);
    for (const auto& row : rows)
      for (std::size_t j = 0; j < dim; ++j) {
        double d = row[j] - s.mean[j];
        var[j] += d * d;
      }
    for (std::size_t j = 0; j < dim; ++j) {
      double sd = std::sqrt(var[j] / static_cast<double>(rows.size()));
      s.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
  }

  std::size_t dim() const { return mean.size(); }

  void transform_inplace(std::vector<double>& row) const {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - mean[j]) / scale[j];
  }

  std::vector<double> transform(const std::vector<double>& row) const {
    std::vector<double> out = row;
    transform_inplace(out);
    return out;
  }
};

}  // namespace qshift::learn
