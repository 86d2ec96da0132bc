#pragma once

#include <algorithm>
#include <string_view>
#include <vector>

#include "qshift/rng.hpp"
#include "qshift/types.hpp"

namespace qshift::test {

inline LabeledRecord row(TimestampMs ts, double rsrp, double rsrq, double snr,
                         std::string_view quality) {
  auto res = Resolution::from_label(quality);
  return LabeledRecord{ts, rsrp, rsrq, snr, *res};
}

/// Linearly separable on snr: Low below the gap, High above it.
inline Dataset make_dsep() {
  std::vector<LabeledRecord> rows;
  const double snrs[] = {0, 1, 2, 3, 10, 11, 12, 13};
  for (int i = 0; i < 8; ++i)
    rows.push_back(row(i * 1000, -100.0, -12.0, snrs[i], snrs[i] < 10 ? "480p" : "720p"));
  return Dataset(std::move(rows), Provenance{{"d_sep"}, 500});
}

inline Dataset make_dconst() {
  std::vector<LabeledRecord> rows;
  for (int i = 0; i < 8; ++i)
    rows.push_back(row(i * 1000, -100.0 + i, -12.0, 5.0 + i, "1080p"));
  return Dataset(std::move(rows), Provenance{{"d_const"}, 500});
}

/// High iff (rsrp > -100) XOR (snr > 5) is false: needs two split levels.
inline Dataset make_ddiag() {
  std::vector<LabeledRecord> rows;
  const double rsrps[] = {-110, -90};
  const double snrs[] = {0, 10};
  TimestampMs ts = 0;
  for (int rep = 0; rep < 2; ++rep) {
    for (double rsrp : rsrps) {
      for (double snr : snrs) {
        bool xor_true = (rsrp > -100.0) != (snr > 5.0);
        rows.push_back(row(ts, rsrp + rep, -12.0, snr + rep * 0.1, xor_true ? "360p" : "1080p"));
        ts += 1000;
      }
    }
  }
  return Dataset(std::move(rows), Provenance{{"d_diag"}, 500});
}

/// 70:30 Low:High with monotone feature-class dependence: every channel
/// metric shifts upward for the High class.
inline Dataset make_synthetic(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledRecord> rows;
  rows.reserve(n);
  const std::size_t high_count = (n * 3) / 10;
  for (std::size_t i = 0; i < n; ++i) {
    const bool high = i < high_count;
    double shift = high ? 1.0 : 0.0;
    double rsrp = -110.0 + 7.0 * shift + 3.0 * rng.normal();
    double rsrq = -15.0 + 2.5 * shift + 1.5 * rng.normal();
    double snr = 4.0 + 5.0 * shift + 2.0 * rng.normal();
    rsrp = std::clamp(rsrp, kRsrpMin, kRsrpMax);
    rsrq = std::clamp(rsrq, kRsrqMin, kRsrqMax);
    snr = std::clamp(snr, kSnrMin, kSnrMax);
    rows.push_back(row(static_cast<TimestampMs>(i) * 1000, rsrp, rsrq, snr,
                       high ? "1080p" : "360p"));
  }
  return Dataset(std::move(rows), Provenance{{"synthetic"}, 500});
}

}  // namespace qshift::test
