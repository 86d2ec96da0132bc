#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qshift/errors.hpp"

namespace qshift {

/// Milliseconds since 1970-01-01T00:00:00, timezone-naive.
using TimestampMs = std::int64_t;

enum class BinaryClass : int { Low = 0, High = 1 };

inline std::string_view class_name(BinaryClass c) {
  return c == BinaryClass::High ? "High" : "Low";
}

/// Playback resolution on the eight-step ordinal scale 144p (1) .. 2160p (8).
/// The binary split puts 144p..480p in Low and 720p..2160p in High.
class Resolution {
 public:
  static constexpr int kMinOrdinal = 1;
  static constexpr int kMaxOrdinal = 8;
  static constexpr int kLowestHighOrdinal = 5;  // 720p

  static std::optional<Resolution> from_ordinal(int ordinal) {
    if (ordinal < kMinOrdinal || ordinal > kMaxOrdinal) return std::nullopt;
    return Resolution(ordinal);
  }

  /// Accepts player-style labels ("hd2160", "large", "tiny", ...) and plain
  /// ones ("2160p"), case-insensitively. Unknown labels yield nullopt.
  static std::optional<Resolution> from_label(std::string_view label) {
    std::string key;
    key.reserve(label.size());
    for (char ch : label) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    for (int i = 0; i < 8; ++i) {
      if (key == kPlayerLabels[i] || key == kPlainLabels[i]) return Resolution(i + 1);
    }
    return std::nullopt;
  }

  int ordinal() const { return ordinal_; }
  int pixel_height() const { return kHeights[ordinal_ - 1]; }
  /// Canonical "2160p"-style label.
  std::string_view label() const { return kPlainLabels[ordinal_ - 1]; }

  BinaryClass binary_class() const {
    return ordinal_ >= kLowestHighOrdinal ? BinaryClass::High : BinaryClass::Low;
  }

  friend bool operator==(Resolution a, Resolution b) { return a.ordinal_ == b.ordinal_; }
  friend bool operator!=(Resolution a, Resolution b) { return a.ordinal_ != b.ordinal_; }
  friend bool operator<(Resolution a, Resolution b) { return a.ordinal_ < b.ordinal_; }

 private:
  explicit Resolution(int ordinal) : ordinal_(ordinal) {}

  static constexpr std::array<std::string_view, 8> kPlainLabels{
      "144p", "240p", "360p", "480p", "720p", "1080p", "1440p", "2160p"};
  static constexpr std::array<std::string_view, 8> kPlayerLabels{
      "tiny", "small", "medium", "large", "hd720", "hd1080", "hd1440", "hd2160"};
  static constexpr std::array<int, 8> kHeights{144, 240, 360, 480, 720, 1080, 1440, 2160};

  int ordinal_;
};

/// One 1-second radio measurement.
struct ChannelSample {
  TimestampMs timestamp = 0;
  double rsrp = 0.0;  // dBm
  double rsrq = 0.0;  // dB
  double snr = 0.0;   // dB
};

// Sanity bounds applied at parse time; rows outside are rejected so corrupt
// values never reach training.
inline constexpr double kRsrpMin = -160.0, kRsrpMax = -40.0;
inline constexpr double kRsrqMin = -30.0, kRsrqMax = 0.0;
inline constexpr double kSnrMin = -20.0, kSnrMax = 50.0;

inline bool channel_values_in_range(double rsrp, double rsrq, double snr) {
  return rsrp >= kRsrpMin && rsrp <= kRsrpMax && rsrq >= kRsrqMin &&
         rsrq <= kRsrqMax && snr >= kSnrMin && snr <= kSnrMax;
}

/// One player-side observation.
struct QoESample {
  TimestampMs timestamp = 0;
  Resolution quality;
  std::int64_t video_bytes = 0;
  double loaded_pct = 0.0;  // [0, 100]
};

struct FeatureVector {
  double rsrp = 0.0;
  double rsrq = 0.0;
  double snr = 0.0;

  std::array<double, 3> as_array() const { return {rsrp, rsrq, snr}; }
  static FeatureVector from_array(const std::array<double, 3>& a) {
    return FeatureVector{a[0], a[1], a[2]};
  }
};

inline constexpr std::array<std::string_view, 3> kFeatureNames{"rsrp", "rsrq", "snr"};
inline constexpr int kFeatureCount = 3;

/// An aligned channel+player row. The binary class is always derived from the
/// resolution and never stored, so the two cannot disagree.
struct LabeledRecord {
  TimestampMs timestamp;
  double rsrp;
  double rsrq;
  double snr;
  Resolution resolution;

  BinaryClass klass() const { return resolution.binary_class(); }
  FeatureVector features() const { return FeatureVector{rsrp, rsrq, snr}; }
};

struct Provenance {
  std::vector<std::string> sources;
  std::int64_t tolerance_ms = 0;
};

/// Ordered rows plus where they came from. Never empty: every training and
/// correlation operation assumes at least one row.
class Dataset {
 public:
  Dataset(std::vector<LabeledRecord> rows, Provenance provenance)
      : rows_(std::move(rows)), provenance_(std::move(provenance)) {
    if (rows_.empty()) throw DomainError("dataset is empty");
  }

  const std::vector<LabeledRecord>& rows() const { return rows_; }
  const Provenance& provenance() const { return provenance_; }
  std::size_t size() const { return rows_.size(); }

  /// [low count, high count]
  std::array<std::size_t, 2> class_counts() const {
    std::array<std::size_t, 2> counts{0, 0};
    for (const auto& r : rows_) ++counts[static_cast<int>(r.klass())];
    return counts;
  }

  std::map<int, std::size_t> resolution_histogram() const {
    std::map<int, std::size_t> hist;
    for (const auto& r : rows_) ++hist[r.resolution.ordinal()];
    return hist;
  }

  std::size_t distinct_resolutions() const { return resolution_histogram().size(); }

  bool has_both_classes() const {
    auto c = class_counts();
    return c[0] > 0 && c[1] > 0;
  }

  Dataset subset(const std::vector<std::size_t>& indices) const {
    std::vector<LabeledRecord> rows;
    rows.reserve(indices.size());
    for (std::size_t i : indices) rows.push_back(rows_.at(i));
    return Dataset(std::move(rows), provenance_);
  }

 private:
  std::vector<LabeledRecord> rows_;
  Provenance provenance_;
};

}  // namespace qshift
