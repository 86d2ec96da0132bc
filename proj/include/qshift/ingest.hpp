#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qshift/csv.hpp"
#include "qshift/errors.hpp"
#include "qshift/timestamp.hpp"
#include "qshift/types.hpp"

namespace qshift::ingest {

/// Column-name candidates for the channel log; each entry is tried
/// case-insensitively in order. CLI flags replace a list with a single name.
struct ChannelColumns {
  std::vector<std::string> timestamp{"timestamp", "time"};
  std::vector<std::string> rsrp{"rsrp"};
  std::vector<std::string> rsrq{"rsrq"};
  std::vector<std::string> snr{"snr"};
};

struct QoeColumns {
  std::vector<std::string> timestamp{"timestamp", "time"};
  std::vector<std::string> quality{"quality"};
  std::vector<std::string> video_bytes{"video_bytes", "bytes", "videobytes"};
  std::vector<std::string> loaded_pct{"loaded_pct", "loaded", "loaded_percentage"};
};

/// Per-file accounting of what was kept and what was thrown away.
struct ParseReport {
  std::size_t rows_seen = 0;
  std::size_t accepted = 0;
  std::map<std::string, std::size_t> rejected;  // reason -> count
  std::vector<std::string> warnings;

  std::size_t rejected_total() const {
    std::size_t total = 0;
    for (const auto& [reason, count] : rejected) total += count;
    return total;
  }
};

struct ChannelParseResult {
  std::vector<ChannelSample> samples;
  ParseReport report;
};

struct QoeParseResult {
  std::vector<QoESample> samples;
  ParseReport report;
};

namespace detail {

inline void reject(ParseReport& report, const std::string& reason) { ++report.rejected[reason]; }

}  // namespace detail

/// Streams a channel-metric CSV. Rows with malformed fields or values outside
/// the sanity bounds are rejected and counted; decreasing timestamps are a
/// hard error since downstream alignment assumes file order.
inline ChannelParseResult parse_channel_log(std::istream& in, const ChannelColumns& columns = {},
                                            std::optional<TimestampMs> session_date = std::nullopt) {
  ChannelParseResult result;
  std::string line;
  if (!csv::read_line(in, line)) throw UsageError("channel log is empty (no header row)");
  csv::HeaderIndex header(csv::split_row(line));
  const std::size_t ts_col = header.require(columns.timestamp, "timestamp");
  const std::size_t rsrp_col = header.require(columns.rsrp, "rsrp");
  const std::size_t rsrq_col = header.require(columns.rsrq, "rsrq");
  const std::size_t snr_col = header.require(columns.snr, "snr");

  TimestampReader time_reader(session_date);
  TimestampMs prev_ts = INT64_MIN;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    ++result.report.rows_seen;
    auto fields = csv::split_row(line);
    if (fields.size() <= std::max({ts_col, rsrp_col, rsrq_col, snr_col})) {
      detail::reject(result.report, "wrong_field_count");
      continue;
    }
    auto ts = time_reader.read(csv::trim(fields[ts_col]));
    if (!ts) {
      detail::reject(result.report, "bad_timestamp");
      continue;
    }
    auto rsrp = csv::parse_double(fields[rsrp_col]);
    auto rsrq = csv::parse_double(fields[rsrq_col]);
    auto snr = csv::parse_double(fields[snr_col]);
    if (!rsrp || !rsrq || !snr) {
      detail::reject(result.report, "bad_number");
      continue;
    }
    if (!channel_values_in_range(*rsrp, *rsrq, *snr)) {
      detail::reject(result.report, "out_of_range");
      continue;
    }
    if (*ts < prev_ts)
      throw DomainError("channel log timestamps decrease at line " + std::to_string(line_no));
    prev_ts = *ts;
    result.samples.push_back(ChannelSample{*ts, *rsrp, *rsrq, *snr});
    ++result.report.accepted;
  }
  if (result.samples.empty()) result.report.warnings.push_back("no usable channel rows");
  return result;
}

/// Streams a QoE CSV. Unknown quality labels reject the row.
inline QoeParseResult parse_qoe_log(std::istream& in, const QoeColumns& columns = {},
                                    std::optional<TimestampMs> session_date = std::nullopt) {
  QoeParseResult result;
  std::string line;
  if (!csv::read_line(in, line)) throw UsageError("qoe log is empty (no header row)");
  csv::HeaderIndex header(csv::split_row(line));
  const std::size_t ts_col = header.require(columns.timestamp, "timestamp");
  const std::size_t quality_col = header.require(columns.quality, "quality");
  const std::size_t bytes_col = header.require(columns.video_bytes, "video_bytes");
  const std::size_t loaded_col = header.require(columns.loaded_pct, "loaded_pct");

  TimestampReader time_reader(session_date);
  TimestampMs prev_ts = INT64_MIN;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    ++result.report.rows_seen;
    auto fields = csv::split_row(line);
    if (fields.size() <= std::max({ts_col, quality_col, bytes_col, loaded_col})) {
      detail::reject(result.report, "wrong_field_count");
      continue;
    }
    auto ts = time_reader.read(csv::trim(fields[ts_col]));
    if (!ts) {
      detail::reject(result.report, "bad_timestamp");
      continue;
    }
    auto quality = Resolution::from_label(csv::trim(fields[quality_col]));
    if (!quality) {
      detail::reject(result.report, "unknown_quality");
      continue;
    }
    auto bytes = csv::parse_int64(fields[bytes_col]);
    auto loaded = csv::parse_double(fields[loaded_col]);
    if (!bytes || *bytes < 0 || !loaded || *loaded < 0.0 || *loaded > 100.0) {
      detail::reject(result.report, "bad_number");
      continue;
    }
    if (*ts < prev_ts)
      throw DomainError("qoe log timestamps decrease at line " + std::to_string(line_no));
    prev_ts = *ts;
    result.samples.push_back(QoESample{*ts, *quality, *bytes, *loaded});
    ++result.report.accepted;
  }
  if (result.samples.empty()) result.report.warnings.push_back("no usable qoe rows");
  return result;
}

/// Binary class of a resolution: Low for 144p..480p, High for 720p..2160p.
inline BinaryClass label(Resolution r) { return r.binary_class(); }

struct AlignResult {
  std::vector<LabeledRecord> records;
  std::size_t dropped = 0;  // channel samples with no QoE row within tolerance
};

/// Joins each channel sample with the nearest-in-time QoE sample within
/// +/- tolerance. A QoE sample may serve any number of channel samples inside
/// its window; channel samples without a match are dropped and counted, so
/// |channel| == |records| + dropped always holds.
inline AlignResult align(const std::vector<ChannelSample>& channel,
                         const std::vector<QoESample>& qoe, std::int64_t tolerance_ms) {
  if (tolerance_ms < 0) throw UsageError("alignment tolerance must be non-negative");
  auto unsorted = [](const auto& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].timestamp < v[i - 1].timestamp) return true;
    return false;
  };
  if (unsorted(channel)) throw DomainError("channel samples are not sorted by timestamp");
  if (unsorted(qoe)) throw DomainError("qoe samples are not sorted by timestamp");

  AlignResult result;
  result.records.reserve(channel.size());
  std::size_t cursor = 0;
  for (const auto& cs : channel) {
    // Advance to the last QoE sample at or before this timestamp, then pick
    // the nearer of it and its successor. Ties go to the earlier sample.
    while (cursor + 1 < qoe.size() && qoe[cursor + 1].timestamp <= cs.timestamp) ++cursor;
    const QoESample* best = nullptr;
    std::int64_t best_delta = tolerance_ms + 1;
    if (cursor < qoe.size()) {
      std::int64_t delta = std::llabs(qoe[cursor].timestamp - cs.timestamp);
      if (delta < best_delta) {
        best = &qoe[cursor];
        best_delta = delta;
      }
    }
    if (cursor + 1 < qoe.size()) {
      std::int64_t delta = std::llabs(qoe[cursor + 1].timestamp - cs.timestamp);
      if (delta < best_delta) {
        best = &qoe[cursor + 1];
        best_delta = delta;
      }
    }
    if (!best) {
      ++result.dropped;
      continue;
    }
    result.records.push_back(LabeledRecord{cs.timestamp, cs.rsrp, cs.rsrq, cs.snr, best->quality});
  }
  return result;
}

/// Wraps aligned records into a Dataset; empty input is a hard error.
inline Dataset build_dataset(std::vector<LabeledRecord> records, Provenance provenance) {
  if (records.empty()) throw DomainError("empty alignment: no records to build a dataset from");
  return Dataset(std::move(records), std::move(provenance));
}

inline constexpr std::string_view kDatasetHeader = "timestamp,rsrp,rsrq,snr,quality,ordinal,class";

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Writes the aligned dataset CSV. Doubles use shortest round-trip encoding
/// so re-parsing reproduces the dataset exactly.
inline void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
  out << kDatasetHeader << '\n';
  for (const auto& r : dataset.rows()) {
    out << format_timestamp(r.timestamp) << ',' << detail::format_double(r.rsrp) << ','
        << detail::format_double(r.rsrq) << ',' << detail::format_double(r.snr) << ','
        << r.resolution.label() << ',' << r.resolution.ordinal() << ','
        << static_cast<int>(r.klass()) << '\n';
  }
}

/// Reads a dataset CSV produced by write_dataset_csv (or hand-assembled with
/// the same header). The ordinal and class columns are validated against the
/// quality label rather than trusted.
inline Dataset read_dataset_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!csv::read_line(in, line)) throw UsageError(source_name + ": empty dataset file");
  csv::HeaderIndex header(csv::split_row(line));
  ChannelColumns cc;
  const std::size_t ts_col = header.require(cc.timestamp, "timestamp");
  const std::size_t rsrp_col = header.require(cc.rsrp, "rsrp");
  const std::size_t rsrq_col = header.require(cc.rsrq, "rsrq");
  const std::size_t snr_col = header.require(cc.snr, "snr");
  const std::size_t quality_col = header.require({"quality"}, "quality");
  auto ordinal_col = header.find("ordinal");
  auto class_col = header.find("class");

  std::vector<LabeledRecord> records;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split_row(line);
    auto fail = [&](const std::string& what) {
      throw UsageError(source_name + ":" + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() < 5) fail("too few fields");
    auto ts = parse_iso_datetime(csv::trim(fields[ts_col]));
    if (!ts) fail("bad timestamp '" + fields[ts_col] + "'");
    auto rsrp = csv::parse_double(fields[rsrp_col]);
    auto rsrq = csv::parse_double(fields[rsrq_col]);
    auto snr = csv::parse_double(fields[snr_col]);
    if (!rsrp || !rsrq || !snr) fail("bad numeric field");
    auto quality = Resolution::from_label(csv::trim(fields[quality_col]));
    if (!quality) fail("unknown quality '" + fields[quality_col] + "'");
    if (ordinal_col && *ordinal_col < fields.size()) {
      auto ordinal = csv::parse_int64(fields[*ordinal_col]);
      if (!ordinal || *ordinal != quality->ordinal()) fail("ordinal column disagrees with quality");
    }
    if (class_col && *class_col < fields.size()) {
      auto klass = csv::parse_int64(fields[*class_col]);
      if (!klass || *klass != static_cast<int>(quality->binary_class()))
        fail("class column disagrees with quality");
    }
    records.push_back(LabeledRecord{*ts, *rsrp, *rsrq, *snr, *quality});
  }
  if (records.empty()) throw DomainError(source_name + ": dataset has no rows");
  Provenance provenance;
  provenance.sources.push_back(source_name);
  return Dataset(std::move(records), std::move(provenance));
}

}  // namespace qshift::ingest
