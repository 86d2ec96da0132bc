#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qshift/csv.hpp"
#include "qshift/ingest.hpp"
#include "qshift/learners/model.hpp"
#include "qshift/timestamp.hpp"
#include "qshift/types.hpp"

namespace qshift::stream {

struct StreamOptions {
  /// When true the first input line is a header and sets the column mapping;
  /// otherwise rows are read positionally as timestamp,rsrp,rsrq,snr.
  bool header = false;
  ingest::ChannelColumns columns;
  std::optional<TimestampMs> session_date;
};

struct StreamSummary {
  std::size_t lines = 0;  // data lines consumed (header excluded)
  std::size_t predictions = 0;
  std::size_t errors = 0;
  double mean_latency_us = 0.0;
  double p99_latency_us = 0.0;
};

/// Reads channel-log rows and writes one line-delimited JSON event per input
/// line, in order: predictions for valid rows, error events for malformed
/// ones, and a final summary. predictions + errors == lines, always.
inline StreamSummary run_stream(const learn::Model& model, std::istream& in, std::ostream& out,
                                const StreamOptions& options = {}) {
  using clock = std::chrono::steady_clock;
  using nlohmann::ordered_json;

  std::size_t ts_col = 0, rsrp_col = 1, rsrq_col = 2, snr_col = 3;
  std::string line;
  if (options.header) {
    if (!csv::read_line(in, line)) {
      StreamSummary empty;
      out << ordered_json{{"event", "summary"}, {"lines", 0}, {"predictions", 0}, {"errors", 0},
                          {"mean_latency_us", 0.0}, {"p99_latency_us", 0.0}}
                 .dump()
          << '\n';
      return empty;
    }
    csv::HeaderIndex header(csv::split_row(line));
    ts_col = header.require(options.columns.timestamp, "timestamp");
    rsrp_col = header.require(options.columns.rsrp, "rsrp");
    rsrq_col = header.require(options.columns.rsrq, "rsrq");
    snr_col = header.require(options.columns.snr, "snr");
  }

  TimestampReader time_reader(options.session_date);
  const std::string model_name{learn::kind_name(model.kind())};
  StreamSummary summary;
  std::vector<double> latencies;

  auto emit_error = [&](std::size_t line_no, const std::string& reason, const std::string& raw) {
    ++summary.errors;
    out << ordered_json{{"event", "error"}, {"line", line_no}, {"error", reason}, {"raw", raw}}
               .dump()
        << '\n';
  };

  while (csv::read_line(in, line)) {
    ++summary.lines;
    const std::size_t line_no = summary.lines;
    auto fields = csv::split_row(line);
    if (fields.size() <= std::max({ts_col, rsrp_col, rsrq_col, snr_col})) {
      emit_error(line_no, "wrong_field_count", line);
      continue;
    }
    std::optional<TimestampMs> ts;
    try {
      ts = time_reader.read(csv::trim(fields[ts_col]));
    } catch (const UsageError& e) {
      emit_error(line_no, e.what(), line);
      continue;
    }
    if (!ts) {
      emit_error(line_no, "bad_timestamp", line);
      continue;
    }
    auto rsrp = csv::parse_double(fields[rsrp_col]);
    auto rsrq = csv::parse_double(fields[rsrq_col]);
    auto snr = csv::parse_double(fields[snr_col]);
    if (!rsrp || !rsrq || !snr) {
      emit_error(line_no, "bad_number", line);
      continue;
    }
    if (!channel_values_in_range(*rsrp, *rsrq, *snr)) {
      emit_error(line_no, "out_of_range", line);
      continue;
    }

    FeatureVector features{*rsrp, *rsrq, *snr};
    auto start = clock::now();
    double proba = model.predict_proba(features);
    auto stop = clock::now();
    double latency_us =
        std::chrono::duration_cast<std::chrono::duration<double, std::micro>>(stop - start).count();
    latencies.push_back(latency_us);
    ++summary.predictions;

    const int klass = proba >= 0.5 ? 1 : 0;
    out << ordered_json{{"event", "prediction"},
                        {"line", line_no},
                        {"timestamp", format_timestamp(*ts)},
                        {"rsrp", *rsrp},
                        {"rsrq", *rsrq},
                        {"snr", *snr},
                        {"class", klass},
                        {"label", std::string(class_name(static_cast<BinaryClass>(klass)))},
                        {"proba", proba},
                        {"model", model_name},
                        {"latency_us", latency_us}}
               .dump()
        << '\n';
  }

  if (!latencies.empty()) {
    double total = 0.0;
    for (double v : latencies) total += v;
    summary.mean_latency_us = total / static_cast<double>(latencies.size());
    std::vector<double> sorted = latencies;
    std::sort(sorted.begin(), sorted.end());
    // nearest-rank p99
    std::size_t rank = (sorted.size() * 99 + 99) / 100;
    rank = std::min(std::max<std::size_t>(rank, 1), sorted.size());
    summary.p99_latency_us = sorted[rank - 1];
  }
  out << ordered_json{{"event", "summary"},
                      {"lines", summary.lines},
                      {"predictions", summary.predictions},
                      {"errors", summary.errors},
                      {"mean_latency_us", summary.mean_latency_us},
                      {"p99_latency_us", summary.p99_latency_us}}
             .dump()
      << '\n';
  return summary;
}

}  // namespace qshift::stream
