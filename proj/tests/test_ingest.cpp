#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qshift/ingest.hpp"
#include "qshift/timestamp.hpp"

#include "fixtures.hpp"

using namespace qshift;

namespace {

const char* kSessionChannel =
    "Time,RSRP,RSRQ,SNR\n"
    "16:09:23,-105,-13,3\n"
    "16:09:24,-103,-13,4\n"
    "16:09:25,-103,-13,4\n"
    "16:09:26,-100,-12.5,6.5\n"
    "16:09:27,-97,-12,9\n";

const char* kSessionQoe =
    "Timestamp,Quality,Video_Bytes,Loaded_Pct\n"
    "16:09:23,hd2160,1000,10\n"
    "16:09:24,hd2160,2000,20\n"
    "16:09:25,hd1440,3000,30\n"
    "16:09:26,hd1440,4000,40\n"
    "16:09:27,hd1440,5000,50\n";

TimestampMs date() { return *parse_date("2024-03-01"); }

}  // namespace

TEST_CASE("channel log parses a five-second session sample") {
  std::istringstream in(kSessionChannel);
  auto result = ingest::parse_channel_log(in, {}, date());
  REQUIRE(result.samples.size() == 5);
  CHECK(result.report.accepted == 5);
  CHECK(result.report.rejected_total() == 0);
  CHECK(result.samples[0].rsrp == -105.0);
  CHECK(result.samples[0].rsrq == -13.0);
  CHECK(result.samples[0].snr == 3.0);
  CHECK(result.samples[3].rsrq == -12.5);
  CHECK(format_timestamp(result.samples[0].timestamp) == "2024-03-01T16:09:23");
}

TEST_CASE("channel rows outside sanity bounds are rejected and counted") {
  std::istringstream in(
      "time,rsrp,rsrq,snr\n"
      "16:00:00,-999,-13,3\n"
      "16:00:01,-100,-13,3\n"
      "16:00:02,-100,7,3\n"
      "16:00:03,-100,-13,99\n");
  auto result = ingest::parse_channel_log(in, {}, date());
  REQUIRE(result.samples.size() == 1);
  CHECK(result.report.rejected.at("out_of_range") == 3);
  CHECK(result.report.rows_seen == 4);
}

TEST_CASE("channel parse rejects bad numbers and counts reasons") {
  std::istringstream in(
      "time,rsrp,rsrq,snr\n"
      "16:00:00,abc,-13,3\n"
      "bogus,-100,-13,3\n"
      "16:00:02,-100,-13\n"
      "16:00:03,-100,-13,3\n");
  auto result = ingest::parse_channel_log(in, {}, date());
  CHECK(result.samples.size() == 1);
  CHECK(result.report.rejected.at("bad_number") == 1);
  CHECK(result.report.rejected.at("bad_timestamp") == 1);
  CHECK(result.report.rejected.at("wrong_field_count") == 1);
}

TEST_CASE("empty file after header yields empty list with a warning") {
  std::istringstream in("time,rsrp,rsrq,snr\n");
  auto result = ingest::parse_channel_log(in, {}, date());
  CHECK(result.samples.empty());
  REQUIRE_FALSE(result.report.warnings.empty());
}

TEST_CASE("missing column is a hard error") {
  std::istringstream in("time,rsrp,rsrq\n16:00:00,-100,-13\n");
  CHECK_THROWS_AS(ingest::parse_channel_log(in, {}, date()), UsageError);
}

TEST_CASE("decreasing channel timestamps are a hard error under ISO input") {
  std::istringstream in(
      "time,rsrp,rsrq,snr\n"
      "2024-03-01T16:00:05,-100,-13,3\n"
      "2024-03-01T16:00:04,-100,-13,3\n");
  CHECK_THROWS_AS(ingest::parse_channel_log(in, {}), DomainError);
}

TEST_CASE("qoe labels map player vocabulary onto the ordinal scale") {
  std::istringstream in(
      "time,quality,video_bytes,loaded_pct\n"
      "16:00:00,hd2160,10,1\n"
      "16:00:01,large,20,2\n"
      "16:00:02,premium,30,3\n"
      "16:00:03,1440p,40,4\n"
      "16:00:04,TINY,50,5\n");
  auto result = ingest::parse_qoe_log(in, {}, date());
  REQUIRE(result.samples.size() == 4);
  CHECK(result.samples[0].quality.ordinal() == 8);
  CHECK(result.samples[1].quality.ordinal() == 4);  // "large" is 480p
  CHECK(result.samples[2].quality.ordinal() == 7);
  CHECK(result.samples[3].quality.ordinal() == 1);
  CHECK(result.report.rejected.at("unknown_quality") == 1);
}

TEST_CASE("binary labeling splits at 720p") {
  CHECK(ingest::label(*Resolution::from_label("480p")) == BinaryClass::Low);
  CHECK(ingest::label(*Resolution::from_label("720p")) == BinaryClass::High);
  CHECK(ingest::label(*Resolution::from_label("2160p")) == BinaryClass::High);
  for (int ordinal = 1; ordinal <= 8; ++ordinal) {
    auto r = Resolution::from_ordinal(ordinal);
    REQUIRE(r.has_value());
    CHECK((r->binary_class() == BinaryClass::High) == (ordinal >= 5));
  }
}

TEST_CASE("resolution ordinals follow pixel height order") {
  for (int ordinal = 2; ordinal <= 8; ++ordinal)
    CHECK(Resolution::from_ordinal(ordinal)->pixel_height() >
          Resolution::from_ordinal(ordinal - 1)->pixel_height());
}

TEST_CASE("alignment joins the session sample one-to-one") {
  std::istringstream cin_(kSessionChannel), qin(kSessionQoe);
  auto channel = ingest::parse_channel_log(cin_, {}, date());
  auto qoe = ingest::parse_qoe_log(qin, {}, date());
  auto aligned = ingest::align(channel.samples, qoe.samples, 500);
  REQUIRE(aligned.records.size() == 5);
  CHECK(aligned.dropped == 0);
  CHECK(aligned.records[0].resolution.ordinal() == 8);
  CHECK(aligned.records[0].klass() == BinaryClass::High);
  CHECK(aligned.records[4].resolution.ordinal() == 7);
  CHECK(aligned.records[0].rsrp == -105.0);
}

TEST_CASE("channel samples outside the tolerance window are dropped") {
  std::vector<ChannelSample> channel{{date() + 58'170'000, -105, -13, 3}};  // 16:09:30
  std::vector<QoESample> qoe{{date() + 58'163'000, *Resolution::from_label("hd2160"), 0, 0}};
  auto aligned = ingest::align(channel, qoe, 500);
  CHECK(aligned.records.empty());
  CHECK(aligned.dropped == 1);

  auto wide = ingest::align(channel, qoe, 7000);
  CHECK(wide.records.size() == 1);
}

TEST_CASE("alignment accounting is exact and output is monotone") {
  Rng rng(7);
  std::vector<ChannelSample> channel;
  std::vector<QoESample> qoe;
  TimestampMs t = date();
  for (int i = 0; i < 200; ++i) {
    t += 1000 * static_cast<TimestampMs>(1 + rng.below(3));
    channel.push_back({t, -100.0, -12.0, 5.0});
    if (rng.below(2) == 0) qoe.push_back({t, *Resolution::from_label("720p"), 0, 0});
  }
  auto aligned = ingest::align(channel, qoe, 500);
  CHECK(aligned.records.size() + aligned.dropped == channel.size());
  for (std::size_t i = 1; i < aligned.records.size(); ++i)
    CHECK(aligned.records[i].timestamp >= aligned.records[i - 1].timestamp);
}

TEST_CASE("align rejects unsorted input") {
  std::vector<ChannelSample> channel{{2000, -100, -12, 5}, {1000, -100, -12, 5}};
  std::vector<QoESample> qoe{{1000, *Resolution::from_label("720p"), 0, 0}};
  CHECK_THROWS_AS(ingest::align(channel, qoe, 500), DomainError);
}

TEST_CASE("a qoe sample may serve several channel samples in its window") {
  std::vector<ChannelSample> channel{{1000, -100, -12, 5}, {1400, -100, -12, 6}};
  std::vector<QoESample> qoe{{1200, *Resolution::from_label("720p"), 0, 0}};
  auto aligned = ingest::align(channel, qoe, 500);
  CHECK(aligned.records.size() == 2);
}

TEST_CASE("build_dataset rejects empty input and summarizes classes") {
  CHECK_THROWS_AS(ingest::build_dataset({}, Provenance{}), DomainError);

  std::vector<LabeledRecord> records{test::row(0, -100, -12, 3, "480p"),
                                     test::row(0, -100, -12, 4, "480p"),
                                     test::row(1000, -90, -11, 9, "2160p")};
  auto d = ingest::build_dataset(records, Provenance{{"x"}, 500});
  auto counts = d.class_counts();
  CHECK(counts[0] == 2);
  CHECK(counts[1] == 1);
  CHECK(d.resolution_histogram().at(4) == 2);
  CHECK(d.size() == 3);  // duplicate timestamps kept as distinct rows
}

TEST_CASE("bare time-of-day timestamps need a session date") {
  std::istringstream in("time,rsrp,rsrq,snr\n16:00:00,-100,-13,3\n");
  CHECK_THROWS_AS(ingest::parse_channel_log(in, {}, std::nullopt), UsageError);
}

TEST_CASE("midnight rollover advances the session date") {
  std::istringstream in(
      "time,rsrp,rsrq,snr\n"
      "23:59:59,-100,-13,3\n"
      "00:00:01,-100,-13,4\n");
  auto result = ingest::parse_channel_log(in, {}, date());
  REQUIRE(result.samples.size() == 2);
  CHECK(format_timestamp(result.samples[0].timestamp) == "2024-03-01T23:59:59");
  CHECK(format_timestamp(result.samples[1].timestamp) == "2024-03-02T00:00:01");
  CHECK(result.samples[1].timestamp > result.samples[0].timestamp);
}

TEST_CASE("dataset csv round-trips exactly") {
  std::vector<LabeledRecord> records{
      test::row(date() + 123, -105.25, -13.5, 3.0625, "hd2160"),
      test::row(date() + 1123, -103.0, -13.0, 4.0, "480p"),
      test::row(date() + 2123, -97.75, -12.015625, 9.5, "720p"),
  };
  auto d = ingest::build_dataset(records, Provenance{{"a", "b"}, 500});

  std::ostringstream out;
  ingest::write_dataset_csv(out, d);
  std::istringstream in(out.str());
  auto back = ingest::read_dataset_csv(in, "roundtrip");

  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.rows()[i].timestamp == d.rows()[i].timestamp);
    CHECK(back.rows()[i].rsrp == d.rows()[i].rsrp);
    CHECK(back.rows()[i].rsrq == d.rows()[i].rsrq);
    CHECK(back.rows()[i].snr == d.rows()[i].snr);
    CHECK(back.rows()[i].resolution == d.rows()[i].resolution);
    CHECK(back.rows()[i].klass() == d.rows()[i].klass());
  }

  std::ostringstream again;
  ingest::write_dataset_csv(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("dataset csv readers reject class/quality mismatches") {
  std::istringstream in(
      "timestamp,rsrp,rsrq,snr,quality,ordinal,class\n"
      "2024-03-01T16:09:23,-105,-13,3,hd2160,8,0\n");
  CHECK_THROWS_AS(ingest::read_dataset_csv(in, "tampered"), UsageError);
}
