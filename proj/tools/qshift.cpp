// qshift: predict whether a 5G video-streaming second plays at low or high
// resolution from channel metrics (RSRP, RSRQ, SNR).
//
// Subcommands: ingest, correlate, train, evaluate, predict, stream, report.
// Exit codes: 0 success, 2 usage/input error, 3 domain error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qshift/eval.hpp"
#include "qshift/folds.hpp"
#include "qshift/ingest.hpp"
#include "qshift/learners/train.hpp"
#include "qshift/persist.hpp"
#include "qshift/report.hpp"
#include "qshift/stats.hpp"
#include "qshift/stream.hpp"
#include "qshift/timestamp.hpp"

namespace {

using namespace qshift;

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string format = "md";
  std::int64_t tolerance_ms = 500;
  std::string date;

  std::optional<TimestampMs> session_date() const {
    if (date.empty()) return std::nullopt;
    auto parsed = parse_date(date);
    if (!parsed) throw UsageError("--date must be YYYY-MM-DD, got '" + date + "'");
    return parsed;
  }
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file: " + path);
  return in;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + path);
  out << content;
  if (!out) throw UsageError("failed writing " + path);
}

learn::ModelKind parse_kind(const std::string& name) {
  auto kind = learn::kind_from_name(name);
  if (!kind) {
    std::string valid;
    for (auto k : learn::kAllModelKinds) {
      if (!valid.empty()) valid += ", ";
      valid += learn::kind_name(k);
    }
    throw UsageError("unknown model '" + name + "' (valid kinds: " + valid + ")");
  }
  return *kind;
}

std::vector<learn::ModelKind> parse_kind_list(const std::vector<std::string>& names) {
  std::vector<learn::ModelKind> kinds;
  kinds.reserve(names.size());
  for (const auto& n : names) kinds.push_back(parse_kind(n));
  return kinds;
}

report::Averaging parse_averaging(const std::string& name) {
  if (name == "weighted") return report::Averaging::Weighted;
  if (name == "macro") return report::Averaging::Macro;
  throw UsageError("--averaging must be weighted or macro");
}

Dataset load_dataset(const std::string& path) {
  auto in = open_input(path);
  return ingest::read_dataset_csv(in, path);
}

learn::ModelPtr load_model_file(const std::string& path) {
  auto in = open_input(path);
  return persist::load_model(in, path);
}

// Hyperparameter flags live on the top-level app so a flat key=value config
// file can override any of them; CLI flags still win over the config file.
struct TrainFlags {
  learn::TrainConfig config;
  std::vector<std::string> stacking_bases;
  std::vector<std::string> voting_members;
  bool rf_no_bootstrap = false;

  learn::TrainConfig resolve(std::uint64_t seed) const {
    learn::TrainConfig out = config;
    out.seed = seed;
    out.rf.bootstrap = !rf_no_bootstrap;
    if (!stacking_bases.empty()) out.stacking_bases = parse_kind_list(stacking_bases);
    if (!voting_members.empty()) out.voting_members = parse_kind_list(voting_members);
    return out;
  }
};

void add_train_options(CLI::App& app, TrainFlags& flags) {
  app.add_option("--dt-max-depth", flags.config.dt.max_depth, "Decision tree depth cap (-1 = unlimited)");
  app.add_option("--dt-min-split", flags.config.dt.min_samples_split, "Minimum rows to split a node");
  app.add_option("--rf-trees", flags.config.rf.n_trees, "Forest size");
  app.add_flag("--rf-no-bootstrap", flags.rf_no_bootstrap, "Disable bootstrap resampling");
  app.add_option("--rf-features", flags.config.rf.features_per_split, "Features sampled per split");
  app.add_option("--lr-c", flags.config.lr.c, "Inverse regularization strength");
  app.add_option("--lr-max-iter", flags.config.lr.max_iter, "Gradient descent iteration cap");
  app.add_option("--lr-tol", flags.config.lr.tol, "Gradient norm convergence threshold");
  app.add_option("--svm-lambda", flags.config.svm.lambda, "Hinge loss L2 strength");
  app.add_option("--svm-epochs", flags.config.svm.epochs, "Pegasos epochs");
  app.add_option("--gbt-rounds", flags.config.gbt.rounds, "Boosting rounds");
  app.add_option("--gbt-depth", flags.config.gbt.max_depth, "Boosted tree depth");
  app.add_option("--gbt-shrinkage", flags.config.gbt.shrinkage, "Boosting learning rate");
  app.add_option("--gbt-lambda", flags.config.gbt.lambda, "Leaf weight L2 strength");
  app.add_option("--mlp-hidden1", flags.config.mlp.hidden1, "First hidden layer width");
  app.add_option("--mlp-hidden2", flags.config.mlp.hidden2, "Second hidden layer width");
  app.add_option("--mlp-epochs", flags.config.mlp.epochs, "Training epochs");
  app.add_option("--mlp-lr", flags.config.mlp.learning_rate, "Adam learning rate");
  app.add_option("--stacking-folds", flags.config.stacking_folds, "Internal folds for meta-features");
  app.add_option("--stacking-bases", flags.stacking_bases, "Stacking base models")->delimiter(',');
  app.add_option("--voting-members", flags.voting_members, "Voting member models")->delimiter(',');
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string channel_path, qoe_path, out_path, report_path;
  std::string channel_time_col, channel_rsrp_col, channel_rsrq_col, channel_snr_col;
  std::string qoe_time_col, qoe_quality_col, qoe_bytes_col, qoe_loaded_col;
};

int run_ingest(const GlobalOptions& global, const IngestArgs& args) {
  ingest::ChannelColumns channel_cols;
  if (!args.channel_time_col.empty()) channel_cols.timestamp = {args.channel_time_col};
  if (!args.channel_rsrp_col.empty()) channel_cols.rsrp = {args.channel_rsrp_col};
  if (!args.channel_rsrq_col.empty()) channel_cols.rsrq = {args.channel_rsrq_col};
  if (!args.channel_snr_col.empty()) channel_cols.snr = {args.channel_snr_col};
  ingest::QoeColumns qoe_cols;
  if (!args.qoe_time_col.empty()) qoe_cols.timestamp = {args.qoe_time_col};
  if (!args.qoe_quality_col.empty()) qoe_cols.quality = {args.qoe_quality_col};
  if (!args.qoe_bytes_col.empty()) qoe_cols.video_bytes = {args.qoe_bytes_col};
  if (!args.qoe_loaded_col.empty()) qoe_cols.loaded_pct = {args.qoe_loaded_col};

  auto date = global.session_date();
  auto channel_in = open_input(args.channel_path);
  auto channel = ingest::parse_channel_log(channel_in, channel_cols, date);
  auto qoe_in = open_input(args.qoe_path);
  auto qoe = ingest::parse_qoe_log(qoe_in, qoe_cols, date);

  auto aligned = ingest::align(channel.samples, qoe.samples, global.tolerance_ms);

  auto report_json = report::ingest_report_json(channel.report, qoe.report,
                                                aligned.records.size(), aligned.dropped,
                                                global.tolerance_ms);
  std::string report_path =
      args.report_path.empty() ? args.out_path + ".report.json" : args.report_path;
  write_file(report_path, report_json.dump(2) + "\n");

  if (aligned.records.empty())
    throw DomainError("empty alignment: no channel rows matched a qoe row within " +
                      std::to_string(global.tolerance_ms) + " ms");

  Provenance provenance;
  provenance.sources = {args.channel_path, args.qoe_path};
  provenance.tolerance_ms = global.tolerance_ms;
  Dataset dataset = ingest::build_dataset(std::move(aligned.records), std::move(provenance));

  std::ostringstream csv;
  ingest::write_dataset_csv(csv, dataset);
  write_file(args.out_path, csv.str());

  auto counts = dataset.class_counts();
  std::cout << "aligned " << dataset.size() << " rows (" << counts[0] << " Low / " << counts[1]
            << " High), dropped " << aligned.dropped << "; dataset -> " << args.out_path
            << ", report -> " << report_path << "\n";
  return 0;
}

int run_correlate(const GlobalOptions& global, const std::string& data_path) {
  Dataset dataset = load_dataset(data_path);
  auto results = stats::correlate_dataset(dataset);
  if (global.format == "json")
    std::cout << report::correlation_json(results).dump(2) << "\n";
  else if (global.format == "csv")
    std::cout << report::correlation_csv(results);
  else
    std::cout << report::correlation_markdown(results);
  return 0;
}

int run_train(const GlobalOptions& global, const TrainFlags& flags, const std::string& data_path,
              const std::string& model_name, const std::string& out_path) {
  auto kind = parse_kind(model_name);
  Dataset dataset = load_dataset(data_path);
  auto config = flags.resolve(global.seed);
  auto model = learn::fit_model(kind, dataset, config);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + out_path);
  std::size_t bytes = persist::save_model(*model, out);

  std::size_t correct = 0;
  for (const auto& r : dataset.rows()) correct += model->predict(r.features()) == r.klass();
  std::cout << "trained " << learn::kind_name(kind) << " on " << dataset.size() << " rows (seed "
            << global.seed << "), training accuracy "
            << report::detail::fixed(static_cast<double>(correct) / static_cast<double>(dataset.size()), 4)
            << "; wrote " << bytes << " bytes -> " << out_path << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string data_path;
  std::string model_name;
  bool all = false;
  std::size_t k = 5;
  double holdout_fraction = 0.2;
  std::string averaging = "weighted";
  std::string out_dir;
};

int run_evaluate(const GlobalOptions& global, const TrainFlags& flags, const EvaluateArgs& args) {
  if (args.model_name.empty() && !args.all)
    throw UsageError("evaluate needs --model KIND or --all");
  std::vector<learn::ModelKind> kinds;
  if (args.all)
    kinds.assign(learn::kAllModelKinds.begin(), learn::kAllModelKinds.end());
  else
    kinds.push_back(parse_kind(args.model_name));

  Dataset dataset = load_dataset(args.data_path);
  auto config = flags.resolve(global.seed);
  auto averaging = parse_averaging(args.averaging);

  if (!args.out_dir.empty()) std::filesystem::create_directories(args.out_dir);

  std::vector<eval::EvalReport> reports;
  for (auto kind : kinds) {
    eval::EvalReport report = eval::cross_validate(kind, dataset, args.k, config);
    report.holdout = eval::holdout_eval(kind, dataset, args.holdout_fraction, config);
    if (!args.out_dir.empty()) {
      const std::string stem =
          (std::filesystem::path(args.out_dir) / std::string(learn::kind_name(kind))).string();
      write_file(stem + ".report.json", report::eval_report_json(report).dump(2) + "\n");
      write_file(stem + ".confusion.csv", report::confusion_csv(report.holdout->cm));
      write_file(stem + ".confusion.svg",
                 report::confusion_svg(report.holdout->cm,
                                       report::display_name(report.classifier)));
    }
    reports.push_back(std::move(report));
  }

  if (global.format == "json") {
    report::ordered_json arr = report::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report::eval_report_json(r));
    std::cout << arr.dump(2) << "\n";
  } else if (global.format == "csv") {
    std::cout << report::eval_table_csv(reports, averaging);
  } else {
    std::cout << report::eval_table_markdown(reports, averaging);
  }
  return 0;
}

int run_predict(const std::string& model_path, double rsrp, double rsrq, double snr) {
  auto model = load_model_file(model_path);
  FeatureVector features{rsrp, rsrq, snr};
  double proba = model->predict_proba(features);
  BinaryClass klass = proba >= 0.5 ? BinaryClass::High : BinaryClass::Low;
  std::cout << "class=" << class_name(klass) << " proba=" << report::detail::general(proba)
            << "\n";
  return 0;
}

struct StreamArgs {
  std::string model_path;
  std::string input = "-";
  bool header = false;
};

int run_stream_cmd(const GlobalOptions& global, const StreamArgs& args) {
  auto model = load_model_file(args.model_path);  // refuse before consuming input
  stream::StreamOptions options;
  options.header = args.header;
  options.session_date = global.session_date();
  if (args.input == "-") {
    stream::run_stream(*model, std::cin, std::cout, options);
  } else {
    auto in = open_input(args.input);
    stream::run_stream(*model, in, std::cout, options);
  }
  return 0;
}

struct ReportArgs {
  std::string input;
  std::string svg_path;
  std::string averaging = "weighted";
};

int run_report(const GlobalOptions& global, const ReportArgs& args) {
  auto in = open_input(args.input);
  report::ordered_json j;
  try {
    j = report::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(args.input + ": not valid JSON: " + e.what());
  }
  eval::EvalReport report = report::eval_report_from_json(j);
  auto averaging = parse_averaging(args.averaging);

  if (!args.svg_path.empty()) {
    if (!report.holdout) throw UsageError("report has no hold-out confusion matrix to render");
    write_file(args.svg_path, report::confusion_svg(report.holdout->cm,
                                                    report::display_name(report.classifier)));
  }

  std::vector<eval::EvalReport> reports{report};
  if (global.format == "json")
    std::cout << report::eval_report_json(reports[0]).dump(2) << "\n";
  else if (global.format == "csv")
    std::cout << report::eval_table_csv(reports, averaging);
  else
    std::cout << report::eval_table_markdown(reports, averaging);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"5G channel-metric video resolution prediction toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value config file (CLI flags override it)");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Master random seed")->capture_default_str();
  app.add_option("--format", global.format, "Output format")
      ->check(CLI::IsMember({"md", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--tolerance-ms", global.tolerance_ms, "Alignment tolerance in milliseconds")
      ->capture_default_str();
  app.add_option("--date", global.date, "Session date (YYYY-MM-DD) for bare HH:MM:SS timestamps");

  TrainFlags train_flags;
  add_train_options(app, train_flags);

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "Align channel and QoE logs into a dataset");
  ingest_cmd->add_option("--channel", ingest_args.channel_path, "Channel-metric CSV")->required();
  ingest_cmd->add_option("--qoe", ingest_args.qoe_path, "QoE CSV")->required();
  ingest_cmd->add_option("--out", ingest_args.out_path, "Aligned dataset CSV path")->required();
  ingest_cmd->add_option("--report", ingest_args.report_path,
                         "Parse/alignment report path (default: <out>.report.json)");
  ingest_cmd->add_option("--channel-time-col", ingest_args.channel_time_col, "Timestamp column name");
  ingest_cmd->add_option("--channel-rsrp-col", ingest_args.channel_rsrp_col, "RSRP column name");
  ingest_cmd->add_option("--channel-rsrq-col", ingest_args.channel_rsrq_col, "RSRQ column name");
  ingest_cmd->add_option("--channel-snr-col", ingest_args.channel_snr_col, "SNR column name");
  ingest_cmd->add_option("--qoe-time-col", ingest_args.qoe_time_col, "QoE timestamp column name");
  ingest_cmd->add_option("--qoe-quality-col", ingest_args.qoe_quality_col, "Quality column name");
  ingest_cmd->add_option("--qoe-bytes-col", ingest_args.qoe_bytes_col, "Video bytes column name");
  ingest_cmd->add_option("--qoe-loaded-col", ingest_args.qoe_loaded_col, "Loaded percent column name");

  std::string correlate_data;
  auto* correlate_cmd =
      app.add_subcommand("correlate", "Spearman correlation of each metric vs resolution");
  correlate_cmd->add_option("--data", correlate_data, "Aligned dataset CSV")->required();

  std::string train_data, train_model, train_out;
  auto* train_cmd = app.add_subcommand("train", "Fit a classifier and save it");
  train_cmd->add_option("--data", train_data, "Aligned dataset CSV")->required();
  train_cmd->add_option("--model", train_model, "Classifier kind")->required();
  train_cmd->add_option("--out", train_out, "Model file path (.qsm)")->required();

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Cross-validate classifiers and render tables");
  eval_cmd->add_option("--data", eval_args.data_path, "Aligned dataset CSV")->required();
  eval_cmd->add_option("--model", eval_args.model_name, "Classifier kind");
  eval_cmd->add_flag("--all", eval_args.all, "Evaluate all eight classifiers");
  eval_cmd->add_option("--k", eval_args.k, "Cross-validation folds")->capture_default_str();
  eval_cmd->add_option("--holdout-fraction", eval_args.holdout_fraction,
                       "Held-out share for the confusion matrix")
      ->capture_default_str();
  eval_cmd->add_option("--averaging", eval_args.averaging, "Table averaging: weighted or macro")
      ->capture_default_str();
  eval_cmd->add_option("--out-dir", eval_args.out_dir, "Directory for reports, CSVs and heatmaps");

  std::string predict_model;
  double predict_rsrp = 0.0, predict_rsrq = 0.0, predict_snr = 0.0;
  auto* predict_cmd = app.add_subcommand("predict", "Classify a single channel measurement");
  predict_cmd->add_option("--model", predict_model, "Model file (.qsm)")->required();
  predict_cmd->add_option("--rsrp", predict_rsrp, "RSRP in dBm")->required();
  predict_cmd->add_option("--rsrq", predict_rsrq, "RSRQ in dB")->required();
  predict_cmd->add_option("--snr", predict_snr, "SNR in dB")->required();

  StreamArgs stream_args;
  auto* stream_cmd =
      app.add_subcommand("stream", "Continuously classify channel-log rows as JSON lines");
  stream_cmd->add_option("--model", stream_args.model_path, "Model file (.qsm)")->required();
  stream_cmd->add_option("--input", stream_args.input, "Input CSV path, or - for stdin")
      ->capture_default_str();
  stream_cmd->add_flag("--header", stream_args.header, "First input line is a header row");

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Render a saved evaluation report");
  report_cmd->add_option("--input", report_args.input, "Evaluation report JSON")->required();
  report_cmd->add_option("--svg", report_args.svg_path, "Write the confusion heatmap here");
  report_cmd->add_option("--averaging", report_args.averaging, "weighted or macro")
      ->capture_default_str();

  int rc = 0;
  ingest_cmd->callback([&] { rc = run_ingest(global, ingest_args); });
  correlate_cmd->callback([&] { rc = run_correlate(global, correlate_data); });
  train_cmd->callback([&] { rc = run_train(global, train_flags, train_data, train_model, train_out); });
  eval_cmd->callback([&] { rc = run_evaluate(global, train_flags, eval_args); });
  predict_cmd->callback([&] { rc = run_predict(predict_model, predict_rsrp, predict_rsrq, predict_snr); });
  stream_cmd->callback([&] { rc = run_stream_cmd(global, stream_args); });
  report_cmd->callback([&] { rc = run_report(global, report_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PersistError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
