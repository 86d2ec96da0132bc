#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "qshift/learners/train.hpp"
#include "qshift/persist.hpp"

#include "fixtures.hpp"

using namespace qshift;
using Catch::Matchers::WithinAbs;

namespace {

double training_accuracy(const learn::Model& m, const Dataset& d) {
  std::size_t correct = 0;
  for (const auto& r : d.rows()) correct += m.predict(r.features()) == r.klass();
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

/// Constant-probability model: gradient boosting with zero rounds predicts
/// sigmoid(prior log-odds) = the class prior, everywhere.
learn::ModelPtr constant_model(double prior, std::uint64_t seed = 0) {
  std::vector<LabeledRecord> rows;
  int highs = static_cast<int>(prior * 10.0 + 0.5);
  for (int i = 0; i < 10; ++i)
    rows.push_back(test::row(i, -100 + i, -12, 3 + i, i < highs ? "1080p" : "360p"));
  learn::GbtConfig cfg;
  cfg.rounds = 0;
  return learn::fit_gradient_boosting(Dataset(rows, Provenance{}), cfg, seed);
}

}  // namespace

TEST_CASE("zero boosting rounds predict the class prior") {
  auto balanced = constant_model(0.5);
  CHECK(balanced->predict_proba({-100, -12, 5}) == 0.5);

  auto skew = constant_model(0.8);
  for (double snr : {-10.0, 0.0, 30.0})
    CHECK_THAT(skew->predict_proba({-90, -10, snr}), WithinAbs(0.8, 1e-12));
}

TEST_CASE("gradient boosting separates D_SEP and its loss never rises") {
  auto d = test::make_dsep();
  auto model = learn::fit_gradient_boosting(d, {}, 1);
  CHECK(training_accuracy(*model, d) == 1.0);
  const auto& trace = model->loss_trace();
  REQUIRE(trace.size() == 101);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
}

TEST_CASE("gradient boosting handles the xor fixture") {
  auto d = test::make_ddiag();
  auto model = learn::fit_gradient_boosting(d, {}, 1);
  CHECK(training_accuracy(*model, d) == 1.0);
}

TEST_CASE("stacking separates D_SEP even with tiny internal folds") {
  auto d = test::make_dsep();
  learn::TrainConfig cfg;
  cfg.seed = 42;
  auto model = learn::fit_stacking(d, cfg);
  CHECK(training_accuracy(*model, d) == 1.0);
  CHECK(model->bases().size() == 5);
  CHECK(model->meta().weights.size() == 5);
}

TEST_CASE("constant bases reduce the stacking meta-model to the class prior") {
  // 5 High / 15 Low: every stratified internal training part holds exactly
  // 4 High / 12 Low, so a prior-predicting base emits one constant value and
  // the meta input degenerates.
  std::vector<LabeledRecord> rows;
  for (int i = 0; i < 20; ++i)
    rows.push_back(test::row(i, -100 + (i % 7), -12, 3 + (i % 5), i < 5 ? "1080p" : "360p"));
  Dataset d(rows, Provenance{});

  learn::TrainConfig cfg;
  cfg.seed = 9;
  cfg.gbt.rounds = 0;  // every base collapses to the prior
  cfg.stacking_bases = {learn::ModelKind::GradientBoosting, learn::ModelKind::GradientBoosting};
  auto model = learn::fit_stacking(d, cfg);
  for (double snr : {0.0, 10.0, 44.0})
    CHECK_THAT(model->predict_proba({-95, -11, snr}), WithinAbs(0.25, 1e-3));
}

TEST_CASE("dropping a base model narrows the meta-features") {
  auto d = test::make_synthetic(100, 4);
  learn::TrainConfig cfg;
  cfg.seed = 5;
  cfg.stacking_bases = {learn::ModelKind::DecisionTree, learn::ModelKind::RandomForest,
                        learn::ModelKind::LogisticRegression, learn::ModelKind::LinearSvm};
  auto model = learn::fit_stacking(d, cfg);
  CHECK(model->bases().size() == 4);
  CHECK(model->meta().weights.size() == 4);
}

TEST_CASE("stacking preconditions") {
  learn::TrainConfig cfg;
  CHECK_THROWS_AS(learn::fit_stacking(test::make_dconst(), cfg), DomainError);

  std::vector<LabeledRecord> tiny{test::row(0, -100, -12, 3, "360p"),
                                  test::row(1, -100, -12, 9, "1080p"),
                                  test::row(2, -100, -12, 10, "1080p")};
  CHECK_THROWS_AS(learn::fit_stacking(Dataset(tiny, Provenance{}), cfg), DomainError);

  learn::TrainConfig nested;
  nested.stacking_bases = {learn::ModelKind::SoftVoting};
  CHECK_THROWS_AS(learn::fit_stacking(test::make_dsep(), nested), DomainError);
}

TEST_CASE("a single voting member passes through unchanged") {
  auto d = test::make_dsep();
  learn::TrainConfig cfg;
  cfg.seed = 3;
  cfg.voting_members = {learn::ModelKind::GradientBoosting};
  auto vote = learn::fit_voting(d, cfg);
  auto solo = learn::fit_gradient_boosting(d, cfg.gbt, derive_seed(cfg.seed, 0));
  for (const auto& r : d.rows())
    CHECK(vote->predict_proba(r.features()) == solo->predict_proba(r.features()));
}

TEST_CASE("voting averages probabilities and ties go High") {
  std::vector<learn::ModelPtr> members{constant_model(0.2), constant_model(0.8)};
  learn::VotingModel vote(members, 0);
  CHECK_THAT(vote.predict_proba({-100, -12, 5}), WithinAbs(0.5, 1e-12));
  CHECK(vote.predict({-100, -12, 5}) == BinaryClass::High);
}

TEST_CASE("the full soft-voting ensemble separates D_SEP") {
  auto d = test::make_dsep();
  learn::TrainConfig cfg;
  cfg.seed = 42;
  auto model = learn::fit_voting(d, cfg);
  CHECK(model->members().size() == 5);
  CHECK(training_accuracy(*model, d) == 1.0);
}

TEST_CASE("voting rejects an empty member list") {
  CHECK_THROWS_AS(learn::VotingModel({}, 0), DomainError);
  learn::TrainConfig cfg;
  cfg.voting_members = {};
  CHECK_THROWS_AS(learn::fit_voting(test::make_dsep(), cfg), DomainError);
}

TEST_CASE("ensemble fits are seed-deterministic down to the serialized bytes") {
  auto d = test::make_synthetic(80, 6);
  learn::TrainConfig cfg;
  cfg.seed = 31;
  cfg.rf.n_trees = 10;
  cfg.gbt.rounds = 10;
  cfg.mlp.epochs = 50;
  for (auto kind : {learn::ModelKind::Stacking, learn::ModelKind::SoftVoting}) {
    auto a = learn::fit_model(kind, d, cfg);
    auto b = learn::fit_model(kind, d, cfg);
    std::ostringstream sa, sb;
    persist::save_model(*a, sa);
    persist::save_model(*b, sb);
    CHECK(sa.str() == sb.str());
  }
}
