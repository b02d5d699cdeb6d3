#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "erasure/config.hpp"
#include "erasure/experiment.hpp"
#include "support.hpp"

using namespace erasure;

namespace {

ExperimentConfig synthetic_config() {
  ExperimentConfig cfg;
  cfg.dataset.id = "synthetic";
  cfg.dataset.preprocess.positive_class = "pos";
  cfg.dataset.averaging = Averaging::binary_positive_class;
  cfg.hyperparams.rf_trees = 10;
  cfg.hyperparams.gbt_rounds = 15;
  cfg.hyperparams.svm_epochs = 5;
  cfg.hyperparams.threads = 1;
  cfg.percentages = {0.0, 0.2, 0.4, 0.6};
  cfg.threads = 1;
  return cfg;
}

std::vector<ResultRow> only(const SweepResult& sr, const std::string& classifier) {
  std::vector<ResultRow> out;
  for (const auto& r : sr.rows) {
    if (r.classifier == classifier) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Experiment, GridIsComplete) {
  const auto raw = test::synthetic(200);
  auto cfg = synthetic_config();
  cfg.repetitions = 2;
  const auto sr = run_sweep(cfg, raw);
  EXPECT_EQ(sr.rows.size(), cfg.classifiers.size() * cfg.percentages.size() * 2 + 2);
  EXPECT_FALSE(sr.truncated);
  std::map<std::tuple<std::string, double, std::uint64_t>, int> seen;
  for (const auto& r : sr.rows) ++seen[{r.classifier, r.percentage, r.seed}];
  for (const auto& [key, count] : seen) EXPECT_EQ(count, 1);
  for (auto kind : cfg.classifiers) {
    for (double p : cfg.percentages) {
      for (std::uint64_t s : {0u, 1u}) EXPECT_EQ(seen.count({to_string(kind), p, s}), 1u);
    }
  }
  EXPECT_EQ(only(sr, "zero_rule").size(), 2u);
  EXPECT_EQ(sr.rows.back().classifier, "zero_rule");
}

TEST(Experiment, ZeroIsAddedToTheGrid) {
  const auto raw = test::synthetic(100);
  auto cfg = synthetic_config();
  cfg.classifiers = {ClassifierKind::knn};
  cfg.percentages = {0.3};
  const auto sr = run_sweep(cfg, raw);
  ASSERT_EQ(sr.rows.size(), 3u);
  EXPECT_EQ(sr.rows[0].percentage, 0.0);
  EXPECT_EQ(sr.rows[1].percentage, 0.3);
  EXPECT_EQ(sr.rows[2].classifier, "zero_rule");
}

TEST(Experiment, BaselineEqualsSweepAtZero) {
  const auto raw = test::synthetic(300);
  auto cfg = synthetic_config();
  cfg.repetitions = 2;
  cfg.scenario = DeletionScenario{};
  cfg.scenario.mode = DeletionMode::age;
  cfg.scenario.attribute = "age";
  const auto baseline = run_baseline(cfg, raw);
  const auto sr = run_sweep(cfg, raw);
  std::vector<ResultRow> at_zero;
  for (const auto& r : sr.rows) {
    if (r.percentage == 0.0) at_zero.push_back(r);
  }
  EXPECT_EQ(baseline, at_zero);
  EXPECT_EQ(baseline.size(), (cfg.classifiers.size() + 1) * 2);
}

TEST(Experiment, ZeroRuleMatchesMajorityOfTestSplit) {
  const auto raw = test::synthetic(257, 3);
  auto cfg = synthetic_config();
  cfg.classifiers = {ClassifierKind::knn};
  cfg.split_seed = 5;
  cfg.repetitions = 3;
  const auto rows = only(run_sweep(cfg, raw), "zero_rule");
  ASSERT_EQ(rows.size(), 3u);
  const auto& labels = raw.categorical("label");
  for (std::size_t r = 0; r < 3; ++r) {
    const auto split = train_test_split(raw.size(), 0.7, 5 + r);
    double train_pos = 0;
    for (auto i : split.train) train_pos += labels[i] == "pos";
    // ties go to the lower class index, "neg"
    const bool majority_pos = train_pos > static_cast<double>(split.train.size()) - train_pos;
    double test_pos = 0;
    for (auto i : split.test) test_pos += labels[i] == "pos";
    const double nt = static_cast<double>(split.test.size());
    const double share = (majority_pos ? test_pos : nt - test_pos) / nt;
    EXPECT_EQ(rows[r].metrics.accuracy, share);
    if (majority_pos) {
      EXPECT_DOUBLE_EQ(rows[r].metrics.precision, test_pos / nt);
      EXPECT_EQ(rows[r].metrics.recall, 1.0);
      EXPECT_DOUBLE_EQ(rows[r].metrics.f1, 2 * share / (1 + share));
    } else {
      EXPECT_EQ(rows[r].metrics.f1, 0.0);
    }
    EXPECT_EQ(rows[r].seed, r);
  }
}

TEST(Experiment, RemainingRecordsFollowDeletionCount) {
  const auto raw = test::synthetic(203);
  for (bool incremental : {false, true}) {
    auto cfg = synthetic_config();
    cfg.classifiers = {ClassifierKind::svm_linear};
    cfg.percentages = parse_percent_range("0:90:10");
    cfg.scenario.incremental = incremental;
    const auto rows = only(run_sweep(cfg, raw), "svm_linear");
    ASSERT_EQ(rows.size(), cfg.percentages.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double p = cfg.percentages[i];
      EXPECT_EQ(rows[i].percentage, p);
      EXPECT_EQ(rows[i].n_remaining, 203u - static_cast<std::size_t>(std::nearbyint(p * 203)));
      if (i > 0) EXPECT_LT(rows[i].n_remaining, rows[i - 1].n_remaining);
    }
  }
}

TEST(Experiment, Deterministic) {
  const auto raw = test::synthetic(150);
  auto cfg = synthetic_config();
  cfg.scenario.mode = DeletionMode::thirds;
  cfg.scenario.attribute = "x";
  cfg.repetitions = 2;
  const auto a = run_sweep(cfg, raw);
  const auto b = run_sweep(cfg, raw);
  EXPECT_EQ(a.rows, b.rows);
  cfg.threads = 3;
  cfg.hyperparams.threads = 2;
  EXPECT_EQ(run_sweep(cfg, raw).rows, a.rows);
  cfg.scenario.seed = 1;
  EXPECT_NE(run_sweep(cfg, raw).rows, a.rows);
}

TEST(Experiment, SeedsPerRepetition) {
  const auto raw = test::synthetic(120);
  auto cfg = synthetic_config();
  cfg.classifiers = {ClassifierKind::knn};
  cfg.scenario.seed = 40;
  cfg.repetitions = 3;
  std::set<std::uint64_t> seeds;
  for (const auto& r : run_sweep(cfg, raw).rows) seeds.insert(r.seed);
  EXPECT_EQ(seeds, (std::set<std::uint64_t>{40, 41, 42}));
}

TEST(Experiment, FrozenEncoding) {
  const auto raw = test::synthetic(100);
  const auto sr = run_sweep(synthetic_config(), raw);
  EXPECT_EQ(sr.feature_dimension, preprocess(raw, {}).dimension());
  EXPECT_EQ(sr.feature_dimension, 6u);
  EXPECT_EQ(sr.dataset, "synthetic");
  EXPECT_EQ(sr.scenario, "Random");
}

TEST(Experiment, StopsBelowMinimumRecords) {
  test::WarningLog log;
  const auto raw = test::synthetic(20);
  auto cfg = synthetic_config();
  cfg.classifiers = {ClassifierKind::knn};
  cfg.percentages = {0.0, 0.3, 0.6, 0.9};
  const auto sr = run_sweep(cfg, raw);
  EXPECT_TRUE(sr.truncated);
  EXPECT_TRUE(log.contains("fewer than 10 records"));
  std::set<double> ps;
  for (const auto& r : sr.rows) ps.insert(r.percentage);
  EXPECT_EQ(ps, (std::set<double>{0.0, 0.3}));
}

TEST(Experiment, MissingClassIsFlagged) {
  auto base = test::synthetic(60);
  auto labels = base.categorical("label");
  labels[17] = "rare";
  std::vector<ColumnValues> cols{base.numeric("x"), base.numeric("y"), base.numeric("age"),
                                 base.categorical("group"), labels};
  const Dataset raw(base.schema(), cols, base.row_ids());
  std::uint64_t seed = 0;
  for (;; ++seed) {
    const auto split = train_test_split(raw.size(), 0.7, seed);
    if (std::find(split.test.begin(), split.test.end(), 17u) != split.test.end()) break;
  }
  auto cfg = synthetic_config();
  cfg.classifiers = {ClassifierKind::knn};
  cfg.percentages = {0.0};
  cfg.split_seed = seed;
  const auto rows = run_sweep(cfg, raw).rows;
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_EQ(r.warnings, std::vector<std::string>{"missing_class=rare"});
}

TEST(Experiment, FixedTestDeletesFromTrainingOnly) {
  const auto raw = test::synthetic(200);
  auto cfg = synthetic_config();
  cfg.classifiers = {ClassifierKind::knn};
  cfg.fixed_test = true;
  cfg.percentages = {0.0, 0.5, 0.9};
  const auto rows = only(run_sweep(cfg, raw), "knn");
  ASSERT_EQ(rows.size(), 3u);
  const std::size_t train = 140;
  for (const auto& r : rows) {
    EXPECT_EQ(r.n_remaining, 200u - static_cast<std::size_t>(std::nearbyint(r.percentage * train)));
  }
  // p = 0 is the same computation with or without the flag
  auto plain = cfg;
  plain.fixed_test = false;
  EXPECT_EQ(only(run_sweep(plain, raw), "knn").front(), rows.front());
}

TEST(Experiment, DiffSeries) {
  const auto raw = test::synthetic(150);
  auto cfg = synthetic_config();
  cfg.classifiers = {ClassifierKind::knn, ClassifierKind::gbt};
  cfg.repetitions = 2;
  const auto a = run_sweep(cfg, raw);
  const auto same = diff_series(a, a, Metric::f1);
  ASSERT_EQ(same.size(), 2 * cfg.percentages.size() + 1);
  for (const auto& d : same) EXPECT_EQ(d.difference, 0.0);

  auto biased = cfg;
  biased.scenario.mode = DeletionMode::selection;
  biased.scenario.attribute = "label";
  biased.scenario.selected_values = {"pos"};
  const auto b = run_sweep(biased, raw);
  const auto diff = diff_series(b, a, Metric::accuracy);
  for (const auto& d : diff) {
    if (d.percentage == 0.0) EXPECT_EQ(d.difference, 0.0) << d.classifier;
  }
  // mean of a minus mean of b at one point, by hand
  double ma = 0, mb = 0;
  for (const auto& r : b.rows) {
    if (r.classifier == "gbt" && r.percentage == 0.4) ma += r.metrics.accuracy / 2;
  }
  for (const auto& r : a.rows) {
    if (r.classifier == "gbt" && r.percentage == 0.4) mb += r.metrics.accuracy / 2;
  }
  const auto it = std::find_if(diff.begin(), diff.end(),
                               [](const DiffRow& d) { return d.classifier == "gbt" && d.percentage == 0.4; });
  ASSERT_NE(it, diff.end());
  EXPECT_NEAR(it->difference, ma - mb, 1e-15);

  auto other_grid = cfg;
  other_grid.percentages = {0.0, 0.2};
  EXPECT_THROW(diff_series(a, run_sweep(other_grid, raw), Metric::f1), Error);
  auto other_data = a;
  other_data.dataset = "elsewhere";
  EXPECT_THROW(diff_series(a, other_data, Metric::f1), Error);
}

TEST(Experiment, Validation) {
  const auto raw = test::synthetic(50);
  auto cfg = synthetic_config();
  cfg.classifiers.push_back(ClassifierKind::zero_rule);
  EXPECT_THROW(run_sweep(cfg, raw), UsageError);
  cfg = synthetic_config();
  cfg.classifiers = {ClassifierKind::knn, ClassifierKind::knn};
  EXPECT_THROW(run_sweep(cfg, raw), UsageError);
  cfg = synthetic_config();
  cfg.classifiers.clear();
  EXPECT_THROW(run_sweep(cfg, raw), UsageError);
  cfg = synthetic_config();
  cfg.percentages = {0.2, 0.2};
  EXPECT_THROW(run_sweep(cfg, raw), UsageError);
  cfg = synthetic_config();
  cfg.percentages = {1.0};
  EXPECT_THROW(run_sweep(cfg, raw), UsageError);
  cfg = synthetic_config();
  cfg.repetitions = 0;
  EXPECT_THROW(run_sweep(cfg, raw), UsageError);
  cfg = synthetic_config();
  cfg.train_fraction = 1.0;
  EXPECT_THROW(run_sweep(cfg, raw), UsageError);
  cfg = synthetic_config();
  cfg.scenario.mode = DeletionMode::age;
  cfg.scenario.attribute = "height";
  EXPECT_THROW(run_sweep(cfg, raw), UsageError);
}

TEST(Experiment, Metrics) {
  for (auto m : {Metric::accuracy, Metric::precision, Metric::recall, Metric::f1}) {
    EXPECT_EQ(parse_metric(to_string(m)), m);
  }
  EXPECT_THROW(parse_metric("auc"), UsageError);
  const MetricsReport r{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(metric_value(r, Metric::recall), 0.3);
}

TEST(Experiment, AdultGbtBaselineBeatsZeroRule) {
  if (!test::have_data("adult.csv")) GTEST_SKIP() << "adult.csv not available";
  ExperimentConfig cfg;
  cfg.dataset = builtin_dataset("adult");
  cfg.classifiers = {ClassifierKind::gbt};
  const auto raw = load_csv(test::data_file("adult.csv"), cfg.dataset.schema);
  const auto rows = run_baseline(cfg, raw);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].classifier, "gbt");
  EXPECT_EQ(rows[1].classifier, "zero_rule");
  EXPECT_GT(rows[0].metrics.f1, rows[1].metrics.f1);
  EXPECT_GT(rows[0].metrics.f1, 0.6);
  EXPECT_EQ(rows[1].metrics.f1, 0.0);
  EXPECT_EQ(rows[0].n_remaining, 30162u);
}
