#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "erasure/config.hpp"
#include "erasure/csv.hpp"
#include "erasure/reporting.hpp"
#include "support.hpp"

using namespace erasure;

namespace {

ResultRow row(const std::string& classifier, double p, std::uint64_t seed, double f1) {
  ResultRow r;
  r.dataset = "toy";
  r.classifier = classifier;
  r.scenario = "Random";
  r.percentage = p;
  r.seed = seed;
  r.metrics = {0.5 + f1 / 4, f1, f1 / 2, f1};
  r.n_remaining = static_cast<std::size_t>(100 - 100 * p);
  return r;
}

// 2 classifiers x 8 percentages x 3 seeds plus zero_rule
SweepResult toy_sweep() {
  SweepResult sr;
  sr.dataset = "toy";
  sr.scenario = "Random";
  for (const char* c : {"knn", "gbt"}) {
    for (int i = 0; i < 8; ++i) {
      for (std::uint64_t s = 0; s < 3; ++s) {
        const double f1 = (c[0] == 'k' ? 0.8 : 0.7) - 0.03 * i + 0.01 * static_cast<double>(s) + (i == 4 ? 0.05 : 0.0);
        sr.rows.push_back(row(c, i / 10.0, s, f1));
      }
    }
  }
  for (std::uint64_t s = 0; s < 3; ++s) sr.rows.push_back(row("zero_rule", 0.0, s, 0.0));
  return sr;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& p) {
  std::ifstream in(p);
  csv::Reader reader(in);
  std::vector<std::vector<std::string>> out;
  csv::Row r;
  while (reader.next(r)) out.push_back(r);
  return out;
}

}  // namespace

TEST(Reporting, FormatDouble) {
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(0.05), "0.05");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_double(0.1 + 0.2), "0.3");
  EXPECT_EQ(format_double(123456789.0), "123456789");
}

TEST(Reporting, ResultsHeaderAndRows) {
  auto r = row("knn", 0.25, 3, 0.5);
  r.warnings = {"missing_class=a", "missing_class=b"};
  const auto text = results_csv({r});
  EXPECT_EQ(text,
            "dataset,classifier,scenario,percentage,seed,accuracy,precision,recall,f1,n_remaining,warnings\n"
            "toy,knn,Random,0.25,3,0.625,0.5,0.25,0.5,75,missing_class=a;missing_class=b\n");
}

TEST(Reporting, RoundTrip) {
  auto sr = toy_sweep();
  sr.rows[0].scenario = "Marital Status [married-civ-spouse, never-married]";
  sr.rows[1].warnings = {"missing_class=x"};
  test::TempDir dir;
  const auto p = dir.write("results.csv", results_csv(sr.rows));
  const auto back = read_results_csv(p);
  ASSERT_EQ(back.size(), sr.rows.size());
  // values survive to 9 significant digits
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].scenario, sr.rows[i].scenario);
    EXPECT_EQ(back[i].warnings, sr.rows[i].warnings);
    EXPECT_NEAR(back[i].metrics.f1, sr.rows[i].metrics.f1, 1e-9);
    EXPECT_EQ(back[i].n_remaining, sr.rows[i].n_remaining);
  }
  EXPECT_EQ(results_csv(back), results_csv(sr.rows));
  const auto loaded = sweep_from_rows(back);
  EXPECT_EQ(loaded.dataset, "toy");
}

TEST(Reporting, MalformedResultsFile) {
  test::TempDir dir;
  EXPECT_THROW(read_results_csv(dir.write("a.csv", "a,b\n1,2\n")), Error);
  EXPECT_THROW(read_results_csv(dir.write("b.csv", std::string(kResultsHeader) + "\ntoy,knn\n")), Error);
  EXPECT_THROW(read_results_csv(dir.write("c.csv", std::string(kResultsHeader) + "\ntoy,knn,R,x,0,1,1,1,1,5,\n")),
               Error);
  EXPECT_THROW(read_results_csv(dir.path() / "none.csv"), Error);
}

TEST(Reporting, MetricSeriesMeanAndSampleStd) {
  const auto series = metric_series(toy_sweep(), Metric::f1);
  ASSERT_EQ(series.size(), 16u);
  for (const auto& p : series) EXPECT_NE(p.classifier, "zero_rule");
  const auto& first = series[0];
  EXPECT_EQ(first.classifier, "knn");
  EXPECT_EQ(first.seeds, 3u);
  EXPECT_NEAR(first.mean, 0.81, 1e-12);
  EXPECT_NEAR(first.stddev, 0.01, 1e-12);
}

TEST(Reporting, SmoothedSeriesIsGaussianSmoothOfMeans) {
  const auto series = metric_series(toy_sweep(), Metric::f1);
  const auto smooth = smooth_series(series, 2.0);
  for (const char* c : {"knn", "gbt"}) {
    std::vector<double> means, got;
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i].classifier != c) continue;
      means.push_back(series[i].mean);
      got.push_back(smooth[i].mean);
    }
    const auto expect = gaussian_smooth(means, 2.0);
    ASSERT_EQ(got.size(), expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], expect[i]);
  }
}

TEST(Reporting, EmitWritesAllFiles) {
  const auto sr = toy_sweep();
  ExperimentConfig cfg;
  cfg.dataset = builtin_dataset("mgm");
  test::TempDir dir;
  const auto data = dir.write("data.csv", "x\n1\n");
  auto other = sr;
  for (auto& r : other.rows) r.metrics.f1 -= 0.1;
  EmitOptions opts;
  opts.smooth_sigmas = {2.0, 3.5};
  opts.comparisons = {{"random", other}};
  const auto out = dir.path() / "out";
  const auto written = emit_results(sr, make_manifest(cfg, data), out, opts);
  std::set<std::string> names;
  for (const auto& p : written) {
    EXPECT_TRUE(std::filesystem::exists(p));
    names.insert(p.filename().string());
  }
  EXPECT_EQ(names, (std::set<std::string>{"results.csv", "manifest.json", "plot_f1.csv",
                                          "plot_f1_diff_baseline.csv", "plot_f1_diff_random.csv",
                                          "plot_f1_smooth_s2.csv", "plot_f1_diff_baseline_smooth_s2.csv",
                                          "plot_f1_diff_random_smooth_s2.csv", "plot_f1_smooth_s3.5.csv",
                                          "plot_f1_diff_baseline_smooth_s3.5.csv",
                                          "plot_f1_diff_random_smooth_s3.5.csv"}));

  EXPECT_EQ(test::slurp(out / "results.csv"), results_csv(sr.rows));

  // the smoothed file holds gaussian_smooth of the plain series, sigma 2
  const auto plain = read_rows(out / "plot_f1.csv");
  const auto smooth = read_rows(out / "plot_f1_smooth_s2.csv");
  ASSERT_EQ(plain.size(), 17u);
  ASSERT_EQ(smooth.size(), 17u);
  EXPECT_EQ(plain[0], (std::vector<std::string>{"classifier", "percentage", "mean", "stddev", "seeds"}));
  const auto series = metric_series(sr, Metric::f1);
  std::vector<double> knn;
  for (const auto& p : series) {
    if (p.classifier == "knn") knn.push_back(p.mean);
  }
  const auto expect = gaussian_smooth(knn, 2.0);
  for (std::size_t i = 0; i < expect.size(); ++i) {
    EXPECT_EQ(smooth[i + 1][0], "knn");
    EXPECT_NEAR(std::stod(smooth[i + 1][2]), expect[i], 1e-8);
    EXPECT_NEAR(std::stod(plain[i + 1][2]), knn[i], 1e-8);
  }

  // difference to the classifier's own p = 0 mean
  const auto base = read_rows(out / "plot_f1_diff_baseline.csv");
  EXPECT_EQ(base[0], (std::vector<std::string>{"classifier", "percentage", "difference"}));
  EXPECT_EQ(base[1][2], "0");
  EXPECT_NEAR(std::stod(base[2][2]), knn[1] - knn[0], 1e-8);
  const auto rnd = read_rows(out / "plot_f1_diff_random.csv");
  EXPECT_NEAR(std::stod(rnd[1][2]), 0.1, 1e-8);
}

TEST(Reporting, Manifest) {
  ExperimentConfig cfg;
  cfg.dataset = builtin_dataset("cmc");
  cfg.scenario.seed = 12;
  cfg.split_seed = 4;
  cfg.repetitions = 5;
  test::TempDir dir;
  const auto data = dir.write("cmc.csv", "foobar");
  const auto m = make_manifest(cfg, data);
  EXPECT_EQ(m.config_hash, config_hash(cfg));
  EXPECT_EQ(m.dataset_checksums.at("cmc"), "fnv1a64:85944171f73967e8");
  const auto j = nlohmann::json::parse(manifest_json(m));
  EXPECT_EQ(j["config_hash"], m.config_hash);
  EXPECT_FALSE(j["version"].get<std::string>().empty());
  EXPECT_EQ(j["seeds"]["deletion"], 12);
  EXPECT_EQ(j["seeds"]["split"], 4);
  EXPECT_EQ(j["seeds"]["repetitions"], 5);
  EXPECT_EQ(j["config"]["dataset"]["id"], "cmc");
  const auto ts = j["timestamp"].get<std::string>();
  ASSERT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts[10], 'T');
  EXPECT_EQ(ts.back(), 'Z');
  EXPECT_EQ(make_manifest(cfg, data).config_hash, m.config_hash);
}

TEST(Reporting, BaselineOnlyGrid) {
  auto cfg = ExperimentConfig{};
  cfg.dataset.id = "synthetic";
  cfg.classifiers = {ClassifierKind::knn, ClassifierKind::svm_linear};
  cfg.percentages = {0.0};
  cfg.repetitions = 2;
  cfg.threads = 1;
  const auto sr = run_sweep(cfg, test::synthetic(80));
  const auto text = results_csv(sr.rows);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_NE(line.find(",0,"), std::string::npos) << line;
  }
  EXPECT_EQ(n, 6u);
}

TEST(Reporting, EmitIntoUnwritablePlaceFails) {
  test::TempDir dir;
  const auto blocker = dir.write("file", "x");
  EXPECT_THROW(emit_results(toy_sweep(), RunManifest{}, blocker / "sub"), Error);
}
