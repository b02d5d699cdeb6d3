#pragma once

// Sweep orchestration: preprocess, baseline, deletion, measurement.
//
// For repetition r the deletion seed is scenario.seed + r, the split seed is
// split_seed + r and the model seed is hyperparams.model_seed + r. The
// feature encoding is fitted once on the undeleted dataset and reused at
// every deletion percentage.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erasure/classifiers.hpp"
#include "erasure/dataset.hpp"
#include "erasure/deletion.hpp"
#include "erasure/metrics.hpp"

namespace erasure {

/// A dataset known to the harness: file, schema and preprocessing.
struct DatasetSpec {
  std::string id;
  /// Relative paths resolve against the data directory.
  std::filesystem::path file;
  Schema schema;
  PreprocessConfig preprocess;
  Averaging averaging = Averaging::macro;
  /// Ordinal ranks for categorical attributes used by positive_numeric deletion.
  std::map<std::string, std::map<std::string, double>> ordinals;
};

/// Default grid 0.00, 0.05, ..., 0.95.
std::vector<double> default_percentages();

struct ExperimentConfig {
  DatasetSpec dataset;
  DeletionScenario scenario;
  std::vector<ClassifierKind> classifiers{ClassifierKind::knn, ClassifierKind::svm_linear,
                                          ClassifierKind::random_forest, ClassifierKind::gbt};
  Hyperparams hyperparams;
  std::vector<double> percentages = default_percentages();
  std::uint64_t split_seed = 0;
  int repetitions = 1;
  double train_fraction = 0.7;
  /// Split the undeleted data once and delete from the training part only.
  bool fixed_test = false;
  /// Sweep workers; 0 = hardware concurrency.
  unsigned threads = 0;

  /// Throws UsageError when the configuration is inconsistent.
  void validate() const;
};

enum class Metric { accuracy, precision, recall, f1 };
std::string to_string(Metric m);
Metric parse_metric(const std::string& text);
double metric_value(const MetricsReport& r, Metric m);

struct ResultRow {
  std::string dataset;
  std::string classifier;
  std::string scenario;
  double percentage = 0.0;
  std::uint64_t seed = 0;
  MetricsReport metrics;
  std::size_t n_remaining = 0;
  std::vector<std::string> warnings;

  friend bool operator==(const ResultRow& a, const ResultRow& b);
};

struct SweepResult {
  std::string dataset;
  std::string scenario;
  Averaging averaging = Averaging::macro;
  /// Ordered by classifier (configuration order, zero_rule last), percentage, seed.
  std::vector<ResultRow> rows;
  std::size_t feature_dimension = 0;
  /// Set when the sweep stopped because too few records remained.
  bool truncated = false;
};

/// Minimum surviving records for a sweep cell to run.
inline constexpr std::size_t kMinimumRecords = 10;

/// Percentage-0 rows for every configured classifier plus zero_rule, one per
/// repetition, trained on the undeleted data.
std::vector<ResultRow> run_baseline(const ExperimentConfig& cfg, const Dataset& raw);
std::vector<ResultRow> run_baseline(const ExperimentConfig& cfg);

/// Baseline rows plus one row per (classifier, percentage, repetition).
/// Percentage 0 rows are the baseline rows.
SweepResult run_sweep(const ExperimentConfig& cfg, const Dataset& raw);
SweepResult run_sweep(const ExperimentConfig& cfg);

/// Loads the configured dataset from disk.
Dataset load_dataset(const DatasetSpec& spec);

struct DiffRow {
  std::string classifier;
  double percentage = 0.0;
  double difference = 0.0;
};

/// Per (classifier, percentage): mean over seeds of `metric` in a minus the
/// same mean in b. Throws Error unless both share dataset and grid.
std::vector<DiffRow> diff_series(const SweepResult& a, const SweepResult& b, Metric metric);

}  // namespace erasure
