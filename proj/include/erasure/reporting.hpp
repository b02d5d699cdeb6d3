#pragma once

// Result files: results.csv, manifest.json and plot-data CSVs.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "erasure/experiment.hpp"

namespace erasure {

/// printf "%.9g"; every float written to a result file goes through this.
std::string format_double(double v);

inline constexpr const char* kResultsHeader =
    "dataset,classifier,scenario,percentage,seed,accuracy,precision,recall,f1,n_remaining,warnings";

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::string results_csv(const std::vector<ResultRow>& rows);

/// Parses a results.csv back into rows. Throws Error on a malformed file.
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

/// Groups loaded rows into a sweep (dataset and scenario from the first row).
SweepResult sweep_from_rows(std::vector<ResultRow> rows);

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::map<std::string, std::string> dataset_checksums;
  std::map<std::string, std::uint64_t> seeds;
  std::string timestamp;  // UTC, ISO 8601
  std::string config_json;
};

/// Manifest for a run on `dataset_file`; the timestamp is the current time.
RunManifest make_manifest(const ExperimentConfig& cfg, const std::filesystem::path& dataset_file);

std::string manifest_json(const RunManifest& m);

/// Mean and standard deviation over seeds of one metric, per classifier and
/// percentage. zero_rule is left out.
struct SeriesPoint {
  std::string classifier;
  double percentage = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t seeds = 0;
};
std::vector<SeriesPoint> metric_series(const SweepResult& sr, Metric metric);

/// Smooths each classifier's series along the percentage axis.
std::vector<SeriesPoint> smooth_series(const std::vector<SeriesPoint>& series, double sigma);
std::vector<DiffRow> smooth_series(const std::vector<DiffRow>& series, double sigma);

struct EmitOptions {
  std::vector<double> smooth_sigmas;
  /// Named comparison sweeps; each yields plot_f1_diff_<name>.csv.
  std::vector<std::pair<std::string, SweepResult>> comparisons;
};

/// Writes results.csv, manifest.json, plot_f1.csv, plot_f1_diff_baseline.csv,
/// one diff file per comparison, and _smooth_s<sigma> variants of each plot
/// file. Returns the paths written.
std::vector<std::filesystem::path> emit_results(const SweepResult& sr, const RunManifest& manifest,
                                                const std::filesystem::path& out_dir,
                                                const EmitOptions& options = {});

}  // namespace erasure
