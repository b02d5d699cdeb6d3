#pragma once

// Built-in datasets, named deletion scenarios and the JSON harness config.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "erasure/experiment.hpp"

namespace erasure {

/// $ERASURE_BENCH_DATA_DIR when set, else the directory fixed at build time.
std::filesystem::path data_directory();

/// File of a dataset spec; relative paths resolve against data_directory().
std::filesystem::path dataset_path(const DatasetSpec& spec);

std::vector<std::string> builtin_dataset_ids();

/// Spec for adult, cahousing, cmc or mgm; throws UsageError otherwise.
DatasetSpec builtin_dataset(const std::string& id);

/// Builds a spec for a CSV file outside the built-in set. A column is numeric
/// when every non-missing value parses as a number; the target is always
/// categorical. `features` defaults to every non-target column.
DatasetSpec infer_dataset(const std::filesystem::path& file, const std::string& target,
                          const std::vector<std::string>& features = {},
                          const std::optional<std::string>& positive_class = std::nullopt);

struct ScenarioPreset {
  std::string name;
  std::string description;
  DeletionScenario scenario;
};

/// Scenarios used in the bias comparisons of each built-in dataset. Every
/// dataset also accepts "random".
std::vector<ScenarioPreset> scenario_presets(const std::string& dataset_id);

/// Throws UsageError on an unknown name.
DeletionScenario scenario_preset(const std::string& dataset_id, const std::string& name);

/// Fills in the dataset's ordinal ranks for positive_numeric scenarios on
/// categorical attributes that carry none.
void attach_ordinals(DeletionScenario& s, const DatasetSpec& d);

/// "start:stop:step" in percent, both ends inclusive, as fractions. A single
/// number gives a one-point grid.
std::vector<double> parse_percent_range(const std::string& text);

/// Reads a harness config. See README for the format.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of the fully resolved config (sorted keys, dataset spelled
/// out). Worker thread counts are left out since they do not change results.
std::string config_to_json(const ExperimentConfig& cfg);

/// FNV-1a 64 of config_to_json, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// FNV-1a 64 over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

/// "fnv1a64:<hex>" digest of a file's contents.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace erasure
