#pragma once

// Command-line front end of erasure_bench.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "erasure/experiment.hpp"

namespace erasure {

struct RunCommand {
  ExperimentConfig config;
  std::filesystem::path out_dir = "results";
  std::vector<double> smooth_sigmas;
  /// "random" and/or "non-incremental".
  std::vector<std::string> compare;
  /// Print the resolved config as JSON instead of running.
  bool dry_run = false;
};

struct DiffCommand {
  std::filesystem::path a;
  std::filesystem::path b;
  Metric metric = Metric::f1;
  std::optional<std::filesystem::path> out;
};

struct PresetsCommand {
  std::optional<std::string> dataset;
};

struct ParsedCli {
  enum class Kind { run, diff, presets, help } kind = Kind::help;
  RunCommand run;
  DiffCommand diff;
  PresetsCommand presets;
  /// Help or version text when kind == help.
  std::string text;
};

/// Parses argv. Throws UsageError on unknown flags, bad values and invalid
/// combinations such as --values outside selection mode. An empty command
/// line is a usage error carrying the usage text.
ParsedCli parse_cli(int argc, const char* const* argv);

/// Runs the tool. Returns 0 on success, 1 on a runtime failure, 2 on a usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace erasure
