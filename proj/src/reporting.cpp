#include "erasure/reporting.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "erasure/config.hpp"
#include "erasure/csv.hpp"
#include "erasure/error.hpp"

#ifndef ERASURE_VERSION
#define ERASURE_VERSION "0.0.0"
#endif

namespace erasure {
namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t begin = 0;
  while (true) {
    const auto end = text.find(sep, begin);
    out.push_back(text.substr(begin, end == std::string::npos ? std::string::npos : end - begin));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return out;
}

std::string sigma_tag(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", sigma);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw Error("write to '" + path.string() + "' failed");
  written.push_back(path);
}

std::string series_csv(const std::vector<SeriesPoint>& series) {
  std::ostringstream out;
  out << "classifier,percentage,mean,stddev,seeds\n";
  for (const auto& p : series) {
    csv::write_row(out, {p.classifier, format_double(p.percentage), format_double(p.mean),
                         format_double(p.stddev), std::to_string(p.seeds)});
  }
  return out.str();
}

std::string diff_csv(const std::vector<DiffRow>& rows) {
  std::ostringstream out;
  out << "classifier,percentage,difference\n";
  for (const auto& d : rows) {
    csv::write_row(out, {d.classifier, format_double(d.percentage), format_double(d.difference)});
  }
  return out.str();
}

/// Applies `fn` to each run of consecutive entries sharing a classifier.
template <typename T, typename Fn>
void per_classifier(std::vector<T>& rows, Fn&& fn) {
  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin;
    while (end < rows.size() && rows[end].classifier == rows[begin].classifier) ++end;
    fn(begin, end);
    begin = end;
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    csv::write_row(out, {r.dataset, r.classifier, r.scenario, format_double(r.percentage), std::to_string(r.seed),
                         format_double(r.metrics.accuracy), format_double(r.metrics.precision),
                         format_double(r.metrics.recall), format_double(r.metrics.f1),
                         std::to_string(r.n_remaining), join(r.warnings, ';')});
  }
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_results_csv(out, rows);
  return out.str();
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  csv::Reader reader(in);
  csv::Row row;
  if (!reader.next(row) || join(row, ',') != kResultsHeader) {
    throw Error("'" + path.string() + "' is not a results file (unexpected header)");
  }
  const auto number = [&](const std::string& token) {
    const auto v = csv::parse_number(token);
    if (!v) {
      throw Error("'" + path.string() + "' line " + std::to_string(reader.line()) + ": bad number '" + token + "'");
    }
    return *v;
  };
  std::vector<ResultRow> out;
  while (reader.next(row)) {
    if (row.size() != 11) {
      throw Error("'" + path.string() + "' line " + std::to_string(reader.line()) + ": expected 11 fields");
    }
    ResultRow r;
    r.dataset = row[0];
    r.classifier = row[1];
    r.scenario = row[2];
    r.percentage = number(row[3]);
    r.seed = static_cast<std::uint64_t>(std::stoull(row[4]));
    r.metrics.accuracy = number(row[5]);
    r.metrics.precision = number(row[6]);
    r.metrics.recall = number(row[7]);
    r.metrics.f1 = number(row[8]);
    r.n_remaining = static_cast<std::size_t>(number(row[9]));
    r.warnings = split(row[10], ';');
    out.push_back(std::move(r));
  }
  return out;
}

SweepResult sweep_from_rows(std::vector<ResultRow> rows) {
  SweepResult sr;
  if (!rows.empty()) {
    sr.dataset = rows.front().dataset;
    sr.scenario = rows.front().scenario;
  }
  sr.rows = std::move(rows);
  return sr;
}

RunManifest make_manifest(const ExperimentConfig& cfg, const std::filesystem::path& dataset_file) {
  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.version = ERASURE_VERSION;
  if (!dataset_file.empty()) m.dataset_checksums[cfg.dataset.id] = file_checksum(dataset_file);
  m.seeds["deletion"] = cfg.scenario.seed;
  m.seeds["split"] = cfg.split_seed;
  m.seeds["model"] = cfg.hyperparams.model_seed;
  m.seeds["repetitions"] = static_cast<std::uint64_t>(cfg.repetitions);
  m.timestamp = utc_now();
  m.config_json = config_to_json(cfg);
  return m;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["dataset_checksums"] = m.dataset_checksums;
  j["seeds"] = m.seeds;
  j["timestamp"] = m.timestamp;
  if (!m.config_json.empty()) j["config"] = nlohmann::json::parse(m.config_json);
  return j.dump(2) + "\n";
}

std::vector<SeriesPoint> metric_series(const SweepResult& sr, Metric metric) {
  std::vector<SeriesPoint> out;
  std::vector<std::vector<double>> samples;
  // rows are sorted by classifier, percentage, seed
  for (const auto& row : sr.rows) {
    if (row.classifier == "zero_rule") continue;
    if (out.empty() || out.back().classifier != row.classifier || out.back().percentage != row.percentage) {
      out.push_back({row.classifier, row.percentage, 0.0, 0.0, 0});
      samples.emplace_back();
    }
    samples.back().push_back(metric_value(row.metrics, metric));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& s = samples[i];
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    double ss = 0.0;
    for (double v : s) ss += (v - mean) * (v - mean);
    out[i].mean = mean;
    out[i].stddev = s.size() > 1 ? std::sqrt(ss / static_cast<double>(s.size() - 1)) : 0.0;
    out[i].seeds = s.size();
  }
  return out;
}

std::vector<SeriesPoint> smooth_series(const std::vector<SeriesPoint>& series, double sigma) {
  auto out = series;
  per_classifier(out, [&](std::size_t b, std::size_t e) {
    std::vector<double> v;
    for (std::size_t i = b; i < e; ++i) v.push_back(out[i].mean);
    const auto s = gaussian_smooth(v, sigma);
    for (std::size_t i = b; i < e; ++i) out[i].mean = s[i - b];
  });
  return out;
}

std::vector<DiffRow> smooth_series(const std::vector<DiffRow>& series, double sigma) {
  auto out = series;
  per_classifier(out, [&](std::size_t b, std::size_t e) {
    std::vector<double> v;
    for (std::size_t i = b; i < e; ++i) v.push_back(out[i].difference);
    const auto s = gaussian_smooth(v, sigma);
    for (std::size_t i = b; i < e; ++i) out[i].difference = s[i - b];
  });
  return out;
}

std::vector<std::filesystem::path> emit_results(const SweepResult& sr, const RunManifest& manifest,
                                                const std::filesystem::path& out_dir,
                                                const EmitOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create '" + out_dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  write_file(out_dir / "results.csv", results_csv(sr.rows), written);
  write_file(out_dir / "manifest.json", manifest_json(manifest), written);

  const auto series = metric_series(sr, Metric::f1);
  std::vector<DiffRow> vs_baseline;
  {
    auto copy = series;
    per_classifier(copy, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        vs_baseline.push_back({copy[i].classifier, copy[i].percentage, copy[i].mean - copy[b].mean});
      }
    });
  }
  std::vector<std::pair<std::string, std::vector<DiffRow>>> diffs{{"baseline", vs_baseline}};
  for (const auto& [name, other] : options.comparisons) diffs.emplace_back(name, diff_series(sr, other, Metric::f1));

  write_file(out_dir / "plot_f1.csv", series_csv(series), written);
  for (const auto& [name, rows] : diffs) write_file(out_dir / ("plot_f1_diff_" + name + ".csv"), diff_csv(rows), written);
  for (double sigma : options.smooth_sigmas) {
    const auto tag = "_smooth_s" + sigma_tag(sigma) + ".csv";
    write_file(out_dir / ("plot_f1" + tag), series_csv(smooth_series(series, sigma)), written);
    for (const auto& [name, rows] : diffs) {
      write_file(out_dir / ("plot_f1_diff_" + name + tag), diff_csv(smooth_series(rows, sigma)), written);
    }
  }
  return written;
}

}  // namespace erasure
