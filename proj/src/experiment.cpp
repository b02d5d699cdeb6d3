#include "erasure/experiment.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "erasure/config.hpp"
#include "erasure/error.hpp"
#include "parallel.hpp"

namespace erasure {
namespace {

struct Job {
  int rep = 0;
  double percentage = 0.0;
  std::size_t grid_index = 0;
};

/// Rows of one (repetition, percentage) cell, or nothing when too few records survive.
struct Cell {
  std::vector<ResultRow> rows;
  bool skipped = false;
};

std::vector<double> grid_with_zero(const std::vector<double>& percentages) {
  std::vector<double> grid = percentages;
  if (grid.empty() || grid.front() != 0.0) grid.insert(grid.begin(), 0.0);
  return grid;
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, const Dataset& raw) : cfg_(cfg), raw_(raw) {
    cfg_.dataset.schema = raw.schema();
    cfg_.validate();
    enc_ = fit_encoding(raw, cfg.dataset.preprocess);
    full_ = encode(raw, enc_);
    for (std::size_t i = 0; i < full_.row_ids.size(); ++i) position_.emplace(full_.row_ids[i], i);
  }

  SweepResult run(const std::vector<double>& grid) {
    // plans per repetition; incremental plans share one order along the grid
    const auto reps = static_cast<std::size_t>(cfg_.repetitions);
    std::vector<DeletionPlan> plans(reps);
    std::vector<SplitIndices> fixed_splits(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      auto scenario = cfg_.scenario;
      scenario.seed = cfg_.scenario.seed + r;
      if (cfg_.fixed_test) {
        fixed_splits[r] = train_test_split(raw_.size(), cfg_.train_fraction, cfg_.split_seed + r);
        plans[r] = build_plan(raw_.take(fixed_splits[r].train), scenario, grid);
      } else {
        plans[r] = build_plan(raw_, scenario, grid);
      }
    }

    std::vector<Job> jobs;
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t g = 0; g < grid.size(); ++g) jobs.push_back({static_cast<int>(r), grid[g], g});
    }
    std::vector<Cell> cells(jobs.size());
    const unsigned workers = std::min<unsigned>(detail::resolve_threads(cfg_.threads),
                                                static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
    const unsigned model_threads = workers > 1 ? 1u : cfg_.hyperparams.threads;
    detail::parallel_for(jobs.size(), workers, [&](std::size_t j) {
      const auto& job = jobs[j];
      cells[j] = run_cell(job, plans[static_cast<std::size_t>(job.rep)].deleted[job.grid_index],
                          cfg_.fixed_test ? &fixed_splits[static_cast<std::size_t>(job.rep)] : nullptr,
                          model_threads);
    });

    SweepResult out;
    out.dataset = cfg_.dataset.id;
    out.scenario = cfg_.scenario.display_label();
    out.averaging = cfg_.dataset.averaging;
    out.feature_dimension = full_.dimension();
    for (auto& c : cells) {
      if (c.skipped) out.truncated = true;
      for (auto& row : c.rows) out.rows.push_back(std::move(row));
    }
    if (out.truncated) {
      warn("sweep stopped early: fewer than " + std::to_string(kMinimumRecords) + " records remain");
    }
    sort_rows(out.rows);
    return out;
  }

 private:
  Cell run_cell(const Job& job, const std::vector<std::size_t>& deleted, const SplitIndices* fixed,
                unsigned model_threads) const {
    Cell cell;
    std::vector<char> gone(full_.size(), 0);
    for (auto id : deleted) gone[position_.at(id)] = 1;

    PreparedDataset train;
    PreparedDataset test;
    std::size_t remaining = 0;
    if (fixed) {
      std::vector<std::size_t> keep;
      for (auto pos : fixed->train) {
        if (!gone[pos]) keep.push_back(pos);
      }
      remaining = keep.size() + fixed->test.size();
      if (keep.size() < kMinimumRecords) {
        cell.skipped = true;
        return cell;
      }
      train = full_.take(keep);
      test = full_.take(fixed->test);
    } else {
      std::vector<std::size_t> keep;
      keep.reserve(full_.size());
      for (std::size_t i = 0; i < full_.size(); ++i) {
        if (!gone[i]) keep.push_back(i);
      }
      remaining = keep.size();
      if (keep.size() < kMinimumRecords) {
        cell.skipped = true;
        return cell;
      }
      const auto split = train_test_split(keep.size(), cfg_.train_fraction,
                                          cfg_.split_seed + static_cast<std::uint64_t>(job.rep));
      std::vector<std::size_t> tr;
      std::vector<std::size_t> te;
      for (auto p : split.train) tr.push_back(keep[p]);
      for (auto p : split.test) te.push_back(keep[p]);
      train = full_.take(tr);
      test = full_.take(te);
    }

    std::vector<std::string> warnings;
    std::vector<char> present(enc_.class_names.size(), 0);
    for (int y : train.labels) present[static_cast<std::size_t>(y)] = 1;
    for (std::size_t k = 0; k < present.size(); ++k) {
      if (!present[k]) warnings.push_back("missing_class=" + enc_.class_names[k]);
    }

    auto kinds = cfg_.classifiers;
    if (job.percentage == 0.0) kinds.push_back(ClassifierKind::zero_rule);
    Hyperparams hp = cfg_.hyperparams;
    hp.model_seed = cfg_.hyperparams.model_seed + static_cast<std::uint64_t>(job.rep);
    hp.threads = model_threads;
    const int positive = enc_.positive_class.value_or(1);
    for (auto kind : kinds) {
      const auto model = fit(kind, train.features, train.labels, enc_.class_names, hp);
      const auto pred = model.predict(test.features);
      const auto cs = confusion(test.labels, pred, enc_.class_names.size());
      ResultRow row;
      row.dataset = cfg_.dataset.id;
      row.classifier = to_string(kind);
      row.scenario = cfg_.scenario.display_label();
      row.percentage = job.percentage;
      row.seed = cfg_.scenario.seed + static_cast<std::uint64_t>(job.rep);
      row.metrics = compute_metrics(cs, cfg_.dataset.averaging, positive);
      row.n_remaining = remaining;
      row.warnings = warnings;
      cell.rows.push_back(std::move(row));
    }
    return cell;
  }

  void sort_rows(std::vector<ResultRow>& rows) const {
    std::map<std::string, std::size_t> order;
    for (std::size_t i = 0; i < cfg_.classifiers.size(); ++i) order.emplace(to_string(cfg_.classifiers[i]), i);
    order.emplace(to_string(ClassifierKind::zero_rule), cfg_.classifiers.size());
    std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
      const auto ka = order.at(a.classifier);
      const auto kb = order.at(b.classifier);
      if (ka != kb) return ka < kb;
      if (a.percentage != b.percentage) return a.percentage < b.percentage;
      return a.seed < b.seed;
    });
  }

  ExperimentConfig cfg_;
  const Dataset& raw_;
  Encoding enc_;
  PreparedDataset full_;
  std::unordered_map<std::size_t, std::size_t> position_;
};

}  // namespace

std::vector<double> default_percentages() {
  std::vector<double> out;
  for (int i = 0; i < 20; ++i) out.push_back(i * 5 / 100.0);
  return out;
}

void ExperimentConfig::validate() const {
  if (dataset.id.empty()) throw UsageError("dataset id is empty");
  scenario.validate(dataset.schema);
  if (classifiers.empty()) throw UsageError("no classifiers configured");
  std::set<ClassifierKind> seen;
  for (auto k : classifiers) {
    if (k == ClassifierKind::zero_rule) {
      throw UsageError("zero_rule is always part of the baseline; do not list it");
    }
    if (!seen.insert(k).second) throw UsageError("classifier '" + to_string(k) + "' listed twice");
  }
  hyperparams.validate();
  validate_percentages(percentages);
  if (repetitions < 1) throw UsageError("repetitions must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw UsageError("train fraction must lie in (0, 1)");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::accuracy: return "accuracy";
    case Metric::precision: return "precision";
    case Metric::recall: return "recall";
    case Metric::f1: return "f1";
  }
  return "?";
}

Metric parse_metric(const std::string& text) {
  if (text == "accuracy") return Metric::accuracy;
  if (text == "precision") return Metric::precision;
  if (text == "recall") return Metric::recall;
  if (text == "f1") return Metric::f1;
  throw UsageError("unknown metric '" + text + "'");
}

double metric_value(const MetricsReport& r, Metric m) {
  switch (m) {
    case Metric::accuracy: return r.accuracy;
    case Metric::precision: return r.precision;
    case Metric::recall: return r.recall;
    case Metric::f1: return r.f1;
  }
  return 0.0;
}

bool operator==(const ResultRow& a, const ResultRow& b) {
  return a.dataset == b.dataset && a.classifier == b.classifier && a.scenario == b.scenario &&
         a.percentage == b.percentage && a.seed == b.seed && a.metrics.accuracy == b.metrics.accuracy &&
         a.metrics.precision == b.metrics.precision && a.metrics.recall == b.metrics.recall &&
         a.metrics.f1 == b.metrics.f1 && a.n_remaining == b.n_remaining && a.warnings == b.warnings;
}

Dataset load_dataset(const DatasetSpec& spec) {
  return load_csv(dataset_path(spec), spec.schema);
}

std::vector<ResultRow> run_baseline(const ExperimentConfig& cfg, const Dataset& raw) {
  return Runner(cfg, raw).run({0.0}).rows;
}

std::vector<ResultRow> run_baseline(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_baseline(cfg, load_dataset(cfg.dataset));
}

SweepResult run_sweep(const ExperimentConfig& cfg, const Dataset& raw) {
  return Runner(cfg, raw).run(grid_with_zero(cfg.percentages));
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_sweep(cfg, load_dataset(cfg.dataset));
}

std::vector<DiffRow> diff_series(const SweepResult& a, const SweepResult& b, Metric metric) {
  if (a.dataset != b.dataset) {
    throw Error("cannot compare sweeps on different datasets ('" + a.dataset + "' vs '" + b.dataset + "')");
  }
  using Key = std::pair<std::string, double>;
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  const auto means = [&](const SweepResult& s) {
    std::map<Key, Acc> m;
    std::vector<Key> order;
    for (const auto& row : s.rows) {
      const Key key{row.classifier, row.percentage};
      auto [it, fresh] = m.try_emplace(key);
      if (fresh) order.push_back(key);
      it->second.sum += metric_value(row.metrics, metric);
      ++it->second.n;
    }
    return std::pair{m, order};
  };
  const auto [ma, order] = means(a);
  const auto [mb, order_b] = means(b);
  if (ma.size() != mb.size() ||
      !std::equal(ma.begin(), ma.end(), mb.begin(), [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw Error("cannot compare sweeps with different classifiers or percentage grids");
  }
  std::vector<DiffRow> out;
  for (const auto& key : order) {
    const auto& x = ma.at(key);
    const auto& y = mb.at(key);
    out.push_back({key.first, key.second,
                   x.sum / static_cast<double>(x.n) - y.sum / static_cast<double>(y.n)});
  }
  return out;
}

}  // namespace erasure
