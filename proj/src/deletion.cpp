#include "erasure/deletion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "erasure/error.hpp"
#include "erasure/rng.hpp"

namespace erasure {
namespace {

std::string pretty(const std::string& attribute) {
  std::string out;
  bool start = true;
  for (char ch : attribute) {
    if (ch == '-' || ch == '_' || ch == ' ') {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
      start = true;
      continue;
    }
    out.push_back(start ? static_cast<char>(std::toupper(static_cast<unsigned char>(ch))) : ch);
    start = false;
  }
  return out;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

bool is_numeric(const Schema& schema, const std::string& attr) {
  return schema.column(attr).kind == ColumnKind::numeric;
}

/// Linear-interpolation quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Values of `attr` as numbers, via the ordinal map for categorical columns.
std::vector<double> ordinal_values(const Dataset& ds, const DeletionScenario& s) {
  if (is_numeric(ds.schema(), s.attribute)) return ds.numeric(s.attribute);
  std::vector<double> out;
  const auto& text = ds.categorical(s.attribute);
  out.reserve(text.size());
  for (const auto& v : text) {
    const auto it = s.ordinal.find(v);
    if (it == s.ordinal.end()) {
      throw Error("value '" + v + "' of '" + s.attribute + "' has no ordinal rank");
    }
    out.push_back(it->second);
  }
  return out;
}

std::vector<double> own_weights(const Dataset& ds, const DeletionScenario& s) {
  const std::size_t n = ds.size();
  std::vector<double> w(n, 1.0);
  switch (s.mode) {
    case DeletionMode::random:
      break;

    case DeletionMode::selection: {
      std::size_t hits = 0;
      if (is_numeric(ds.schema(), s.attribute)) {
        std::vector<double> targets;
        for (const auto& v : s.selected_values) targets.push_back(std::stod(v));
        const auto& col = ds.numeric(s.attribute);
        for (std::size_t i = 0; i < n; ++i) {
          if (std::find(targets.begin(), targets.end(), col[i]) != targets.end()) {
            w[i] = 2.0;
            ++hits;
          }
        }
      } else {
        // case-insensitive, so labels like "married-civ-spouse" match
        std::set<std::string> targets;
        for (const auto& v : s.selected_values) targets.insert(lower(v));
        const auto& col = ds.categorical(s.attribute);
        for (std::size_t i = 0; i < n; ++i) {
          if (targets.count(lower(col[i]))) {
            w[i] = 2.0;
            ++hits;
          }
        }
      }
      if (hits == 0) warn("selection on '" + s.attribute + "' matches no record");
      break;
    }

    case DeletionMode::thirds: {
      const auto& col = ds.numeric(s.attribute);
      std::vector<double> sorted = col;
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front() == sorted.back()) {
        warn("thirds on constant attribute '" + s.attribute + "'; all weights are 1");
        break;
      }
      const double lower = quantile(sorted, 1.0 / 3.0);
      const double upper = quantile(sorted, 2.0 / 3.0);
      for (std::size_t i = 0; i < n; ++i) {
        // boundary values belong to the lower group
        const double group = col[i] <= lower ? 1.0 : (col[i] <= upper ? 2.0 : 3.0);
        w[i] = s.reversed ? 4.0 - group : group;
      }
      break;
    }

    case DeletionMode::age: {
      const auto& col = ds.numeric(s.attribute);
      for (std::size_t i = 0; i < n; ++i) w[i] = col[i] < s.age_cutoff ? 2.0 : 1.0;
      break;
    }

    case DeletionMode::positive_numeric: {
      const auto v = ordinal_values(ds, s);
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      const double vmin = *lo;
      const double vmax = *hi;
      if (!s.reversed && vmin < 1.0) {
        warn("positive_numeric on '" + s.attribute + "' has values below 1; shifting so the minimum is 1");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (s.reversed) {
          w[i] = vmax + 1.0 - v[i];
        } else {
          w[i] = vmin >= 1.0 ? v[i] : v[i] - vmin + 1.0;
        }
      }
      break;
    }
  }
  return w;
}

}  // namespace

std::string to_string(DeletionMode mode) {
  switch (mode) {
    case DeletionMode::random: return "random";
    case DeletionMode::selection: return "selection";
    case DeletionMode::thirds: return "thirds";
    case DeletionMode::age: return "age";
    case DeletionMode::positive_numeric: return "positive_numeric";
  }
  return "?";
}

DeletionMode parse_deletion_mode(const std::string& text) {
  if (text == "random") return DeletionMode::random;
  if (text == "selection") return DeletionMode::selection;
  if (text == "thirds") return DeletionMode::thirds;
  if (text == "age") return DeletionMode::age;
  if (text == "positive_numeric" || text == "positive-numeric") return DeletionMode::positive_numeric;
  throw UsageError("unknown deletion mode '" + text + "'");
}

void DeletionScenario::validate(const Schema& schema) const {
  const std::string where = "scenario " + display_label() + ": ";
  if (mode == DeletionMode::random) {
    if (!attribute.empty()) throw UsageError(where + "random mode takes no attribute");
  } else {
    if (attribute.empty()) throw UsageError(where + to_string(mode) + " mode needs an attribute");
    if (!schema.index_of(attribute)) throw UsageError(where + "unknown attribute '" + attribute + "'");
  }
  if (mode != DeletionMode::selection && !selected_values.empty()) {
    throw UsageError(where + "values are only meaningful in selection mode");
  }
  if (reversed && mode != DeletionMode::thirds && mode != DeletionMode::positive_numeric) {
    throw UsageError(where + "reversal applies to thirds and positive_numeric modes only");
  }
  switch (mode) {
    case DeletionMode::selection:
      if (selected_values.empty()) throw UsageError(where + "selection mode needs at least one value");
      if (is_numeric(schema, attribute)) {
        for (const auto& v : selected_values) {
          try {
            std::size_t used = 0;
            (void)std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
          } catch (const std::exception&) {
            throw UsageError(where + "value '" + v + "' is not numeric");
          }
        }
      }
      break;
    case DeletionMode::thirds:
    case DeletionMode::age:
      if (!is_numeric(schema, attribute)) {
        throw UsageError(where + to_string(mode) + " mode needs a numeric attribute");
      }
      if (mode == DeletionMode::age && !(age_cutoff > 0.0)) {
        throw UsageError(where + "age cutoff must be positive");
      }
      break;
    case DeletionMode::positive_numeric:
      if (!is_numeric(schema, attribute) && ordinal.empty()) {
        throw UsageError(where + "positive_numeric on a categorical attribute needs an ordinal map");
      }
      break;
    case DeletionMode::random:
      break;
  }
  for (const auto& other : combine_with) other.validate(schema);
}

std::string DeletionScenario::display_label() const {
  if (!label.empty()) return incremental ? label + " Incremental" : label;
  std::string out;
  switch (mode) {
    case DeletionMode::random:
      out = "Random";
      break;
    case DeletionMode::selection: {
      out = pretty(attribute) + " [";
      for (std::size_t i = 0; i < selected_values.size(); ++i) {
        if (i) out += ", ";
        out += selected_values[i];
      }
      out += "]";
      break;
    }
    default:
      out = pretty(attribute);
  }
  for (const auto& other : combine_with) {
    auto inner = other;
    inner.incremental = false;
    out += " and " + inner.display_label();
  }
  if (incremental) out += " Incremental";
  return out;
}

WeightVector compute_weights(const Dataset& ds, const DeletionScenario& scenario) {
  scenario.validate(ds.schema());
  WeightVector w{own_weights(ds, scenario)};
  for (const auto& other : scenario.combine_with) {
    const auto extra = compute_weights(ds, other);
    for (std::size_t i = 0; i < w.weights.size(); ++i) w.weights[i] *= extra.weights[i];
  }
  return w;
}

std::vector<std::size_t> order_by_keys(std::span<const double> weights,
                                       std::span<const double> uniforms) {
  if (weights.size() != uniforms.size()) throw Error("order_by_keys: size mismatch");
  std::vector<double> keys(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw Error("deletion weights must be positive and finite");
    }
    keys[i] = std::log(uniforms[i]) / weights[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
  return order;
}

std::vector<std::size_t> deletion_order(std::span<const double> weights, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> u(weights.size());
  for (auto& x : u) x = uniform_open01(rng);
  return order_by_keys(weights, u);
}

std::vector<std::size_t> select_deletions(const WeightVector& w, std::size_t count, std::uint64_t seed) {
  if (count > w.weights.size()) {
    throw Error("cannot delete " + std::to_string(count) + " of " +
                std::to_string(w.weights.size()) + " records");
  }
  auto order = deletion_order(w.weights, seed);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

std::size_t deletion_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(round_half_even(fraction * static_cast<double>(n)));
}

std::uint64_t percentage_seed(std::uint64_t seed, double fraction) {
  return derive_seed(seed, static_cast<std::uint64_t>(std::llround(fraction * 1e9)));
}

void validate_percentages(std::span<const double> percentages) {
  if (percentages.empty()) throw UsageError("percentage grid is empty");
  for (std::size_t i = 0; i < percentages.size(); ++i) {
    const double p = percentages[i];
    if (!(p >= 0.0 && p < 1.0)) throw UsageError("deletion percentages must lie in [0, 1)");
    if (i && !(p > percentages[i - 1])) throw UsageError("deletion percentages must be strictly increasing");
  }
}

DeletionPlan build_plan(const Dataset& ds, const DeletionScenario& scenario,
                        std::span<const double> percentages) {
  validate_percentages(percentages);
  const auto w = compute_weights(ds, scenario);
  const std::size_t n = ds.size();
  const auto& ids = ds.row_ids();

  DeletionPlan plan;
  plan.percentages.assign(percentages.begin(), percentages.end());
  std::vector<std::size_t> shared_order;
  if (scenario.incremental) shared_order = deletion_order(w.weights, scenario.seed);

  for (double p : percentages) {
    const std::size_t count = deletion_count(p, n);
    std::vector<std::size_t> positions;
    if (scenario.incremental) {
      positions.assign(shared_order.begin(), shared_order.begin() + static_cast<std::ptrdiff_t>(count));
    } else if (count > 0) {
      positions = deletion_order(w.weights, percentage_seed(scenario.seed, p));
      positions.resize(count);
    }
    std::vector<std::size_t> deleted;
    deleted.reserve(positions.size());
    for (auto pos : positions) deleted.push_back(ids[pos]);
    std::sort(deleted.begin(), deleted.end());
    plan.deleted.push_back(std::move(deleted));
  }
  return plan;
}

Dataset apply_deletion(const Dataset& ds, std::span<const std::size_t> deleted_row_ids) {
  std::unordered_map<std::size_t, std::size_t> position;
  position.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) position.emplace(ds.row_ids()[i], i);
  std::vector<char> gone(ds.size(), 0);
  for (auto id : deleted_row_ids) {
    const auto it = position.find(id);
    if (it == position.end()) throw Error("unknown row id " + std::to_string(id));
    gone[it->second] = 1;
  }
  std::vector<std::size_t> keep;
  keep.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!gone[i]) keep.push_back(i);
  }
  return ds.take(keep);
}

}  // namespace erasure
