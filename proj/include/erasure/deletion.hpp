#pragma once

// Biased record deletion.
//
// A scenario assigns every record a positive weight; records are then removed
// by weighted sampling without replacement.
//
// Sampling algorithm (normative). Given weights w_0..w_{n-1} and a seed:
//   1. Seed std::mt19937_64 with the seed.
//   2. For i = 0..n-1 in order, draw one 64-bit word x_i and set
//        u_i   = ((x_i >> 11) + 0.5) * 2^-53          (uniform on (0, 1))
//        key_i = ln(u_i) / w_i
//   3. Sort positions by key descending, ties by lower position first.
// The first k positions of that order are the deleted set for count k. This is
// order sampling with exponential keys (Efraimidis-Spirakis): the order has
// the same law as drawing records one at a time with probability proportional
// to the weight of the records still present.
//
// Per-percentage seeds for independent (non-incremental) plans are
//   derive_seed(seed, llround(p * 1e9)).
// Incremental plans take prefixes of a single order seeded with `seed`, so the
// records added at each step are a weighted draw from the survivors.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "erasure/dataset.hpp"

namespace erasure {

enum class DeletionMode { random, selection, thirds, age, positive_numeric };

std::string to_string(DeletionMode mode);
/// Accepts "random", "selection", "thirds", "age", "positive_numeric" (or "positive-numeric").
DeletionMode parse_deletion_mode(const std::string& text);

struct DeletionScenario {
  DeletionMode mode = DeletionMode::random;
  std::string attribute;
  std::vector<std::string> selected_values;  // selection; categorical matches ignore ASCII case
  bool reversed = false;                     // thirds, positive_numeric
  double age_cutoff = 45.0;                  // age
  /// Rank of each category when positive_numeric targets a categorical column.
  std::map<std::string, double> ordinal;
  /// Further scenarios whose weights multiply this one's.
  std::vector<DeletionScenario> combine_with;
  bool incremental = false;
  std::uint64_t seed = 0;
  /// Display label, without the " Incremental" suffix; derived from the other
  /// fields when empty.
  std::string label;

  /// Throws UsageError when the scenario does not fit `schema`.
  void validate(const Schema& schema) const;
  std::string display_label() const;
};

/// Per-record positive deletion weights, aligned with the dataset rows.
struct WeightVector {
  std::vector<double> weights;
};

WeightVector compute_weights(const Dataset& ds, const DeletionScenario& scenario);

/// All positions ordered by the normative key (first = deleted first).
std::vector<std::size_t> deletion_order(std::span<const double> weights, std::uint64_t seed);

/// Same ordering from caller-supplied uniforms u_i in (0, 1).
std::vector<std::size_t> order_by_keys(std::span<const double> weights,
                                       std::span<const double> uniforms);

/// Positions of `count` records drawn without replacement, sorted ascending.
std::vector<std::size_t> select_deletions(const WeightVector& w, std::size_t count, std::uint64_t seed);

/// round(p * n), ties to even.
std::size_t deletion_count(double fraction, std::size_t n);

std::uint64_t percentage_seed(std::uint64_t seed, double fraction);

struct DeletionPlan {
  std::vector<double> percentages;
  /// Deleted row ids per percentage, sorted ascending.
  std::vector<std::vector<std::size_t>> deleted;
};

/// Throws UsageError unless the list is strictly increasing within [0, 1).
void validate_percentages(std::span<const double> percentages);

DeletionPlan build_plan(const Dataset& ds, const DeletionScenario& scenario,
                        std::span<const double> percentages);

/// Surviving records with their original row ids. Throws Error on an unknown id.
Dataset apply_deletion(const Dataset& ds, std::span<const std::size_t> deleted_row_ids);

}  // namespace erasure
