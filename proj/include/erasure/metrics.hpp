#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace erasure {

/// One-vs-rest counts for each class.
struct ClassCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct ConfusionStats {
  std::vector<ClassCounts> per_class;
  std::size_t n_samples = 0;
  std::size_t correct = 0;
};

/// Counts for `n_classes` classes. Throws Error on length mismatch, empty
/// input or a label outside [0, n_classes).
ConfusionStats confusion(std::span<const int> y_true, std::span<const int> y_pred, std::size_t n_classes);

enum class Averaging { binary_positive_class, macro };

std::string to_string(Averaging a);

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Averaging averaging = Averaging::macro;
};

/// Precision, recall and F1 are 0 whenever their denominator is 0.
/// `positive_class` selects the reported class for binary_positive_class.
MetricsReport compute_metrics(const ConfusionStats& cs, Averaging averaging, int positive_class = 1);

/// 1-D Gaussian smoothing. The kernel exp(-x^2 / 2 sigma^2) is truncated at
/// radius floor(4 sigma + 0.5) and renormalised over the samples that fall
/// inside the series, so edges are averaged without padding.
std::vector<double> gaussian_smooth(std::span<const double> series, double sigma);

}  // namespace erasure
