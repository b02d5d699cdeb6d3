#include "erasure/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "erasure/error.hpp"

namespace erasure {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

ConfusionStats confusion(std::span<const int> y_true, std::span<const int> y_pred, std::size_t n_classes) {
  if (y_true.size() != y_pred.size()) throw Error("confusion: label vectors differ in length");
  if (y_true.empty()) throw Error("confusion: no samples");
  const auto k = static_cast<int>(n_classes);
  ConfusionStats cs;
  cs.per_class.resize(n_classes);
  cs.n_samples = y_true.size();
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= k || p < 0 || p >= k) throw Error("confusion: unknown label");
    if (t == p) {
      ++cs.correct;
      ++cs.per_class[t].tp;
    } else {
      ++cs.per_class[p].fp;
      ++cs.per_class[t].fn;
    }
  }
  for (auto& c : cs.per_class) c.tn = cs.n_samples - c.tp - c.fp - c.fn;
  return cs;
}

std::string to_string(Averaging a) {
  return a == Averaging::macro ? "macro" : "binary_positive_class";
}

MetricsReport compute_metrics(const ConfusionStats& cs, Averaging averaging, int positive_class) {
  MetricsReport m;
  m.averaging = averaging;
  m.accuracy = ratio(cs.correct, cs.n_samples);
  if (averaging == Averaging::binary_positive_class) {
    if (positive_class < 0 || static_cast<std::size_t>(positive_class) >= cs.per_class.size()) {
      throw Error("positive class out of range");
    }
    const auto& c = cs.per_class[static_cast<std::size_t>(positive_class)];
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.f1 = harmonic(m.precision, m.recall);
    return m;
  }
  if (cs.per_class.empty()) return m;
  for (const auto& c : cs.per_class) {
    const double p = ratio(c.tp, c.tp + c.fp);
    const double r = ratio(c.tp, c.tp + c.fn);
    m.precision += p;
    m.recall += r;
    m.f1 += harmonic(p, r);
  }
  const auto k = static_cast<double>(cs.per_class.size());
  m.precision /= k;
  m.recall /= k;
  m.f1 /= k;
  return m;
}

std::vector<double> gaussian_smooth(std::span<const double> series, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("gaussian_smooth: sigma must be positive");
  if (series.empty()) throw Error("gaussian_smooth: empty series");
  const auto radius = static_cast<std::ptrdiff_t>(4.0 * sigma + 0.5);
  std::vector<double> kernel(static_cast<std::size_t>(radius) + 1);
  for (std::ptrdiff_t x = 0; x <= radius; ++x) {
    kernel[static_cast<std::size_t>(x)] = std::exp(-0.5 * static_cast<double>(x * x) / (sigma * sigma));
  }
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  std::vector<double> out(series.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    double norm = 0.0;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - radius); j <= std::min(n - 1, i + radius); ++j) {
      const double k = kernel[static_cast<std::size_t>(std::abs(j - i))];
      acc += k * series[static_cast<std::size_t>(j)];
      norm += k;
    }
    out[static_cast<std::size_t>(i)] = acc / norm;
  }
  return out;
}

}  // namespace erasure
