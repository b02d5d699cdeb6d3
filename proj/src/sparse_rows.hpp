#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "erasure/dataset.hpp"

namespace erasure::detail {

/// Compressed rows of a mostly one-hot matrix. Column indices ascend per row.
/// `extra_one` appends a constant 1 column (bias) after the last column.
class SparseRows {
 public:
  explicit SparseRows(const Matrix& m, bool extra_one = false) : cols_(m.cols() + (extra_one ? 1 : 0)) {
    offsets_.reserve(m.rows() + 1);
    offsets_.push_back(0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const auto row = m.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (row[c] != 0.0) {
          index_.push_back(static_cast<std::uint32_t>(c));
          value_.push_back(row[c]);
        }
      }
      if (extra_one) {
        index_.push_back(static_cast<std::uint32_t>(m.cols()));
        value_.push_back(1.0);
      }
      offsets_.push_back(index_.size());
    }
  }

  std::size_t rows() const { return offsets_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::span<const std::uint32_t> index(std::size_t r) const {
    return {index_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }
  std::span<const double> value(std::size_t r) const {
    return {value_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }

  double dot(std::size_t r, std::span<const double> dense) const {
    double acc = 0.0;
    const auto idx = index(r);
    const auto val = value(r);
    for (std::size_t k = 0; k < idx.size(); ++k) acc += val[k] * dense[idx[k]];
    return acc;
  }

 private:
  std::size_t cols_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> index_;
  std::vector<double> value_;
};

/// Squared Euclidean distance between row `a` of `x` and row `b` of `y`,
/// summed over the union of their non-zero columns.
inline double squared_distance(const SparseRows& x, std::size_t a, const SparseRows& y, std::size_t b) {
  const auto ia = x.index(a), ib = y.index(b);
  const auto va = x.value(a), vb = y.value(b);
  std::size_t i = 0, j = 0;
  double acc = 0.0;
  while (i < ia.size() && j < ib.size()) {
    double d;
    if (ia[i] == ib[j]) {
      d = va[i++] - vb[j++];
    } else if (ia[i] < ib[j]) {
      d = va[i++];
    } else {
      d = vb[j++];
    }
    acc += d * d;
  }
  for (; i < ia.size(); ++i) acc += va[i] * va[i];
  for (; j < ib.size(); ++j) acc += vb[j] * vb[j];
  return acc;
}

}  // namespace erasure::detail
