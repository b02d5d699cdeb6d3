#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "erasure/dataset.hpp"
#include "erasure/rng.hpp"

namespace erasure::detail {

/// Binary tree with axis-aligned splits; rows with x[feature] <= threshold go left.
struct Tree {
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;       // classification leaves
    double value = 0.0;  // regression leaves
  };
  std::vector<Node> nodes;

  const Node& leaf(std::span<const double> x) const {
    const Node* n = &nodes.front();
    while (n->feature >= 0) {
      n = &nodes[static_cast<std::size_t>(x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left
                                                                                                   : n->right)];
    }
    return *n;
  }

  std::size_t depth() const;
  void dump(std::ostream& out, bool regression) const;
};

struct CartOptions {
  int n_classes = 2;
  std::optional<int> max_depth;
  std::size_t features_per_split = 1;
};

/// Gini CART grown on `samples` (row indices into x, repeats allowed).
/// Features are tried in random order until `features_per_split` have been
/// examined and a valid split exists, or all features are exhausted.
Tree grow_classification_tree(const Matrix& x, std::span<const int> y, std::vector<std::size_t> samples,
                              const CartOptions& opt, Rng& rng);

/// One column's rows sorted by value (ties by row index), with the values.
struct SortedColumn {
  std::vector<std::uint32_t> rows;
  std::vector<double> values;
};

std::vector<SortedColumn> presort_columns(const Matrix& x);

struct BoostTreeOptions {
  int max_depth = 3;
  double lambda = 1.0;
  double min_child_weight = 1.0;
  double learning_rate = 0.1;
};

/// Depth-limited regression tree fitted to gradient statistics by exact greedy
/// level-wise search with gain G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l).
/// Leaf values are -learning_rate * G / (H + lambda).
Tree grow_boosting_tree(const Matrix& x, const std::vector<SortedColumn>& sorted,
                        std::span<const double> grad, std::span<const double> hess,
                        const BoostTreeOptions& opt);

}  // namespace erasure::detail
