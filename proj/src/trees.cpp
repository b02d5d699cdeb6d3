#include "trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace erasure::detail {
namespace {

double midpoint(double lo, double hi) {
  const double m = lo + (hi - lo) / 2.0;
  // adjacent doubles: keep lo so that lo <= m < hi still separates them
  return m < hi ? m : lo;
}

int majority(std::span<const std::size_t> counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

void Tree::dump(std::ostream& out, bool regression) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    out << "  node " << i;
    if (n.feature >= 0) {
      out << " split x[" << n.feature << "] <= " << n.threshold << " ? " << n.left << " : " << n.right;
    } else if (regression) {
      out << " leaf " << n.value;
    } else {
      out << " leaf class " << n.label;
    }
    out << '\n';
  }
}

Tree grow_classification_tree(const Matrix& x, std::span<const int> y, std::vector<std::size_t> samples,
                              const CartOptions& opt, Rng& rng) {
  struct Task {
    int node;
    std::size_t begin, end;
    int depth;
  };
  const std::size_t d = x.cols();
  const auto k = static_cast<std::size_t>(opt.n_classes);

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<Task> stack{{0, 0, samples.size(), 0}};
  std::vector<std::size_t> features(d);
  std::iota(features.begin(), features.end(), std::size_t{0});
  std::vector<std::pair<double, int>> column;
  std::vector<std::size_t> counts(k), left(k), right(k);

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    const std::size_t m = task.end - task.begin;

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = task.begin; i < task.end; ++i) ++counts[static_cast<std::size_t>(y[samples[i]])];
    tree.nodes[static_cast<std::size_t>(task.node)].label = majority(counts);
    const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
    if (m < 2 || pure || (opt.max_depth && task.depth >= *opt.max_depth)) continue;

    // Maximising sum_c L_c^2 / n_L + sum_c R_c^2 / n_R minimises weighted Gini.
    double best_score = -std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    std::size_t examined = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (examined >= opt.features_per_split && best_feature >= 0) break;
      std::swap(features[j], features[j + uniform_index(rng, d - j)]);
      const std::size_t f = features[j];
      ++examined;

      column.clear();
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = task.begin; i < task.end; ++i) {
        const double v = x(samples[i], f);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        column.emplace_back(v, y[samples[i]]);
      }
      if (lo == hi) continue;
      std::sort(column.begin(), column.end());

      std::fill(left.begin(), left.end(), 0);
      std::copy(counts.begin(), counts.end(), right.begin());
      double left_sq = 0.0;
      double right_sq = 0.0;
      for (auto c : counts) right_sq += static_cast<double>(c) * static_cast<double>(c);
      for (std::size_t i = 0; i + 1 < m; ++i) {
        const auto c = static_cast<std::size_t>(column[i].second);
        left_sq += 2.0 * static_cast<double>(left[c]) + 1.0;
        right_sq -= 2.0 * static_cast<double>(right[c]) - 1.0;
        ++left[c];
        --right[c];
        if (column[i].first == column[i + 1].first) continue;
        const double score =
            left_sq / static_cast<double>(i + 1) + right_sq / static_cast<double>(m - i - 1);
        if (score > best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = midpoint(column[i].first, column[i + 1].first);
        }
      }
    }
    if (best_feature < 0) continue;

    const auto mid = std::stable_partition(
        samples.begin() + static_cast<std::ptrdiff_t>(task.begin),
        samples.begin() + static_cast<std::ptrdiff_t>(task.end),
        [&](std::size_t s) { return x(s, static_cast<std::size_t>(best_feature)) <= best_threshold; });
    const auto split = static_cast<std::size_t>(mid - samples.begin());

    const int left_node = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[static_cast<std::size_t>(task.node)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left_node;
    node.right = left_node + 1;
    stack.push_back({left_node + 1, split, task.end, task.depth + 1});
    stack.push_back({left_node, task.begin, split, task.depth + 1});
  }
  return tree;
}

std::vector<SortedColumn> presort_columns(const Matrix& x) {
  std::vector<SortedColumn> out(x.cols());
  std::vector<std::uint32_t> order(x.rows());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
    out[f].rows = order;
    out[f].values.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) out[f].values[i] = x(order[i], f);
  }
  return out;
}

Tree grow_boosting_tree(const Matrix& x, const std::vector<SortedColumn>& sorted,
                        std::span<const double> grad, std::span<const double> hess,
                        const BoostTreeOptions& opt) {
  struct Stat {
    double g = 0.0;
    double h = 0.0;
  };
  struct Best {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const double lambda = opt.lambda;
  auto score = [lambda](double g, double h) { return g * g / (h + lambda); };

  Tree tree;
  tree.nodes.emplace_back();
  std::vector<Stat> stat(1);
  for (std::size_t r = 0; r < n; ++r) {
    stat[0].g += grad[r];
    stat[0].h += hess[r];
  }
  std::vector<int> node_of(n, 0);
  std::vector<int> frontier{0};

  for (int depth = 0; depth < opt.max_depth && !frontier.empty(); ++depth) {
    std::vector<int> slot(tree.nodes.size(), -1);
    for (std::size_t i = 0; i < frontier.size(); ++i) slot[static_cast<std::size_t>(frontier[i])] = static_cast<int>(i);
    const std::size_t width = frontier.size();
    std::vector<Best> best(width);
    std::vector<double> gl(width), hl(width), last(width);
    std::vector<char> seen(width);

    for (std::size_t f = 0; f < d; ++f) {
      std::fill(gl.begin(), gl.end(), 0.0);
      std::fill(hl.begin(), hl.end(), 0.0);
      std::fill(seen.begin(), seen.end(), 0);
      const auto& rows = sorted[f].rows;
      const auto& values = sorted[f].values;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::uint32_t r = rows[i];
        const int s = slot[static_cast<std::size_t>(node_of[r])];
        if (s < 0) continue;
        const auto si = static_cast<std::size_t>(s);
        const double v = values[i];
        if (seen[si] && v != last[si]) {
          const Stat& total = stat[static_cast<std::size_t>(frontier[si])];
          const double hr = total.h - hl[si];
          if (hl[si] >= opt.min_child_weight && hr >= opt.min_child_weight) {
            const double gain = score(gl[si], hl[si]) + score(total.g - gl[si], hr) - score(total.g, total.h);
            if (gain > best[si].gain) best[si] = {gain, static_cast<int>(f), midpoint(last[si], v)};
          }
        }
        gl[si] += grad[r];
        hl[si] += hess[r];
        last[si] = v;
        seen[si] = 1;
      }
    }

    std::vector<int> next;
    for (std::size_t i = 0; i < width; ++i) {
      if (best[i].feature < 0) continue;
      const auto node = static_cast<std::size_t>(frontier[i]);
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      stat.resize(tree.nodes.size());
      tree.nodes[node].feature = best[i].feature;
      tree.nodes[node].threshold = best[i].threshold;
      tree.nodes[node].left = left;
      tree.nodes[node].right = left + 1;
      next.push_back(left);
      next.push_back(left + 1);
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto node = static_cast<std::size_t>(node_of[r]);
      if (slot[node] < 0 || tree.nodes[node].feature < 0) continue;
      const auto& split = tree.nodes[node];
      const int child = x(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? split.left : split.right;
      node_of[r] = child;
      stat[static_cast<std::size_t>(child)].g += grad[r];
      stat[static_cast<std::size_t>(child)].h += hess[r];
    }
    frontier = std::move(next);
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].feature < 0) {
      tree.nodes[i].value = -opt.learning_rate * stat[i].g / (stat[i].h + lambda);
    }
  }
  return tree;
}

}  // namespace erasure::detail
