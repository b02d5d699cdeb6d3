#include "erasure/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "erasure/error.hpp"
#include "erasure/rng.hpp"
#include "parallel.hpp"
#include "sparse_rows.hpp"
#include "trees.hpp"

namespace erasure {

struct Model::Impl {
  virtual ~Impl() = default;
  virtual std::vector<int> predict(const Matrix& x, unsigned threads) const = 0;
  virtual void dump(std::ostream& out) const = 0;
  unsigned threads = 1;
};

namespace {

using detail::SparseRows;
using detail::Tree;

/// Index of the largest count, lowest index on ties.
int argmax_count(std::span<const std::size_t> counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

int argmax_score(std::span<const double> scores) {
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

struct ConstantModel final : Model::Impl {
  int label = 0;
  std::vector<int> predict(const Matrix& x, unsigned) const override {
    return std::vector<int>(x.rows(), label);
  }
  void dump(std::ostream& out) const override { out << "constant " << label << '\n'; }
};

struct KnnModel final : Model::Impl {
  SparseRows train;
  std::vector<int> labels;
  std::size_t k = 5;
  std::size_t n_classes = 2;

  KnnModel(const Matrix& x, std::span<const int> y, std::size_t k_, std::size_t classes)
      : train(x), labels(y.begin(), y.end()), k(k_), n_classes(classes) {}

  std::vector<int> predict(const Matrix& x, unsigned threads) const override {
    const SparseRows query(x);
    std::vector<int> out(x.rows());
    const std::size_t kk = std::min(k, labels.size());
    detail::parallel_for(x.rows(), threads, [&](std::size_t q) {
      // k best (distance, index) pairs, ascending; ties resolved by index
      std::vector<std::pair<double, std::size_t>> best;
      best.reserve(kk + 1);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const double dist = detail::squared_distance(query, q, train, i);
        if (best.size() == kk && !(dist < best.back().first)) continue;
        const auto item = std::make_pair(dist, i);
        best.insert(std::upper_bound(best.begin(), best.end(), item), item);
        if (best.size() > kk) best.pop_back();
      }
      std::vector<std::size_t> votes(n_classes, 0);
      for (const auto& [dist, i] : best) ++votes[static_cast<std::size_t>(labels[i])];
      out[q] = argmax_count(votes);
    });
    return out;
  }

  void dump(std::ostream& out) const override {
    out << "knn k=" << k << " stored_rows=" << labels.size() << '\n';
  }
};

struct SvmModel final : Model::Impl {
  // one row per class, the last entry of each row is the bias
  std::vector<std::vector<double>> weights;

  std::vector<int> predict(const Matrix& x, unsigned) const override {
    const SparseRows rows(x, true);
    std::vector<int> out(x.rows());
    std::vector<double> score(weights.size());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < weights.size(); ++c) score[c] = rows.dot(r, weights[c]);
      out[r] = argmax_score(score);
    }
    return out;
  }

  void dump(std::ostream& out) const override {
    for (std::size_t c = 0; c < weights.size(); ++c) {
      out << "svm class " << c << " bias " << weights[c].back() << " w";
      for (std::size_t j = 0; j + 1 < weights[c].size(); ++j) out << ' ' << weights[c][j];
      out << '\n';
    }
  }
};

struct ForestModel final : Model::Impl {
  std::vector<Tree> trees;
  std::size_t n_classes = 2;

  std::vector<int> predict(const Matrix& x, unsigned threads) const override {
    std::vector<int> out(x.rows());
    detail::parallel_for(x.rows(), threads, [&](std::size_t r) {
      std::vector<std::size_t> votes(n_classes, 0);
      for (const auto& t : trees) ++votes[static_cast<std::size_t>(t.leaf(x.row(r)).label)];
      out[r] = argmax_count(votes);
    });
    return out;
  }

  void dump(std::ostream& out) const override {
    for (std::size_t i = 0; i < trees.size(); ++i) {
      out << "tree " << i << '\n';
      trees[i].dump(out, false);
    }
  }
};

struct BoostedModel final : Model::Impl {
  std::size_t n_classes = 2;
  // binary problems use one logit for class 1; otherwise one score per class
  std::vector<double> base;
  std::vector<std::vector<Tree>> rounds;

  std::vector<int> predict(const Matrix& x, unsigned) const override {
    std::vector<int> out(x.rows());
    std::vector<double> score(base.size());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto row = x.row(r);
      score = base;
      for (const auto& round : rounds) {
        for (std::size_t c = 0; c < round.size(); ++c) score[c] += round[c].leaf(row).value;
      }
      out[r] = n_classes == 2 ? (score[0] > 0.0 ? 1 : 0) : argmax_score(score);
    }
    return out;
  }

  void dump(std::ostream& out) const override {
    out << "base";
    for (double b : base) out << ' ' << b;
    out << '\n';
    for (std::size_t i = 0; i < rounds.size(); ++i) {
      for (std::size_t c = 0; c < rounds[i].size(); ++c) {
        out << "round " << i << " output " << c << '\n';
        rounds[i][c].dump(out, true);
      }
    }
  }
};

std::vector<std::size_t> class_counts(std::span<const int> y, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (int label : y) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

std::shared_ptr<SvmModel> fit_svm(const Matrix& x, std::span<const int> y, std::size_t k,
                                  const Hyperparams& hp, std::vector<double>& objective) {
  const SparseRows rows(x, true);
  const std::size_t n = rows.rows();
  const std::size_t dim = rows.cols();
  const double lambda = 1.0 / (hp.svm_c * static_cast<double>(n));
  const auto epochs = static_cast<std::size_t>(hp.svm_epochs);

  auto model = std::make_shared<SvmModel>();
  model->weights.assign(k, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> curves(k);

  auto objective_of = [&](const std::vector<double>& w, int cls) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sign = y[i] == cls ? 1.0 : -1.0;
      hinge += std::max(0.0, 1.0 - sign * rows.dot(i, w));
    }
    const double sq = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    return 0.5 * lambda * sq + hinge / static_cast<double>(n);
  };

  // AdaGrad per-coordinate step sizes on unscaled features
  detail::parallel_for(k, hp.threads, [&](std::size_t cls) {
    const int target = static_cast<int>(cls);
    Rng rng(derive_seed(hp.model_seed, cls));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> w(dim, 0.0), grad(dim), grad_sq(dim, 1e-12), running(dim, 0.0), mean(dim);
    double steps = 0.0;
    auto& best = model->weights[cls];
    double best_obj = objective_of(best, target);

    for (std::size_t e = 0; e < epochs; ++e) {
      shuffle(order.begin(), order.end(), rng);
      for (std::size_t i : order) {
        const double sign = y[i] == target ? 1.0 : -1.0;
        const double margin = sign * rows.dot(i, w);
        for (std::size_t j = 0; j < dim; ++j) grad[j] = lambda * w[j];
        if (margin < 1.0) {
          const auto idx = rows.index(i);
          const auto val = rows.value(i);
          for (std::size_t j = 0; j < idx.size(); ++j) grad[idx[j]] -= sign * val[j];
        }
        for (std::size_t j = 0; j < dim; ++j) {
          grad_sq[j] += grad[j] * grad[j];
          w[j] -= hp.svm_learning_rate * grad[j] / std::sqrt(grad_sq[j]);
          running[j] += w[j];
        }
        steps += 1.0;
      }
      // candidates: last iterate and the average of all iterates so far
      for (std::size_t j = 0; j < dim; ++j) mean[j] = running[j] / steps;
      for (const auto* candidate : {&w, &mean}) {
        const double obj = objective_of(*candidate, target);
        if (obj < best_obj) {
          best_obj = obj;
          best = *candidate;
        }
      }
      curves[cls].push_back(best_obj);
    }
  });

  objective.assign(epochs, 0.0);
  for (const auto& curve : curves) {
    for (std::size_t e = 0; e < epochs; ++e) objective[e] += curve[e] / static_cast<double>(k);
  }
  return model;
}

std::shared_ptr<ForestModel> fit_forest(const Matrix& x, std::span<const int> y, std::size_t k,
                                        const Hyperparams& hp) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  detail::CartOptions opt;
  opt.n_classes = static_cast<int>(k);
  opt.max_depth = hp.rf_max_depth;
  if (hp.rf_feature_subsample) {
    opt.features_per_split = static_cast<std::size_t>(std::llround(*hp.rf_feature_subsample * static_cast<double>(d)));
  } else {
    opt.features_per_split = static_cast<std::size_t>(std::sqrt(static_cast<double>(d)));
  }
  opt.features_per_split = std::clamp<std::size_t>(opt.features_per_split, 1, std::max<std::size_t>(d, 1));

  auto model = std::make_shared<ForestModel>();
  model->n_classes = k;
  model->trees.resize(static_cast<std::size_t>(hp.rf_trees));
  detail::parallel_for(model->trees.size(), hp.threads, [&](std::size_t i) {
    Rng rng(derive_seed(hp.model_seed, i));
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = static_cast<std::size_t>(uniform_index(rng, n));
    model->trees[i] = detail::grow_classification_tree(x, y, std::move(sample), opt, rng);
  });
  return model;
}

std::shared_ptr<BoostedModel> fit_boosted(const Matrix& x, std::span<const int> y, std::size_t k,
                                          const Hyperparams& hp) {
  const std::size_t n = x.rows();
  const auto sorted = detail::presort_columns(x);
  const auto counts = class_counts(y, k);
  detail::BoostTreeOptions opt{hp.gbt_depth, hp.gbt_lambda, hp.gbt_min_child_weight, hp.gbt_learning_rate};

  auto model = std::make_shared<BoostedModel>();
  model->n_classes = k;
  const std::size_t outputs = k == 2 ? 1 : k;
  // start from the class log-priors; absent classes get a floor of half a record
  auto prior = [&](std::size_t c) {
    return std::max(static_cast<double>(counts[c]), 0.5) / static_cast<double>(n);
  };
  if (k == 2) {
    model->base = {std::log(prior(1) / prior(0))};
  } else {
    for (std::size_t c = 0; c < k; ++c) model->base.push_back(std::log(prior(c)));
  }

  std::vector<double> score(n * outputs);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < outputs; ++c) score[r * outputs + c] = model->base[c];
  }
  std::vector<std::vector<double>> grad(outputs, std::vector<double>(n)), hess = grad;
  std::vector<double> prob(k);

  for (int round = 0; round < hp.gbt_rounds; ++round) {
    for (std::size_t r = 0; r < n; ++r) {
      const auto label = static_cast<std::size_t>(y[r]);
      if (k == 2) {
        const double p = 1.0 / (1.0 + std::exp(-score[r]));
        grad[0][r] = p - (label == 1 ? 1.0 : 0.0);
        hess[0][r] = std::max(p * (1.0 - p), 1e-16);
        continue;
      }
      const double* s = &score[r * k];
      const double top = *std::max_element(s, s + k);
      double z = 0.0;
      for (std::size_t c = 0; c < k; ++c) z += (prob[c] = std::exp(s[c] - top));
      for (std::size_t c = 0; c < k; ++c) {
        const double p = prob[c] / z;
        grad[c][r] = p - (label == c ? 1.0 : 0.0);
        hess[c][r] = std::max(p * (1.0 - p), 1e-16);
      }
    }
    std::vector<Tree> trees(outputs);
    for (std::size_t c = 0; c < outputs; ++c) {
      trees[c] = detail::grow_boosting_tree(x, sorted, grad[c], hess[c], opt);
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto row = x.row(r);
      for (std::size_t c = 0; c < outputs; ++c) score[r * outputs + c] += trees[c].leaf(row).value;
    }
    model->rounds.push_back(std::move(trees));
  }
  return model;
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::svm_linear: return "svm_linear";
    case ClassifierKind::random_forest: return "random_forest";
    case ClassifierKind::gbt: return "gbt";
    case ClassifierKind::zero_rule: return "zero_rule";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(const std::string& text) {
  if (text == "knn" || text == "k-nn") return ClassifierKind::knn;
  if (text == "svm" || text == "svm_linear" || text == "svm-linear") return ClassifierKind::svm_linear;
  if (text == "rf" || text == "random_forest" || text == "random-forest") return ClassifierKind::random_forest;
  if (text == "gbt" || text == "xgboost") return ClassifierKind::gbt;
  if (text == "zero_rule" || text == "zero-rule" || text == "zeror") return ClassifierKind::zero_rule;
  throw UsageError("unknown classifier '" + text + "'");
}

void Hyperparams::validate() const {
  if (knn_k < 1) throw UsageError("knn_k must be at least 1");
  if (!(svm_c > 0.0)) throw UsageError("svm_c must be positive");
  if (svm_epochs < 1) throw UsageError("svm_epochs must be at least 1");
  if (!(svm_learning_rate > 0.0)) throw UsageError("svm_learning_rate must be positive");
  if (rf_trees < 1) throw UsageError("rf_trees must be at least 1");
  if (rf_max_depth && *rf_max_depth < 1) throw UsageError("rf_max_depth must be at least 1");
  if (rf_feature_subsample && !(*rf_feature_subsample > 0.0 && *rf_feature_subsample <= 1.0)) {
    throw UsageError("rf_feature_subsample must lie in (0, 1]");
  }
  if (gbt_rounds < 1) throw UsageError("gbt_rounds must be at least 1");
  if (gbt_depth < 1) throw UsageError("gbt_depth must be at least 1");
  if (!(gbt_learning_rate > 0.0 && gbt_learning_rate <= 1.0)) {
    throw UsageError("gbt_learning_rate must lie in (0, 1]");
  }
  if (!(gbt_lambda >= 0.0)) throw UsageError("gbt_lambda must be non-negative");
  if (!(gbt_min_child_weight >= 0.0)) throw UsageError("gbt_min_child_weight must be non-negative");
}

std::vector<int> Model::predict(const Matrix& features) const {
  if (features.cols() != dimension_) {
    throw Error("predict: expected " + std::to_string(dimension_) + " features, got " +
                std::to_string(features.cols()));
  }
  return impl_->predict(features, impl_->threads);
}

std::string Model::dump() const {
  std::ostringstream out;
  out.precision(17);
  out << "model " << to_string(kind_) << '\n' << "classes";
  for (const auto& c : class_names_) out << ' ' << c;
  out << '\n' << "dimension " << dimension_ << '\n';
  impl_->dump(out);
  return out.str();
}

Model fit(ClassifierKind kind, const Matrix& features, std::span<const int> labels,
          const std::vector<std::string>& class_names, const Hyperparams& hp) {
  hp.validate();
  const std::size_t n = features.rows();
  const std::size_t k = class_names.size();
  if (n == 0) throw Error("fit: empty training set");
  if (labels.size() != n) throw Error("fit: label count does not match feature rows");
  if (k == 0) throw Error("fit: no classes");
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= k) throw Error("fit: label out of range");
  }
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw Error("fit: non-finite feature value");
  }

  Model m;
  m.kind_ = kind;
  m.class_names_ = class_names;
  m.dimension_ = features.cols();

  const auto counts = class_counts(labels, k);
  const auto present = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  std::shared_ptr<Model::Impl> impl;
  if (kind == ClassifierKind::zero_rule || present == 1) {
    if (kind != ClassifierKind::zero_rule) {
      warn("training data for " + to_string(kind) + " holds a single class; using a constant predictor");
    }
    auto c = std::make_shared<ConstantModel>();
    c->label = argmax_count(counts);
    impl = c;
  } else {
    switch (kind) {
      case ClassifierKind::knn:
        impl = std::make_shared<KnnModel>(features, labels, static_cast<std::size_t>(hp.knn_k), k);
        break;
      case ClassifierKind::svm_linear:
        impl = fit_svm(features, labels, k, hp, m.objective_);
        break;
      case ClassifierKind::random_forest:
        impl = fit_forest(features, labels, k, hp);
        break;
      case ClassifierKind::gbt:
        impl = fit_boosted(features, labels, k, hp);
        break;
      case ClassifierKind::zero_rule:
        break;
    }
  }
  impl->threads = hp.threads;
  m.impl_ = std::move(impl);
  return m;
}

}  // namespace erasure
