#pragma once

// Supervised classifiers behind one fit/predict contract.
//
//   knn            k nearest neighbours, Euclidean distance, majority vote
//   svm_linear     one-vs-rest linear SVMs trained by stochastic subgradient
//                  descent (AdaGrad step sizes, iterate averaging) on
//                  hinge loss + (lambda/2)|w|^2 with lambda = 1 / (C n);
//                  the bias is an extra regularised weight
//   random_forest  bootstrap CART trees (Gini, sqrt(d) features per split),
//                  majority vote
//   gbt            gradient-boosted regression trees on the softmax
//                  log-loss with second-order split gain
//   zero_rule      training majority class
//
// All randomness derives from Hyperparams::model_seed, so results do not
// depend on the number of worker threads.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erasure/dataset.hpp"

namespace erasure {

enum class ClassifierKind { knn, svm_linear, random_forest, gbt, zero_rule };

std::string to_string(ClassifierKind kind);
/// Accepts the canonical names plus "svm", "rf", "xgboost".
ClassifierKind parse_classifier_kind(const std::string& text);

struct Hyperparams {
  int knn_k = 5;
  double svm_c = 1.0;
  int svm_epochs = 20;
  double svm_learning_rate = 0.1;
  int rf_trees = 100;
  std::optional<int> rf_max_depth;  // unbounded when empty
  /// Fraction of features tried per split; empty means sqrt(d) / d.
  std::optional<double> rf_feature_subsample;
  int gbt_rounds = 100;
  int gbt_depth = 3;
  double gbt_learning_rate = 0.1;
  double gbt_lambda = 1.0;            // L2 penalty on leaf weights
  double gbt_min_child_weight = 1.0;  // minimum hessian sum per child
  std::uint64_t model_seed = 0;
  /// Worker threads for tree building and neighbour search; 0 = hardware.
  unsigned threads = 0;

  /// Throws UsageError on out-of-range values.
  void validate() const;
};

class Model {
 public:
  ClassifierKind kind() const { return kind_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t dimension() const { return dimension_; }

  /// Labels for each row. Throws Error when the column count differs from training.
  std::vector<int> predict(const Matrix& features) const;

  /// Human-readable dump for debugging; the format is not a stable interface.
  std::string dump() const;

  /// Training objective of the SVM weights kept after each epoch (the best
  /// seen so far), averaged over the one-vs-rest problems. Empty for other kinds.
  const std::vector<double>& training_objective() const { return objective_; }

  struct Impl;

 private:
  friend Model fit(ClassifierKind, const Matrix&, std::span<const int>,
                   const std::vector<std::string>&, const Hyperparams&);

  ClassifierKind kind_ = ClassifierKind::zero_rule;
  std::vector<std::string> class_names_;
  std::size_t dimension_ = 0;
  std::vector<double> objective_;
  std::shared_ptr<const Impl> impl_;
};

/// Trains a model. Throws Error on an empty training set, non-finite
/// features or out-of-range labels. Training data with a single class yields
/// a constant predictor and a warning.
Model fit(ClassifierKind kind, const Matrix& features, std::span<const int> labels,
          const std::vector<std::string>& class_names, const Hyperparams& hp);

}  // namespace erasure
