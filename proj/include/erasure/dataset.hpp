#pragma once

// Tabular datasets: CSV loading, feature encoding and train/test splitting.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace erasure {

enum class ColumnKind { categorical, numeric };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
};

/// Column layout of a dataset. Validated on construction: unique names, the
/// target is a column, and the feature columns are distinct non-target columns.
class Schema {
 public:
  Schema() = default;
  Schema(std::vector<Column> columns, std::string target,
         std::vector<std::string> feature_columns);

  const std::vector<Column>& columns() const { return columns_; }
  const std::string& target() const { return target_; }
  const std::vector<std::string>& feature_columns() const { return features_; }

  std::optional<std::size_t> index_of(const std::string& name) const;
  /// Index of `name`; throws Error when absent.
  std::size_t require(const std::string& name) const;
  const Column& column(const std::string& name) const { return columns_[require(name)]; }

 private:
  std::vector<Column> columns_;
  std::string target_;
  std::vector<std::string> features_;
};

using ColumnValues = std::variant<std::vector<std::string>, std::vector<double>>;

/// Column-major table. Categorical columns hold strings, numeric columns hold
/// finite doubles. Every record carries a stable id assigned at load time.
class Dataset {
 public:
  Dataset(Schema schema, std::vector<ColumnValues> columns, std::vector<std::size_t> row_ids);

  const Schema& schema() const { return schema_; }
  std::size_t size() const { return row_ids_.size(); }
  const std::vector<std::size_t>& row_ids() const { return row_ids_; }

  const ColumnValues& values(const std::string& column) const;
  const std::vector<std::string>& categorical(const std::string& column) const;
  const std::vector<double>& numeric(const std::string& column) const;

  /// Records at the given positions, in the given order.
  Dataset take(std::span<const std::size_t> positions) const;

  /// Rows dropped by the loader for missing values.
  std::size_t dropped_rows = 0;

 private:
  friend Dataset merge_classes(const Dataset&, const std::map<std::string, std::string>&);

  Schema schema_;
  std::vector<ColumnValues> columns_;
  std::vector<std::size_t> row_ids_;
};

/// Loads an RFC-4180 CSV file whose header names every schema column once (any
/// order; columns outside the schema are skipped). Fields that are empty or "?"
/// count as missing; rows with a missing schema value are dropped and reported
/// through `Dataset::dropped_rows` and a warning.
Dataset load_csv(const std::filesystem::path& path, const Schema& schema);

struct PreprocessConfig {
  /// Target value -> replacement value, applied before class discovery.
  std::map<std::string, std::string> class_merge;
  /// Designated positive class for binary reporting.
  std::optional<std::string> positive_class;
};

/// Applies `merge` to the target column. Keys absent from the data are ignored.
Dataset merge_classes(const Dataset& ds, const std::map<std::string, std::string>& merge);

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  /// Rows at the given positions.
  Matrix take(std::span<const std::size_t> positions) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Output block of one feature column.
struct FeatureGroup {
  std::string column;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> categories;  // sorted; empty for numeric
  std::size_t offset = 0;
  std::size_t width() const { return kind == ColumnKind::numeric ? 1 : categories.size(); }
};

/// Frozen mapping from raw records to feature vectors and class indices.
/// Built once from a reference dataset so that encodings of its subsets keep
/// the same dimension; a category absent from the reference encodes as an
/// all-zero group.
struct Encoding {
  std::vector<FeatureGroup> groups;
  std::vector<std::string> class_names;  // sorted
  std::map<std::string, std::string> class_merge;
  std::optional<int> positive_class;

  std::size_t dimension() const;
  std::optional<int> class_index(const std::string& name) const;
};

struct PreparedDataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<std::size_t> row_ids;

  std::size_t size() const { return labels.size(); }
  std::size_t dimension() const { return features.cols(); }
  PreparedDataset take(std::span<const std::size_t> positions) const;
};

/// Discovers feature groups and classes from `ds`. Categories are ordered
/// lexicographically; groups follow schema column order.
Encoding fit_encoding(const Dataset& ds, const PreprocessConfig& cfg);

/// Encodes `ds` with a frozen encoding. Throws Error on a target value that is
/// not one of the encoding's classes.
PreparedDataset encode(const Dataset& ds, const Encoding& enc);

/// fit_encoding followed by encode.
PreparedDataset preprocess(const Dataset& ds, const PreprocessConfig& cfg);

/// Positions 0..n-1 partitioned into train and test, each sorted ascending.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// Seeded uniform permutation; the first round(ratio * n) positions train.
SplitIndices train_test_split(std::size_t n, double ratio, std::uint64_t seed);

inline SplitIndices train_test_split(const PreparedDataset& pd, double ratio, std::uint64_t seed) {
  return train_test_split(pd.size(), ratio, seed);
}

}  // namespace erasure
