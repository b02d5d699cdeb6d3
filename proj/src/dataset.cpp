#include "erasure/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_set>

#include "erasure/csv.hpp"
#include "erasure/error.hpp"
#include "erasure/rng.hpp"

namespace erasure {
namespace {

using csv::is_missing;
using csv::parse_number;

std::string number_text(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Target values as text, after merging.
std::vector<std::string> target_text(const Dataset& ds,
                                     const std::map<std::string, std::string>& merge) {
  std::vector<std::string> out;
  const auto& col = ds.values(ds.schema().target());
  if (const auto* s = std::get_if<std::vector<std::string>>(&col)) {
    out = *s;
  } else {
    for (double v : std::get<std::vector<double>>(col)) out.push_back(number_text(v));
  }
  for (auto& v : out) {
    if (auto it = merge.find(v); it != merge.end()) v = it->second;
  }
  return out;
}

}  // namespace

Schema::Schema(std::vector<Column> columns, std::string target,
               std::vector<std::string> feature_columns)
    : columns_(std::move(columns)), target_(std::move(target)), features_(std::move(feature_columns)) {
  std::set<std::string> names;
  for (const auto& c : columns_) {
    if (c.name.empty()) throw Error("schema: empty column name");
    if (!names.insert(c.name).second) throw Error("schema: duplicate column '" + c.name + "'");
  }
  if (!names.count(target_)) throw Error("schema: target '" + target_ + "' is not a column");
  std::set<std::string> seen;
  for (const auto& f : features_) {
    if (!names.count(f)) throw Error("schema: feature '" + f + "' is not a column");
    if (f == target_) throw Error("schema: target '" + f + "' listed as a feature");
    if (!seen.insert(f).second) throw Error("schema: feature '" + f + "' listed twice");
  }
}

std::optional<std::size_t> Schema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::require(const std::string& name) const {
  if (auto i = index_of(name)) return *i;
  throw Error("unknown column '" + name + "'");
}

Dataset::Dataset(Schema schema, std::vector<ColumnValues> columns, std::vector<std::size_t> row_ids)
    : schema_(std::move(schema)), columns_(std::move(columns)), row_ids_(std::move(row_ids)) {
  if (columns_.size() != schema_.columns().size()) throw Error("dataset: column count mismatch");
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const bool numeric = schema_.columns()[i].kind == ColumnKind::numeric;
    const std::size_t n = std::visit([](const auto& v) { return v.size(); }, columns_[i]);
    if (numeric != std::holds_alternative<std::vector<double>>(columns_[i])) {
      throw Error("dataset: column '" + schema_.columns()[i].name + "' has the wrong kind");
    }
    if (n != row_ids_.size()) throw Error("dataset: ragged column '" + schema_.columns()[i].name + "'");
  }
}

const ColumnValues& Dataset::values(const std::string& column) const {
  return columns_[schema_.require(column)];
}

const std::vector<std::string>& Dataset::categorical(const std::string& column) const {
  const auto* v = std::get_if<std::vector<std::string>>(&values(column));
  if (!v) throw Error("column '" + column + "' is not categorical");
  return *v;
}

const std::vector<double>& Dataset::numeric(const std::string& column) const {
  const auto* v = std::get_if<std::vector<double>>(&values(column));
  if (!v) throw Error("column '" + column + "' is not numeric");
  return *v;
}

Dataset Dataset::take(std::span<const std::size_t> positions) const {
  std::vector<ColumnValues> cols;
  cols.reserve(columns_.size());
  for (const auto& col : columns_) {
    cols.push_back(std::visit(
        [&](const auto& v) -> ColumnValues {
          std::decay_t<decltype(v)> out;
          out.reserve(positions.size());
          for (auto p : positions) out.push_back(v.at(p));
          return out;
        },
        col));
  }
  std::vector<std::size_t> ids;
  ids.reserve(positions.size());
  for (auto p : positions) ids.push_back(row_ids_.at(p));
  return Dataset(schema_, std::move(cols), std::move(ids));
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  csv::Reader reader(in);
  csv::Row header;
  if (!reader.next(header)) throw Error("'" + path.string() + "': missing header row");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  // file column position for each schema column; other file columns are ignored
  std::vector<std::size_t> source(schema.columns().size());
  {
    std::string problems;
    for (std::size_t i = 0; i < schema.columns().size(); ++i) {
      const auto& name = schema.columns()[i].name;
      const auto hits = std::count(header.begin(), header.end(), name);
      if (hits == 0) problems += " missing '" + name + "'";
      if (hits > 1) problems += " duplicate '" + name + "'";
      source[i] = static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    }
    if (!problems.empty()) {
      throw Error("'" + path.string() + "': header does not match schema;" + problems);
    }
  }

  std::vector<ColumnValues> cols;
  for (const auto& c : schema.columns()) {
    if (c.kind == ColumnKind::numeric) {
      cols.emplace_back(std::vector<double>{});
    } else {
      cols.emplace_back(std::vector<std::string>{});
    }
  }

  std::size_t dropped = 0;
  std::size_t next_id = 0;
  std::vector<std::size_t> ids;
  csv::Row row;
  while (reader.next(row)) {
    if (row.size() != header.size()) {
      throw Error("'" + path.string() + "' line " + std::to_string(reader.line()) + ": expected " +
                  std::to_string(header.size()) + " fields, found " + std::to_string(row.size()));
    }
    bool complete = true;
    for (std::size_t i = 0; i < source.size() && complete; ++i) complete = !is_missing(row[source[i]]);
    if (!complete) {
      ++dropped;
      continue;
    }
    for (std::size_t i = 0; i < source.size(); ++i) {
      const auto& token = row[source[i]];
      if (auto* nums = std::get_if<std::vector<double>>(&cols[i])) {
        const auto v = parse_number(token);
        if (!v) {
          throw Error("'" + path.string() + "' line " + std::to_string(reader.line()) +
                      ": non-numeric token '" + token + "' in numeric column '" +
                      schema.columns()[i].name + "'");
        }
        nums->push_back(*v);
      } else {
        std::get<std::vector<std::string>>(cols[i]).push_back(token);
      }
    }
    ids.push_back(next_id++);
  }
  if (ids.empty()) throw Error("'" + path.string() + "': zero rows after dropping incomplete records");
  if (dropped) {
    warn("'" + path.string() + "': dropped " + std::to_string(dropped) +
         " rows with missing values");
  }
  Dataset ds(schema, std::move(cols), std::move(ids));
  ds.dropped_rows = dropped;
  return ds;
}

Dataset merge_classes(const Dataset& ds, const std::map<std::string, std::string>& merge) {
  Dataset out = ds;
  if (merge.empty()) return out;
  auto& col = out.columns_[out.schema_.require(out.schema_.target())];
  auto* text = std::get_if<std::vector<std::string>>(&col);
  if (!text) throw Error("class merges need a categorical target");
  for (auto& v : *text) {
    if (auto it = merge.find(v); it != merge.end()) v = it->second;
  }
  return out;
}

Matrix Matrix::take(std::span<const std::size_t> positions) const {
  Matrix out(positions.size(), cols_);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto src = row(positions[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

std::size_t Encoding::dimension() const {
  std::size_t d = 0;
  for (const auto& g : groups) d += g.width();
  return d;
}

std::optional<int> Encoding::class_index(const std::string& name) const {
  const auto it = std::lower_bound(class_names.begin(), class_names.end(), name);
  if (it == class_names.end() || *it != name) return std::nullopt;
  return static_cast<int>(it - class_names.begin());
}

PreparedDataset PreparedDataset::take(std::span<const std::size_t> positions) const {
  PreparedDataset out;
  out.features = features.take(positions);
  out.class_names = class_names;
  out.labels.reserve(positions.size());
  out.row_ids.reserve(positions.size());
  for (auto p : positions) {
    out.labels.push_back(labels.at(p));
    out.row_ids.push_back(row_ids.at(p));
  }
  return out;
}

Encoding fit_encoding(const Dataset& ds, const PreprocessConfig& cfg) {
  const auto& schema = ds.schema();
  Encoding enc;
  enc.class_merge = cfg.class_merge;

  const auto raw_targets = target_text(ds, {});
  {
    const std::set<std::string> present(raw_targets.begin(), raw_targets.end());
    for (const auto& [from, to] : cfg.class_merge) {
      if (!present.count(from) && !present.count(to)) {
        throw Error("class merge '" + from + "' -> '" + to + "' matches no target value");
      }
    }
  }

  const std::set<std::string> features(schema.feature_columns().begin(),
                                       schema.feature_columns().end());
  std::size_t offset = 0;
  for (const auto& column : schema.columns()) {
    if (!features.count(column.name)) continue;
    FeatureGroup g{column.name, column.kind, {}, offset};
    if (column.kind == ColumnKind::categorical) {
      const auto& v = ds.categorical(column.name);
      const std::set<std::string> cats(v.begin(), v.end());
      g.categories.assign(cats.begin(), cats.end());
      if (g.categories.size() == 1) {
        warn("categorical column '" + column.name + "' has a single value; emitting a constant column");
      }
    }
    offset += g.width();
    enc.groups.push_back(std::move(g));
  }

  const auto targets = target_text(ds, cfg.class_merge);
  const std::set<std::string> classes(targets.begin(), targets.end());
  enc.class_names.assign(classes.begin(), classes.end());
  if (cfg.positive_class) {
    enc.positive_class = enc.class_index(*cfg.positive_class);
    if (!enc.positive_class) throw Error("positive class '" + *cfg.positive_class + "' not found");
  }
  return enc;
}

PreparedDataset encode(const Dataset& ds, const Encoding& enc) {
  PreparedDataset pd;
  const std::size_t n = ds.size();
  pd.features = Matrix(n, enc.dimension());
  pd.class_names = enc.class_names;
  pd.row_ids = ds.row_ids();

  for (const auto& g : enc.groups) {
    if (g.kind == ColumnKind::numeric) {
      const auto& v = ds.numeric(g.column);
      for (std::size_t r = 0; r < n; ++r) pd.features(r, g.offset) = v[r];
    } else {
      const auto& v = ds.categorical(g.column);
      for (std::size_t r = 0; r < n; ++r) {
        const auto it = std::lower_bound(g.categories.begin(), g.categories.end(), v[r]);
        if (it != g.categories.end() && *it == v[r]) {
          pd.features(r, g.offset + static_cast<std::size_t>(it - g.categories.begin())) = 1.0;
        }
      }
    }
  }

  pd.labels.reserve(n);
  for (const auto& t : target_text(ds, enc.class_merge)) {
    const auto idx = enc.class_index(t);
    if (!idx) throw Error("target value '" + t + "' is not a known class");
    pd.labels.push_back(*idx);
  }
  return pd;
}

PreparedDataset preprocess(const Dataset& ds, const PreprocessConfig& cfg) {
  return encode(ds, fit_encoding(ds, cfg));
}

SplitIndices train_test_split(std::size_t n, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("split ratio must lie in (0, 1)");
  if (n < 2) throw Error("split needs at least two rows");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(perm.begin(), perm.end(), rng);
  const auto n_train = static_cast<std::size_t>(round_half_even(ratio * static_cast<double>(n)));
  SplitIndices s;
  s.seed = seed;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace erasure
