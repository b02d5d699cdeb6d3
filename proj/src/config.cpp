#include "erasure/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "erasure/csv.hpp"
#include "erasure/error.hpp"

#ifndef ERASURE_DEFAULT_DATA_DIR
#define ERASURE_DEFAULT_DATA_DIR "data"
#endif

namespace erasure {
namespace {

using nlohmann::json;

Column cat(std::string name) { return {std::move(name), ColumnKind::categorical}; }
Column num(std::string name) { return {std::move(name), ColumnKind::numeric}; }

DatasetSpec adult() {
  DatasetSpec s;
  s.id = "adult";
  s.file = "adult.csv";
  s.schema = Schema({num("age"), cat("workclass"), num("fnlwgt"), cat("education"), num("education-num"),
                     cat("marital-status"), cat("occupation"), cat("relationship"), cat("race"),
                     cat("sex"), num("capital-gain"), num("capital-loss"), num("hours-per-week"),
                     cat("native-country"), cat("salary-class")},
                    "salary-class",
                    {"sex", "age", "race", "marital-status", "education", "native-country",
                     "workclass", "occupation"});
  s.preprocess.positive_class = ">50K";
  s.averaging = Averaging::binary_positive_class;
  return s;
}

// total_bedrooms is left out: its gaps would otherwise drop 207 rows
DatasetSpec cahousing() {
  DatasetSpec s;
  s.id = "cahousing";
  s.file = "cahousing.csv";
  s.schema = Schema({num("longitude"), num("latitude"), num("housing_median_age"), num("total_rooms"),
                     num("population"), num("households"), num("median_income"),
                     num("median_house_value"), cat("ocean_proximity")},
                    "ocean_proximity",
                    {"housing_median_age", "median_house_value", "median_income", "longitude",
                     "latitude"});
  s.preprocess.class_merge = {{"NEAR BAY", "NEAR OCEAN"}, {"ISLAND", "NEAR OCEAN"}};
  s.averaging = Averaging::macro;
  s.ordinals["ocean_proximity"] = {
      {"NEAR OCEAN", 1}, {"NEAR BAY", 1}, {"ISLAND", 1}, {"<1H OCEAN", 2}, {"INLAND", 3}};
  return s;
}

DatasetSpec cmc() {
  DatasetSpec s;
  s.id = "cmc";
  s.file = "cmc.csv";
  s.schema = Schema({num("wife_age"), num("wife_edu"), num("husband_edu"), num("num_children"),
                     num("wife_religion"), num("wife_working"), num("husband_occupation"),
                     num("standard_of_living"), num("media_exposure"), cat("contraceptive_method")},
                    "contraceptive_method", {"wife_age", "wife_edu", "num_children"});
  s.averaging = Averaging::macro;
  s.ordinals["contraceptive_method"] = {{"no_use", 1}, {"long-term", 2}, {"short-term", 3}};
  return s;
}

DatasetSpec mgm() {
  DatasetSpec s;
  s.id = "mgm";
  s.file = "mgm.csv";
  s.schema = Schema({num("bi_rads_assessment"), num("age"), num("shape"), num("margin"), num("density"),
                     cat("severity")},
                    "severity", {"bi_rads_assessment", "age", "shape", "margin", "density"});
  s.preprocess.positive_class = "malignant";
  s.averaging = Averaging::binary_positive_class;
  return s;
}

DeletionScenario selection(std::string attr, std::vector<std::string> values, std::string label = {}) {
  DeletionScenario s;
  s.mode = DeletionMode::selection;
  s.attribute = std::move(attr);
  s.selected_values = std::move(values);
  s.label = std::move(label);
  return s;
}

DeletionScenario by_mode(DeletionMode mode, std::string attr, std::string label, bool reversed = false) {
  DeletionScenario s;
  s.mode = mode;
  s.attribute = std::move(attr);
  s.label = std::move(label);
  s.reversed = reversed;
  return s;
}

// ---- JSON ----

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + ": '" + key + "' is missing or has the wrong type");
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw UsageError(where + ": unknown key '" + key + "'");
  }
}

json schema_json(const Schema& schema) {
  json cols = json::array();
  for (const auto& c : schema.columns()) {
    cols.push_back({{"name", c.name}, {"kind", c.kind == ColumnKind::numeric ? "numeric" : "categorical"}});
  }
  return cols;
}

json dataset_json(const DatasetSpec& d) {
  json j;
  j["id"] = d.id;
  j["file"] = d.file.generic_string();
  j["columns"] = schema_json(d.schema);
  j["target"] = d.schema.target();
  j["features"] = d.schema.feature_columns();
  j["class_merge"] = d.preprocess.class_merge;
  j["positive_class"] = d.preprocess.positive_class ? json(*d.preprocess.positive_class) : json(nullptr);
  j["averaging"] = to_string(d.averaging);
  j["ordinals"] = d.ordinals;
  return j;
}

Averaging parse_averaging(const std::string& text) {
  if (text == "macro") return Averaging::macro;
  if (text == "binary" || text == "binary_positive_class") return Averaging::binary_positive_class;
  throw UsageError("unknown averaging '" + text + "'");
}

DatasetSpec dataset_from_json(const json& j) {
  if (j.is_string()) return builtin_dataset(j.get<std::string>());
  const std::string where = "config.dataset";
  check_keys(j, {"id", "file", "columns", "target", "features", "class_merge", "positive_class",
                 "averaging", "ordinals"},
             where);
  const auto file = get<std::string>(j, "file", where);
  const auto target = get<std::string>(j, "target", where);
  const auto features = j.contains("features") ? get<std::vector<std::string>>(j, "features", where)
                                               : std::vector<std::string>{};
  std::optional<std::string> positive;
  if (j.contains("positive_class") && !j["positive_class"].is_null()) {
    positive = get<std::string>(j, "positive_class", where);
  }
  DatasetSpec d;
  if (j.contains("columns")) {
    std::vector<Column> cols;
    for (const auto& c : j["columns"]) {
      check_keys(c, {"name", "kind"}, where + ".columns[]");
      const auto kind = get<std::string>(c, "kind", where + ".columns[]");
      if (kind != "numeric" && kind != "categorical") throw UsageError("unknown column kind '" + kind + "'");
      cols.push_back({get<std::string>(c, "name", where + ".columns[]"),
                      kind == "numeric" ? ColumnKind::numeric : ColumnKind::categorical});
    }
    std::vector<std::string> feats = features;
    if (feats.empty()) {
      for (const auto& c : cols) {
        if (c.name != target) feats.push_back(c.name);
      }
    }
    try {
      d.schema = Schema(std::move(cols), target, std::move(feats));
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    d.file = file;
    d.preprocess.positive_class = positive;
    d.averaging = positive ? Averaging::binary_positive_class : Averaging::macro;
  } else {
    std::filesystem::path p = file;
    if (p.is_relative()) p = data_directory() / p;
    d = infer_dataset(p, target, features, positive);
    d.file = file;
  }
  d.id = j.contains("id") ? get<std::string>(j, "id", where) : std::filesystem::path(file).stem().string();
  if (j.contains("class_merge")) {
    d.preprocess.class_merge = get<std::map<std::string, std::string>>(j, "class_merge", where);
  }
  if (j.contains("averaging")) d.averaging = parse_averaging(get<std::string>(j, "averaging", where));
  if (j.contains("ordinals")) {
    d.ordinals = get<std::map<std::string, std::map<std::string, double>>>(j, "ordinals", where);
  }
  return d;
}

json scenario_json(const DeletionScenario& s) {
  json j;
  j["mode"] = to_string(s.mode);
  j["attribute"] = s.attribute;
  j["values"] = s.selected_values;
  j["reversed"] = s.reversed;
  j["age_cutoff"] = s.age_cutoff;
  j["ordinal"] = s.ordinal;
  j["incremental"] = s.incremental;
  j["seed"] = s.seed;
  j["label"] = s.label;
  json inner = json::array();
  for (const auto& c : s.combine_with) inner.push_back(scenario_json(c));
  j["combine_with"] = inner;
  return j;
}

DeletionScenario scenario_from_json(const json& j, const DatasetSpec& d, const std::string& where) {
  check_keys(j, {"preset", "mode", "attribute", "values", "reversed", "age_cutoff", "ordinal",
                 "combine_with", "incremental", "seed", "label"},
             where);
  DeletionScenario s;
  if (j.contains("preset")) {
    for (const char* key : {"mode", "attribute", "values", "reversed", "age_cutoff", "ordinal", "combine_with"}) {
      if (j.contains(key)) throw UsageError(where + ": '" + key + "' cannot be combined with a preset");
    }
    s = scenario_preset(d.id, get<std::string>(j, "preset", where));
  } else {
    if (j.contains("mode")) s.mode = parse_deletion_mode(get<std::string>(j, "mode", where));
    if (j.contains("attribute")) s.attribute = get<std::string>(j, "attribute", where);
    if (j.contains("values")) s.selected_values = get<std::vector<std::string>>(j, "values", where);
    if (j.contains("reversed")) s.reversed = get<bool>(j, "reversed", where);
    if (j.contains("age_cutoff")) s.age_cutoff = get<double>(j, "age_cutoff", where);
    if (j.contains("ordinal")) s.ordinal = get<std::map<std::string, double>>(j, "ordinal", where);
    if (j.contains("combine_with")) {
      for (const auto& c : j["combine_with"]) s.combine_with.push_back(scenario_from_json(c, d, where + ".combine_with[]"));
    }
  }
  if (j.contains("incremental")) s.incremental = get<bool>(j, "incremental", where);
  if (j.contains("seed")) s.seed = get<std::uint64_t>(j, "seed", where);
  if (j.contains("label")) s.label = get<std::string>(j, "label", where);
  attach_ordinals(s, d);
  return s;
}

json hyperparams_json(const Hyperparams& h) {
  json j;
  j["knn_k"] = h.knn_k;
  j["svm_c"] = h.svm_c;
  j["svm_epochs"] = h.svm_epochs;
  j["svm_learning_rate"] = h.svm_learning_rate;
  j["rf_trees"] = h.rf_trees;
  j["rf_max_depth"] = h.rf_max_depth ? json(*h.rf_max_depth) : json(nullptr);
  j["rf_feature_subsample"] = h.rf_feature_subsample ? json(*h.rf_feature_subsample) : json(nullptr);
  j["gbt_rounds"] = h.gbt_rounds;
  j["gbt_depth"] = h.gbt_depth;
  j["gbt_learning_rate"] = h.gbt_learning_rate;
  j["gbt_lambda"] = h.gbt_lambda;
  j["gbt_min_child_weight"] = h.gbt_min_child_weight;
  j["model_seed"] = h.model_seed;
  return j;
}

Hyperparams hyperparams_from_json(const json& j) {
  const std::string where = "config.hyperparams";
  check_keys(j, {"knn_k", "svm_c", "svm_epochs", "svm_learning_rate", "rf_trees", "rf_max_depth",
                 "rf_feature_subsample", "gbt_rounds", "gbt_depth", "gbt_learning_rate", "gbt_lambda",
                 "gbt_min_child_weight", "model_seed", "threads"},
             where);
  Hyperparams h;
  if (j.contains("knn_k")) h.knn_k = get<int>(j, "knn_k", where);
  if (j.contains("svm_c")) h.svm_c = get<double>(j, "svm_c", where);
  if (j.contains("svm_epochs")) h.svm_epochs = get<int>(j, "svm_epochs", where);
  if (j.contains("svm_learning_rate")) h.svm_learning_rate = get<double>(j, "svm_learning_rate", where);
  if (j.contains("rf_trees")) h.rf_trees = get<int>(j, "rf_trees", where);
  if (j.contains("rf_max_depth") && !j["rf_max_depth"].is_null()) h.rf_max_depth = get<int>(j, "rf_max_depth", where);
  if (j.contains("rf_feature_subsample") && !j["rf_feature_subsample"].is_null()) {
    h.rf_feature_subsample = get<double>(j, "rf_feature_subsample", where);
  }
  if (j.contains("gbt_rounds")) h.gbt_rounds = get<int>(j, "gbt_rounds", where);
  if (j.contains("gbt_depth")) h.gbt_depth = get<int>(j, "gbt_depth", where);
  if (j.contains("gbt_learning_rate")) h.gbt_learning_rate = get<double>(j, "gbt_learning_rate", where);
  if (j.contains("gbt_lambda")) h.gbt_lambda = get<double>(j, "gbt_lambda", where);
  if (j.contains("gbt_min_child_weight")) h.gbt_min_child_weight = get<double>(j, "gbt_min_child_weight", where);
  if (j.contains("model_seed")) h.model_seed = get<std::uint64_t>(j, "model_seed", where);
  if (j.contains("threads")) h.threads = get<unsigned>(j, "threads", where);
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("ERASURE_BENCH_DATA_DIR"); env && *env) return env;
  return ERASURE_DEFAULT_DATA_DIR;
}

std::filesystem::path dataset_path(const DatasetSpec& spec) {
  return spec.file.is_relative() ? data_directory() / spec.file : spec.file;
}

std::vector<std::string> builtin_dataset_ids() { return {"adult", "cahousing", "cmc", "mgm"}; }

DatasetSpec builtin_dataset(const std::string& id) {
  if (id == "adult") return adult();
  if (id == "cahousing") return cahousing();
  if (id == "cmc") return cmc();
  if (id == "mgm") return mgm();
  throw UsageError("unknown dataset '" + id + "' (expected adult, cahousing, cmc, mgm or a CSV path)");
}

DatasetSpec infer_dataset(const std::filesystem::path& file, const std::string& target,
                          const std::vector<std::string>& features,
                          const std::optional<std::string>& positive_class) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open '" + file.string() + "'");
  csv::Reader reader(in);
  csv::Row header;
  if (!reader.next(header)) throw Error("'" + file.string() + "': missing header row");
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  std::vector<bool> numeric(header.size(), true);
  std::vector<bool> seen(header.size(), false);
  csv::Row row;
  while (reader.next(row)) {
    for (std::size_t i = 0; i < std::min(row.size(), header.size()); ++i) {
      if (csv::is_missing(row[i])) continue;
      seen[i] = true;
      if (numeric[i] && !csv::parse_number(row[i])) numeric[i] = false;
    }
  }
  if (std::find(header.begin(), header.end(), target) == header.end()) {
    throw UsageError("target '" + target + "' is not a column of '" + file.string() + "'");
  }
  std::vector<Column> cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const bool is_num = numeric[i] && seen[i] && header[i] != target;
    cols.push_back({header[i], is_num ? ColumnKind::numeric : ColumnKind::categorical});
  }
  std::vector<std::string> feats = features;
  if (feats.empty()) {
    for (const auto& h : header) {
      if (h != target) feats.push_back(h);
    }
  }
  DatasetSpec d;
  d.id = file.stem().string();
  d.file = file;
  try {
    d.schema = Schema(std::move(cols), target, std::move(feats));
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  d.preprocess.positive_class = positive_class;
  d.averaging = positive_class ? Averaging::binary_positive_class : Averaging::macro;
  return d;
}

std::vector<ScenarioPreset> scenario_presets(const std::string& dataset_id) {
  std::vector<ScenarioPreset> out{{"random", "uniform deletion", DeletionScenario{}}};
  if (dataset_id == "adult") {
    auto age_married = by_mode(DeletionMode::age, "age", "Age and Marital Status");
    age_married.combine_with.push_back(selection("marital-status", {"married-civ-spouse"}));
    out.push_back({"target", "salary-class >50K weighted 2", selection("salary-class", {">50K"})});
    out.push_back({"age", "age below 45 weighted 2", by_mode(DeletionMode::age, "age", "Age")});
    out.push_back({"marital-status", "married-civ-spouse weighted 2",
                   selection("marital-status", {"married-civ-spouse"})});
    out.push_back({"age-marital-status", "age and marital-status weights multiplied", age_married});
    out.push_back({"never-married", "never-married weighted 2", selection("marital-status", {"never-married"})});
    out.push_back({"married-never-married", "married-civ-spouse or never-married weighted 2",
                   selection("marital-status", {"married-civ-spouse", "never-married"})});
  } else if (dataset_id == "cahousing") {
    auto target = by_mode(DeletionMode::positive_numeric, "ocean_proximity", "Ocean Proximity", true);
    out.push_back({"target", "closer to the ocean weighted higher", target});
    out.push_back({"longitude", "western thirds weighted higher",
                   by_mode(DeletionMode::thirds, "longitude", "Longitude", true)});
    out.push_back({"latitude", "northern thirds weighted higher",
                   by_mode(DeletionMode::thirds, "latitude", "Latitude")});
    out.push_back({"median-house-value", "expensive thirds weighted higher",
                   by_mode(DeletionMode::thirds, "median_house_value", "Median House Value")});
  } else if (dataset_id == "cmc") {
    out.push_back({"target", "short-term > long-term > no_use",
                   by_mode(DeletionMode::positive_numeric, "contraceptive_method", "Method")});
    out.push_back({"wife-education", "weight grows with wife_edu",
                   by_mode(DeletionMode::positive_numeric, "wife_edu", "Wife Education")});
    out.push_back({"children", "weight grows with num_children",
                   by_mode(DeletionMode::positive_numeric, "num_children", "Children")});
    out.push_back({"age", "wife_age below 45 weighted 2", by_mode(DeletionMode::age, "wife_age", "Age")});
  } else if (dataset_id == "mgm") {
    out.push_back({"target", "malignant weighted 2", selection("severity", {"malignant"})});
    out.push_back({"bi-rads", "weight grows with bi_rads_assessment",
                   by_mode(DeletionMode::positive_numeric, "bi_rads_assessment", "Bi Rads Assessment")});
    out.push_back({"shape", "weight grows with shape", by_mode(DeletionMode::positive_numeric, "shape", "Shape")});
    out.push_back({"age", "age below 45 weighted 2", by_mode(DeletionMode::age, "age", "Age")});
  }
  if (dataset_id == "cahousing" || dataset_id == "cmc") {
    const auto spec = builtin_dataset(dataset_id);
    for (auto& p : out) attach_ordinals(p.scenario, spec);
  }
  return out;
}

DeletionScenario scenario_preset(const std::string& dataset_id, const std::string& name) {
  std::string known;
  for (const auto& p : scenario_presets(dataset_id)) {
    if (p.name == name) return p.scenario;
    known += (known.empty() ? "" : ", ") + p.name;
  }
  throw UsageError("unknown scenario '" + name + "' for dataset '" + dataset_id + "' (known: " + known + ")");
}

void attach_ordinals(DeletionScenario& s, const DatasetSpec& d) {
  if (s.mode == DeletionMode::positive_numeric && s.ordinal.empty()) {
    if (const auto it = d.ordinals.find(s.attribute); it != d.ordinals.end()) s.ordinal = it->second;
  }
  for (auto& c : s.combine_with) attach_ordinals(c, d);
}

std::vector<double> parse_percent_range(const std::string& text) {
  const auto bad = [&] { return UsageError("--percent expects start:stop:step in percent, got '" + text + "'"); };
  std::vector<double> parts;
  std::size_t begin = 0;
  while (true) {
    const auto end = text.find(':', begin);
    const auto piece = text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
    const auto v = csv::parse_number(piece);
    if (!v) throw bad();
    parts.push_back(*v);
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  if (parts.size() == 1) return {parts[0] / 100.0};
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) throw bad();
  const auto steps = static_cast<long long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  std::vector<double> out;
  for (long long i = 0; i <= steps; ++i) {
    out.push_back((parts[0] + static_cast<double>(i) * parts[2]) / 100.0);
  }
  return out;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  const std::string where = "config";
  check_keys(j, {"dataset", "scenario", "classifiers", "hyperparams", "percentages", "percent", "split_seed",
                 "repetitions", "train_fraction", "fixed_test", "threads"},
             where);
  if (!j.contains("dataset")) throw UsageError("config: 'dataset' is required");
  ExperimentConfig cfg;
  cfg.dataset = dataset_from_json(j["dataset"]);
  if (j.contains("scenario")) cfg.scenario = scenario_from_json(j["scenario"], cfg.dataset, where + ".scenario");
  if (j.contains("classifiers")) {
    cfg.classifiers.clear();
    for (const auto& name : get<std::vector<std::string>>(j, "classifiers", where)) {
      cfg.classifiers.push_back(parse_classifier_kind(name));
    }
  }
  if (j.contains("hyperparams")) cfg.hyperparams = hyperparams_from_json(j["hyperparams"]);
  if (j.contains("percentages") && j.contains("percent")) {
    throw UsageError("config: give either 'percentages' or 'percent'");
  }
  if (j.contains("percentages")) cfg.percentages = get<std::vector<double>>(j, "percentages", where);
  if (j.contains("percent")) cfg.percentages = parse_percent_range(get<std::string>(j, "percent", where));
  if (j.contains("split_seed")) cfg.split_seed = get<std::uint64_t>(j, "split_seed", where);
  if (j.contains("repetitions")) cfg.repetitions = get<int>(j, "repetitions", where);
  if (j.contains("train_fraction")) cfg.train_fraction = get<double>(j, "train_fraction", where);
  if (j.contains("fixed_test")) cfg.fixed_test = get<bool>(j, "fixed_test", where);
  if (j.contains("threads")) cfg.threads = get<unsigned>(j, "threads", where);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["dataset"] = dataset_json(cfg.dataset);
  j["scenario"] = scenario_json(cfg.scenario);
  json kinds = json::array();
  for (auto k : cfg.classifiers) kinds.push_back(to_string(k));
  j["classifiers"] = kinds;
  j["hyperparams"] = hyperparams_json(cfg.hyperparams);
  j["percentages"] = cfg.percentages;
  j["split_seed"] = cfg.split_seed;
  j["repetitions"] = cfg.repetitions;
  j["train_fraction"] = cfg.train_fraction;
  j["fixed_test"] = cfg.fixed_test;
  return j.dump(2);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char ch : bytes) {
    state ^= ch;
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string config_hash(const ExperimentConfig& cfg) { return hex64(fnv1a64(config_to_json(cfg))); }

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::uint64_t state = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    state = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), state);
  }
  return "fnv1a64:" + hex64(state);
}

}  // namespace erasure
