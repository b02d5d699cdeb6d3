#include "erasure/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "erasure/config.hpp"
#include "erasure/error.hpp"
#include "erasure/reporting.hpp"

#ifndef ERASURE_VERSION
#define ERASURE_VERSION "0.0.0"
#endif

namespace erasure {
namespace {

struct RawFlags {
  std::string config;
  std::string dataset;
  std::vector<std::string> classifiers;
  std::string scenario;
  std::string mode;
  std::string attribute;
  std::vector<std::string> values;
  bool reversed = false;
  double age_cutoff = 45.0;
  bool incremental = false;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  std::uint64_t model_seed = 0;
  std::string percent;
  int repetitions = 1;
  bool fixed_test = false;
  double train_fraction = 0.7;
  std::vector<double> smooth_sigmas;
  std::string out = "results";
  std::string target;
  std::vector<std::string> features;
  std::string positive_class;
  unsigned threads = 0;
  std::vector<std::string> compare;
  bool dry_run = false;
  Hyperparams hp;
  int rf_max_depth = 0;
};

bool given(const CLI::App& app, const char* flag) { return app.count(flag) > 0; }

DatasetSpec resolve_dataset(const CLI::App& app, const RawFlags& f) {
  const auto ids = builtin_dataset_ids();
  if (std::find(ids.begin(), ids.end(), f.dataset) != ids.end()) {
    for (const char* flag : {"--target", "--features", "--positive-class"}) {
      if (given(app, flag)) throw UsageError(std::string(flag) + " applies to CSV path datasets only");
    }
    return builtin_dataset(f.dataset);
  }
  if (!given(app, "--target")) {
    throw UsageError("dataset '" + f.dataset + "' is not built in; a CSV path needs --target");
  }
  std::optional<std::string> positive;
  if (given(app, "--positive-class")) positive = f.positive_class;
  return infer_dataset(std::filesystem::absolute(f.dataset), f.target, f.features, positive);
}

DeletionScenario resolve_scenario(const CLI::App& app, const RawFlags& f, const DatasetSpec& d) {
  DeletionScenario s;
  if (given(app, "--scenario")) {
    for (const char* flag : {"--mode", "--attribute", "--values", "--reversed", "--age-cutoff"}) {
      if (given(app, flag)) throw UsageError(std::string(flag) + " cannot be combined with --scenario");
    }
    s = scenario_preset(d.id, f.scenario);
  } else {
    if (given(app, "--mode")) s.mode = parse_deletion_mode(f.mode);
    if (given(app, "--values") && s.mode != DeletionMode::selection) {
      throw UsageError("--values requires --mode selection");
    }
    if (given(app, "--age-cutoff") && s.mode != DeletionMode::age) {
      throw UsageError("--age-cutoff requires --mode age");
    }
    if (given(app, "--reversed") && s.mode != DeletionMode::thirds && s.mode != DeletionMode::positive_numeric) {
      throw UsageError("--reversed requires --mode thirds or positive_numeric");
    }
    s.attribute = f.attribute;
    s.selected_values = f.values;
    s.reversed = f.reversed;
    s.age_cutoff = f.age_cutoff;
  }
  s.incremental = f.incremental;
  s.seed = f.seed;
  attach_ordinals(s, d);
  return s;
}

ExperimentConfig resolve_config(const CLI::App& app, const RawFlags& f) {
  if (given(app, "--config")) {
    for (const char* flag :
         {"--dataset", "--classifier", "--scenario", "--mode", "--attribute", "--values", "--reversed",
          "--age-cutoff", "--incremental", "--seed", "--split-seed", "--model-seed", "--percent",
          "--repetitions", "--fixed-test", "--train-fraction", "--target", "--features", "--positive-class",
          "--knn-k", "--svm-c", "--svm-epochs", "--rf-trees", "--rf-max-depth", "--gbt-rounds", "--gbt-depth",
          "--gbt-learning-rate"}) {
      if (given(app, flag)) throw UsageError(std::string(flag) + " cannot be combined with --config");
    }
    auto cfg = load_config(f.config);
    if (given(app, "--threads")) cfg.threads = f.threads;
    return cfg;
  }
  if (!given(app, "--dataset")) throw UsageError("--dataset is required (or --config)");
  ExperimentConfig cfg;
  cfg.dataset = resolve_dataset(app, f);
  cfg.scenario = resolve_scenario(app, f, cfg.dataset);
  if (!f.classifiers.empty()) {
    cfg.classifiers.clear();
    for (const auto& name : f.classifiers) {
      if (name == "all") {
        cfg.classifiers = ExperimentConfig{}.classifiers;
        continue;
      }
      cfg.classifiers.push_back(parse_classifier_kind(name));
    }
  }
  cfg.hyperparams = f.hp;
  cfg.hyperparams.model_seed = f.model_seed;
  if (given(app, "--rf-max-depth")) cfg.hyperparams.rf_max_depth = f.rf_max_depth;
  if (given(app, "--percent")) cfg.percentages = parse_percent_range(f.percent);
  cfg.split_seed = f.split_seed;
  cfg.repetitions = f.repetitions;
  cfg.fixed_test = f.fixed_test;
  cfg.train_fraction = f.train_fraction;
  cfg.threads = f.threads;
  cfg.validate();
  return cfg;
}

std::string usage_hint(const CLI::App& app) { return app.help(); }

ExperimentConfig comparison_config(const ExperimentConfig& cfg, const std::string& name) {
  auto other = cfg;
  if (name == "random") {
    DeletionScenario random;
    random.seed = cfg.scenario.seed;
    other.scenario = random;
  } else {
    other.scenario.incremental = false;
  }
  return other;
}

int run(const RunCommand& cmd, std::ostream& out, std::ostream& err) {
  const auto& cfg = cmd.config;
  if (cmd.dry_run) {
    out << config_to_json(cfg) << '\n';
    return 0;
  }
  const auto raw = load_dataset(cfg.dataset);
  err << "running " << cfg.dataset.id << " / " << cfg.scenario.display_label() << " on " << raw.size()
      << " records\n";
  const auto sweep = run_sweep(cfg, raw);
  EmitOptions options;
  options.smooth_sigmas = cmd.smooth_sigmas;
  for (const auto& name : cmd.compare) {
    const auto other = comparison_config(cfg, name);
    err << "running comparison " << other.scenario.display_label() << '\n';
    options.comparisons.emplace_back(name == "random" ? "random" : "non_incremental", run_sweep(other, raw));
  }
  const auto manifest = make_manifest(cfg, dataset_path(cfg.dataset));
  const auto files = emit_results(sweep, manifest, cmd.out_dir, options);
  out << "wrote " << sweep.rows.size() << " result rows and " << files.size() - 1 << " other files to "
      << cmd.out_dir.string() << '\n';
  return 0;
}

int diff(const DiffCommand& cmd, std::ostream& out) {
  const auto a = sweep_from_rows(read_results_csv(cmd.a));
  const auto b = sweep_from_rows(read_results_csv(cmd.b));
  std::ostringstream text;
  text << "classifier,percentage,difference\n";
  for (const auto& d : diff_series(a, b, cmd.metric)) {
    text << d.classifier << ',' << format_double(d.percentage) << ',' << format_double(d.difference) << '\n';
  }
  if (cmd.out) {
    std::ofstream file(*cmd.out, std::ios::binary | std::ios::trunc);
    if (!file) throw Error("cannot write '" + cmd.out->string() + "'");
    file << text.str();
  } else {
    out << text.str();
  }
  return 0;
}

int presets(const PresetsCommand& cmd, std::ostream& out) {
  const auto ids = cmd.dataset ? std::vector<std::string>{*cmd.dataset} : builtin_dataset_ids();
  for (const auto& id : ids) {
    (void)builtin_dataset(id);
    for (const auto& p : scenario_presets(id)) {
      out << id << '\t' << p.name << '\t' << p.scenario.display_label() << '\t' << p.description << '\n';
    }
  }
  return 0;
}

}  // namespace

ParsedCli parse_cli(int argc, const char* const* argv) {
  CLI::App app{"Measure classifier performance as records are deleted, uniformly or with bias.",
               "erasure_bench"};
  app.set_version_flag("--version", std::string("erasure_bench ") + ERASURE_VERSION);
  app.require_subcommand(0, 1);
  app.get_formatter()->column_width(38);

  RawFlags f;
  app.add_option("--config", f.config, "JSON harness config (replaces the experiment flags)");
  app.add_option("--dataset", f.dataset, "adult, cahousing, cmc, mgm, or a CSV path");
  app.add_option("--classifier", f.classifiers, "knn, svm, rf, gbt or all; repeatable")->delimiter(',');
  app.add_option("--scenario", f.scenario, "named scenario of the dataset (see 'presets')");
  app.add_option("--mode", f.mode, "random, selection, thirds, age, positive_numeric");
  app.add_option("--attribute", f.attribute, "column the deletion bias looks at");
  app.add_option("--values", f.values, "selected values for selection mode")->delimiter(',');
  app.add_flag("--reversed", f.reversed, "favour low values (thirds, positive_numeric)");
  app.add_option("--age-cutoff", f.age_cutoff, "age mode: values below this get weight 2")->capture_default_str();
  app.add_flag("--incremental", f.incremental, "deleted sets grow along the percentage grid");
  app.add_option("--seed", f.seed, "deletion seed")->capture_default_str();
  app.add_option("--split-seed", f.split_seed, "train/test split seed")->capture_default_str();
  app.add_option("--model-seed", f.model_seed, "classifier seed")->capture_default_str();
  app.add_option("--percent", f.percent, "grid start:stop:step in percent, inclusive (default 0:95:5)");
  app.add_option("--repetitions", f.repetitions, "runs with seeds seed, seed+1, ...")->capture_default_str();
  app.add_flag("--fixed-test", f.fixed_test, "split once, delete from the training part only");
  app.add_option("--train-fraction", f.train_fraction, "share of records used for training")->capture_default_str();
  app.add_option("--smooth-sigma", f.smooth_sigmas, "also write Gaussian-smoothed plot data; repeatable")
      ->delimiter(',');
  app.add_option("--out", f.out, "output directory")->capture_default_str();
  app.add_option("--target", f.target, "target column of a CSV path dataset");
  app.add_option("--features", f.features, "feature columns of a CSV path dataset")->delimiter(',');
  app.add_option("--positive-class", f.positive_class, "report binary metrics for this class (CSV path datasets)");
  app.add_option("--threads", f.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--compare", f.compare, "also run and diff against: random, non-incremental")->delimiter(',');
  app.add_flag("--dry-run", f.dry_run, "print the resolved config as JSON and exit");
  auto* hp = app.add_option_group("hyperparameters");
  hp->add_option("--knn-k", f.hp.knn_k, "neighbours")->capture_default_str();
  hp->add_option("--svm-c", f.hp.svm_c, "SVM C")->capture_default_str();
  hp->add_option("--svm-epochs", f.hp.svm_epochs, "SVM passes over the data")->capture_default_str();
  hp->add_option("--rf-trees", f.hp.rf_trees, "forest size")->capture_default_str();
  hp->add_option("--rf-max-depth", f.rf_max_depth, "tree depth limit (default unbounded)");
  hp->add_option("--gbt-rounds", f.hp.gbt_rounds, "boosting rounds")->capture_default_str();
  hp->add_option("--gbt-depth", f.hp.gbt_depth, "boosted tree depth")->capture_default_str();
  hp->add_option("--gbt-learning-rate", f.hp.gbt_learning_rate, "shrinkage")->capture_default_str();

  DiffCommand d;
  std::string metric = "f1";
  std::string diff_out;
  auto* diff_cmd = app.add_subcommand("diff", "per classifier and percentage, mean metric of A minus B");
  diff_cmd->add_option("a", d.a, "results.csv")->required();
  diff_cmd->add_option("b", d.b, "results.csv")->required();
  diff_cmd->add_option("--metric", metric, "accuracy, precision, recall or f1")->capture_default_str();
  diff_cmd->add_option("--out", diff_out, "write here instead of stdout");

  std::string preset_dataset;
  auto* presets_cmd = app.add_subcommand("presets", "list named scenarios");
  presets_cmd->add_option("dataset", preset_dataset, "limit to one dataset");

  ParsedCli parsed;
  if (argc <= 1) throw UsageError(usage_hint(app));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    parsed.kind = ParsedCli::Kind::help;
    parsed.text = app.help();
    return parsed;
  } catch (const CLI::CallForAllHelp&) {
    parsed.kind = ParsedCli::Kind::help;
    parsed.text = app.help("", CLI::AppFormatMode::All);
    return parsed;
  } catch (const CLI::CallForVersion&) {
    parsed.kind = ParsedCli::Kind::help;
    parsed.text = app.version();
    return parsed;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (diff_cmd->parsed() || presets_cmd->parsed()) {
    for (const auto* opt : app.get_options()) {
      if (opt->count() > 0) {
        throw UsageError(opt->get_name() + " does not apply to the " +
                         (diff_cmd->parsed() ? "diff" : "presets") + " subcommand");
      }
    }
  }
  if (diff_cmd->parsed()) {
    parsed.kind = ParsedCli::Kind::diff;
    d.metric = parse_metric(metric);
    if (!diff_out.empty()) d.out = diff_out;
    parsed.diff = d;
    return parsed;
  }
  if (presets_cmd->parsed()) {
    parsed.kind = ParsedCli::Kind::presets;
    if (!preset_dataset.empty()) parsed.presets.dataset = preset_dataset;
    return parsed;
  }

  parsed.kind = ParsedCli::Kind::run;
  auto& run = parsed.run;
  run.config = resolve_config(app, f);
  run.out_dir = f.out;
  run.dry_run = f.dry_run;
  for (double s : f.smooth_sigmas) {
    if (!(s > 0.0)) throw UsageError("--smooth-sigma must be positive");
  }
  run.smooth_sigmas = f.smooth_sigmas;
  for (const auto& c : f.compare) {
    if (c == "random") {
      const auto& s = run.config.scenario;
      if (s.mode == DeletionMode::random && !s.incremental && s.combine_with.empty()) {
        throw UsageError("--compare random needs a biased or incremental scenario");
      }
    } else if (c == "non-incremental") {
      if (!run.config.scenario.incremental) throw UsageError("--compare non-incremental needs --incremental");
    } else {
      throw UsageError("--compare expects random or non-incremental, got '" + c + "'");
    }
    if (std::find(run.compare.begin(), run.compare.end(), c) != run.compare.end()) {
      throw UsageError("--compare " + c + " given twice");
    }
    run.compare.push_back(c);
  }
  return parsed;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const auto parsed = parse_cli(argc, argv);
    switch (parsed.kind) {
      case ParsedCli::Kind::help:
        out << parsed.text;
        if (!parsed.text.empty() && parsed.text.back() != '\n') out << '\n';
        return 0;
      case ParsedCli::Kind::diff: return diff(parsed.diff, out);
      case ParsedCli::Kind::presets: return presets(parsed.presets, out);
      case ParsedCli::Kind::run: return run(parsed.run, out, err);
    }
    return 0;
  } catch (const UsageError& e) {
    if (argc <= 1) {
      err << e.what();
      return 2;
    }
    err << "usage error: " << e.what() << '\n';
    err << "Run 'erasure_bench --help' for the full list of options.\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace erasure
