#include "semrel/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "semrel/corpus.hpp"
#include "semrel/embedstore.hpp"
#include "semrel/ensemble.hpp"
#include "semrel/error.hpp"
#include "semrel/eval.hpp"
#include "semrel/pca.hpp"
#include "semrel/svr.hpp"
#include "semrel/textstats.hpp"
#include "semrel/wordvec.hpp"
#include "text_io.hpp"

namespace semrel::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string dataset;
  std::string format = "native_tsv";
  std::string lang;
  std::string split;
  std::string preset;
  std::string manifest;
  std::vector<std::string> vectors;
  std::vector<std::string> embeddings;
  std::string annotations;
  std::string function_words;
  std::string content_mode = "lexicon";
  std::vector<std::string> pca_in;
  std::vector<std::string> pca_out;
  std::string model_in;
  std::string model_out;
  std::string grid;
  std::size_t folds = 5;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string report_json;
  std::vector<std::string> predictions;
  std::string features;
  bool raw_scores = false;
  unsigned threads = 0;
};

using Named = std::vector<std::pair<std::string, std::string>>;

Named parse_named(const std::vector<std::string>& items, const std::string& flag) {
  Named out;
  for (const std::string& item : items) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw ConfigError(flag + " expects NAME=PATH, got '" + item + "'");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) return;
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw ConfigError(flag + ": no such file '" + path + "'");
}

// Every input path is checked before any file is parsed.
void validate_inputs(const Options& o) {
  require_file(o.dataset, "--dataset");
  require_file(o.manifest, "--manifest");
  require_file(o.annotations, "--annotations");
  require_file(o.function_words, "--function-words");
  require_file(o.model_in, "--model-in");
  require_file(o.features, "--features");
  for (const auto& [name, path] : parse_named(o.vectors, "--vectors")) require_file(path, "--vectors " + name);
  for (const auto& [name, path] : parse_named(o.embeddings, "--embeddings")) require_file(path, "--embeddings " + name);
  for (const auto& [name, path] : parse_named(o.pca_in, "--pca-in")) require_file(path, "--pca-in " + name);
  for (const std::string& p : o.predictions) {
    const std::size_t eq = p.find('=');
    require_file(eq == std::string::npos ? p : p.substr(eq + 1), "--predictions");
  }
  parse_named(o.pca_out, "--pca-out");
}

std::optional<Preset> resolve_preset(const Options& o) {
  if (!o.preset.empty() && !o.manifest.empty()) throw ConfigError("--preset and --manifest are mutually exclusive");
  if (!o.preset.empty()) return builtin_preset(o.preset);
  if (!o.manifest.empty()) return load_manifest(o.manifest);
  return std::nullopt;
}

Preset require_preset(const Options& o) {
  auto preset = resolve_preset(o);
  if (!preset) throw ConfigError("one of --preset or --manifest is required");
  return *preset;
}

Dataset load_input_dataset(const Options& o, const std::string& language) {
  if (o.dataset.empty()) throw ConfigError("--dataset is required");
  Dataset dataset = load_dataset(o.dataset, parse_dataset_format(o.format), o.lang.empty() ? language : o.lang,
                                 o.split);
  if (dataset.empty()) throw ConfigError("dataset '" + o.dataset + "' contains no pairs");
  return dataset;
}

FeatureContext build_context(const Options& o, const Preset& preset) {
  FeatureContext ctx;
  const std::string language = o.lang.empty() ? preset.language : o.lang;
  ContentFilter filter =
      o.function_words.empty() ? ContentFilter::builtin(language) : ContentFilter::load(o.function_words, language);
  if (o.content_mode == "pos") {
    filter = filter.with_mode(ContentFilter::Mode::kPos);
  } else if (o.content_mode != "lexicon") {
    throw ConfigError("--content-mode must be 'lexicon' or 'pos'");
  }
  ctx.filter = std::move(filter);

  // Only resources the manifest names are parsed.
  std::set<std::string> wanted;
  for (const FeatureSpec& spec : preset.manifest.entries()) wanted.insert(spec.source);
  for (const auto& [name, path] : parse_named(o.vectors, "--vectors")) {
    if (wanted.contains(name)) ctx.tables.insert_or_assign(name, load_vectors(path, name));
  }
  for (const auto& [name, path] : parse_named(o.embeddings, "--embeddings")) {
    if (wanted.contains(name)) ctx.stores.insert_or_assign(name, load_embeddings(path));
  }
  if (!o.annotations.empty()) ctx.annotations = load_annotations(o.annotations);
  check_resolvable(preset.manifest, ctx);

  const auto names = preset.manifest.names();
  for (const auto& [feature, path] : parse_named(o.pca_in, "--pca-in")) {
    if (std::find(names.begin(), names.end(), feature) == names.end()) {
      throw ConfigError("--pca-in names unknown feature '" + feature + "'");
    }
    ctx.pca_models.insert_or_assign(feature, load_pca(path));
  }
  return ctx;
}

unsigned thread_count(const Options& o) {
  if (o.threads > 0) return o.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Writes to --out when given, else to `out`.
template <typename Writer>
void emit(const std::string& path, std::ostream& out, Writer&& writer) {
  if (path.empty()) {
    writer(out);
    return;
  }
  std::ofstream file = text_io::open_output(path);
  writer(file);
  text_io::finish_output(file, path);
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const std::string& w : warnings) err << "warning: " << w << '\n';
}

void write_pca_outputs(const Options& o, const FeatureContext& ctx) {
  for (const auto& [feature, path] : parse_named(o.pca_out, "--pca-out")) {
    const auto it = ctx.pca_models.find(feature);
    if (it == ctx.pca_models.end()) throw ConfigError("--pca-out: feature '" + feature + "' has no PCA model");
    write_pca(fs::path(path), it->second);
  }
}

int cmd_features(const Options& o, std::ostream& out, std::ostream& err) {
  validate_inputs(o);
  const Preset preset = require_preset(o);
  const Dataset dataset = load_input_dataset(o, preset.language);
  FeatureContext ctx = build_context(o, preset);
  prepare_pca(dataset, preset.manifest, ctx);
  const FeatureTable table = assemble_all(dataset, preset.manifest, ctx, thread_count(o));
  report_warnings(table.warnings, err);
  emit(o.out, out, [&](std::ostream& s) { write_feature_table(s, table); });
  write_pca_outputs(o, ctx);
  return 0;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  validate_inputs(o);
  if (o.model_out.empty()) throw ConfigError("--model-out is required");
  const Preset preset = require_preset(o);
  const Dataset dataset = load_input_dataset(o, preset.language);
  const bool supervised = preset.mode == EnsembleMode::kSupervisedSvr;
  if (supervised && !dataset.all_gold()) {
    throw ConfigError("supervised training needs a gold score for every pair in '" + o.dataset + "'");
  }
  FeatureContext ctx = build_context(o, preset);
  prepare_pca(dataset, preset.manifest, ctx);
  const FeatureTable table = assemble_all(dataset, preset.manifest, ctx, thread_count(o));
  report_warnings(table.warnings, err);

  EnsembleModel model;
  model.preset = preset;
  for (const FeatureSpec& spec : preset.manifest.entries()) {
    if (spec.pca) model.pca.emplace(spec.name, ctx.pca_models.at(spec.name));
  }

  if (supervised) {
    const FeatureMatrix x = table.matrix();
    std::vector<double> y;
    for (const SentencePair& pair : dataset) y.push_back(*pair.gold_score);
    SvrParams params;
    if (!o.grid.empty()) {
      const TuneResult tuned = tune_svr(x, y, parse_grid(o.grid), o.folds, o.seed, params);
      params.c = tuned.c;
      params.epsilon = tuned.epsilon;
      params.gamma = tuned.gamma;
      out << "cv: C=" << text_io::format_shortest(tuned.c) << " epsilon=" << text_io::format_shortest(tuned.epsilon)
          << " gamma=" << (tuned.gamma ? text_io::format_shortest(*tuned.gamma) : std::string("auto"))
          << " spearman=" << text_io::format_significant(tuned.cv_spearman, 6) << '\n';
    }
    model.svr = fit_svr(x, y, params);
    out << "trained " << preset.name << " on " << dataset.size() << " pairs, "
        << model.svr->support_vectors().rows << " support vectors\n";
  } else {
    out << "built " << preset.name << " (unsupervised mean of " << preset.manifest.size() << " features)\n";
  }
  write_model(fs::path(o.model_out), model);

  if (!o.report_json.empty() && dataset.all_gold()) {
    Predictions fitted;
    for (const FeatureVector& row : table.rows) fitted.emplace_back(row.pair_id, predict_raw(model, row));
    EvalReport report = evaluate(dataset, fitted, preset.name + " (train fit)");
    report.warnings = table.warnings;
    std::ofstream file = text_io::open_output(o.report_json);
    write_report_json(file, report);
    text_io::finish_output(file, o.report_json);
  }
  return 0;
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream& err) {
  validate_inputs(o);
  EnsembleModel model;
  if (!o.model_in.empty()) {
    if (!o.preset.empty() || !o.manifest.empty()) {
      throw ConfigError("--model-in cannot be combined with --preset or --manifest");
    }
    model = load_model(o.model_in);
  } else {
    model.preset = require_preset(o);
    if (model.mode() == EnsembleMode::kSupervisedSvr) {
      throw ConfigError("preset '" + model.preset.name + "' is supervised; pass --model-in");
    }
  }
  const Dataset dataset = load_input_dataset(o, model.preset.language);
  FeatureContext ctx = build_context(o, model.preset);
  for (const auto& [feature, pca] : model.pca) ctx.pca_models.emplace(feature, pca);  // --pca-in wins
  prepare_pca(dataset, model.manifest(), ctx);
  const FeatureTable table = assemble_all(dataset, model.manifest(), ctx, thread_count(o));
  report_warnings(table.warnings, err);

  Predictions predictions;
  for (const FeatureVector& row : table.rows) {
    predictions.emplace_back(row.pair_id, o.raw_scores ? predict_raw(model, row) : predict(model, row));
  }
  emit(o.out, out, [&](std::ostream& s) { write_predictions(s, predictions); });
  write_pca_outputs(o, ctx);
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream&) {
  validate_inputs(o);
  if (o.predictions.empty() && o.features.empty()) throw ConfigError("--predictions or --features is required");
  const Dataset dataset = load_input_dataset(o, o.lang.empty() ? "eng" : o.lang);

  EvalReport report;
  report.dataset = dataset.language_tag() + (dataset.split_tag().empty() ? "" : "/" + dataset.split_tag());
  for (const std::string& item : o.predictions) {
    const std::size_t eq = item.find('=');
    const std::string path = eq == std::string::npos ? item : item.substr(eq + 1);
    const std::string name = eq == std::string::npos ? fs::path(path).stem().string() : item.substr(0, eq);
    report.systems.push_back(score_system(dataset, load_predictions(path), name));
    report.n_pairs = report.systems.back().n;
  }
  if (!o.features.empty()) {
    const FeatureTable table = load_feature_table(o.features);
    for (std::size_t f = 0; f < table.names.size(); ++f) {
      Predictions column;
      for (const FeatureVector& row : table.rows) column.emplace_back(row.pair_id, row.values[f]);
      try {
        const SystemScore score = score_system(dataset, column, table.names[f]);
        report.features.push_back({table.names[f], score.spearman});
        report.n_pairs = score.n;
      } catch (const NumericalError& e) {
        report.warnings.push_back("feature '" + table.names[f] + "': " + e.what());
      }
    }
  }
  emit(o.out, out, [&](std::ostream& s) { write_report_text(s, report); });
  if (!o.report_json.empty()) {
    std::ofstream file = text_io::open_output(o.report_json);
    write_report_json(file, report);
    text_io::finish_output(file, o.report_json);
  }
  return 0;
}

int cmd_fit_pca(const Options& o, std::ostream& out, std::ostream&) {
  validate_inputs(o);
  const auto targets = parse_named(o.pca_out, "--pca-out");
  if (targets.empty()) throw ConfigError("--pca-out FEATURE=PATH is required");
  const Preset preset = require_preset(o);
  const Dataset dataset = load_input_dataset(o, preset.language);
  const FeatureContext ctx = build_context(o, preset);
  for (const auto& [feature, path] : targets) {
    const auto& entries = preset.manifest.entries();
    const auto spec = std::find_if(entries.begin(), entries.end(), [&](const auto& s) { return s.name == feature; });
    if (spec == entries.end() || !is_cosine_kind(spec->kind)) {
      throw ConfigError("--pca-out: '" + feature + "' is not a cosine feature of the manifest");
    }
    std::vector<std::vector<double>> pooled;
    for (const SentencePair& pair : dataset) {
      for (Side side : {Side::kA, Side::kB}) {
        if (auto v = side_vector(pair, side, *spec, ctx)) pooled.push_back(std::move(*v));
      }
    }
    if (pooled.size() < 2) throw DataError("feature '" + feature + "': fewer than 2 valid sentence vectors");
    const PcaModel model = fit_pca(pooled);
    write_pca(fs::path(path), model);
    out << feature << ": fitted " << model.rank() << " components on " << pooled.size() << " vectors\n";
  }
  return 0;
}

void add_dataset_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.dataset, "Sentence-pair dataset");
  cmd->add_option("--format", o.format, "native_tsv | semeval_csv")->capture_default_str();
  cmd->add_option("--lang", o.lang, "Language tag (default: the preset's language)");
  cmd->add_option("--split", o.split, "Split tag recorded in reports");
}

void add_resource_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--preset", o.preset, "Built-in system: supervised-eng, unsup-eng, unsup-esp, unsup-hin");
  cmd->add_option("--manifest", o.manifest, "Custom feature manifest (JSON)");
  cmd->add_option("--vectors", o.vectors, "Word-vector table NAME=PATH")->allow_extra_args(false);
  cmd->add_option("--embeddings", o.embeddings, "Embedding sidecar NAME=PATH")->allow_extra_args(false);
  cmd->add_option("--annotations", o.annotations, "Token annotation TSV");
  cmd->add_option("--function-words", o.function_words, "Function-word list replacing the built-in one");
  cmd->add_option("--content-mode", o.content_mode, "lexicon | pos")->capture_default_str();
  cmd->add_option("--pca-in", o.pca_in, "Persisted PCA model FEATURE=PATH")->allow_extra_args(false);
  cmd->add_option("--threads", o.threads, "Feature workers (0: all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Semantic relatedness scoring with feature ensembles", "semrel"};
  app.require_subcommand(1);

  CLI::App* features = app.add_subcommand("features", "Write the per-pair feature table");
  add_dataset_options(features, o);
  add_resource_options(features, o);
  features->add_option("--pca-out", o.pca_out, "Write fitted PCA FEATURE=PATH")->allow_extra_args(false);
  features->add_option("--out", o.out, "Feature TSV (default: stdout)");

  CLI::App* train = app.add_subcommand("train", "Fit an ensemble and write a model bundle");
  add_dataset_options(train, o);
  add_resource_options(train, o);
  train->add_option("--model-out", o.model_out, "Model bundle path");
  train->add_option("--grid", o.grid, "Hyperparameter grid, e.g. C=1,10;epsilon=0.01,0.1;gamma=auto");
  train->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
  train->add_option("--seed", o.seed, "Seed for fold shuffling")->capture_default_str();
  train->add_option("--pca-out", o.pca_out, "Write fitted PCA FEATURE=PATH")->allow_extra_args(false);
  train->add_option("--report-json", o.report_json, "Train-fit evaluation report");

  CLI::App* predict_cmd = app.add_subcommand("predict", "Score every pair of a dataset");
  add_dataset_options(predict_cmd, o);
  add_resource_options(predict_cmd, o);
  predict_cmd->add_option("--model-in", o.model_in, "Model bundle from train");
  predict_cmd->add_option("--out", o.out, "Predictions TSV (default: stdout)");
  predict_cmd->add_option("--pca-out", o.pca_out, "Write PCA FEATURE=PATH")->allow_extra_args(false);
  predict_cmd->add_flag("--raw-scores", o.raw_scores, "Write unclamped scores");

  CLI::App* eval = app.add_subcommand("eval", "Spearman correlation against gold scores");
  add_dataset_options(eval, o);
  eval->add_option("--predictions", o.predictions, "Predictions TSV, optionally NAME=PATH")->allow_extra_args(false);
  eval->add_option("--features", o.features, "Feature TSV to score column by column");
  eval->add_option("--out", o.out, "Text report (default: stdout)");
  eval->add_option("--report-json", o.report_json, "JSON report");

  CLI::App* fit_pca_cmd = app.add_subcommand("fit-pca", "Fit and persist PCA models for cosine features");
  add_dataset_options(fit_pca_cmd, o);
  add_resource_options(fit_pca_cmd, o);
  fit_pca_cmd->add_option("--pca-out", o.pca_out, "FEATURE=PATH")->allow_extra_args(false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kConfig);
  }

  try {
    if (features->parsed()) return cmd_features(o, out, err);
    if (train->parsed()) return cmd_train(o, out, err);
    if (predict_cmd->parsed()) return cmd_predict(o, out, err);
    if (eval->parsed()) return cmd_eval(o, out, err);
    if (fit_pca_cmd->parsed()) return cmd_fit_pca(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return static_cast<int>(ErrorKind::kConfig);
}

}  // namespace semrel::cli
