#include "semrel/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "semrel/error.hpp"
#include "semrel/eval.hpp"
#include "semrel/unicode.hpp"
#include "text_io.hpp"

namespace semrel {

using ordered_json = nlohmann::ordered_json;

// ------------------------------------------------------------- manifest

std::string_view feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kStatCharRatio:
      return "stat_char_ratio";
    case FeatureKind::kStatWordOverlap:
      return "stat_word_overlap";
    case FeatureKind::kStatContentOverlap:
      return "stat_content_overlap";
    case FeatureKind::kWordvecCosine:
      return "wordvec_cosine";
    case FeatureKind::kEmbedCosine:
      return "embed_cosine";
  }
  return "?";
}

FeatureKind parse_feature_kind(std::string_view name) {
  for (FeatureKind kind : {FeatureKind::kStatCharRatio, FeatureKind::kStatWordOverlap,
                           FeatureKind::kStatContentOverlap, FeatureKind::kWordvecCosine, FeatureKind::kEmbedCosine}) {
    if (feature_kind_name(kind) == name) return kind;
  }
  throw ConfigError("unknown feature kind '" + std::string(name) + "'");
}

bool is_cosine_kind(FeatureKind kind) {
  return kind == FeatureKind::kWordvecCosine || kind == FeatureKind::kEmbedCosine;
}

FeatureManifest::FeatureManifest(std::vector<FeatureSpec> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ConfigError("feature manifest is empty");
  std::unordered_set<std::string> names;
  for (const FeatureSpec& spec : entries_) {
    if (spec.name.empty()) throw ConfigError("feature manifest entry without a name");
    if (!names.insert(spec.name).second) throw ConfigError("duplicate feature name '" + spec.name + "'");
    if (is_cosine_kind(spec.kind) && spec.source.empty()) {
      throw ConfigError("feature '" + spec.name + "' needs a source");
    }
    if (!is_cosine_kind(spec.kind) && spec.pca) {
      throw ConfigError("feature '" + spec.name + "': pca applies to cosine features only");
    }
  }
}

std::vector<std::string> FeatureManifest::names() const {
  std::vector<std::string> out;
  for (const FeatureSpec& spec : entries_) out.push_back(spec.name);
  return out;
}

std::string_view ensemble_mode_name(EnsembleMode mode) {
  return mode == EnsembleMode::kSupervisedSvr ? "supervised_svr" : "unsupervised_mean";
}

EnsembleMode parse_ensemble_mode(std::string_view name) {
  if (name == "supervised_svr") return EnsembleMode::kSupervisedSvr;
  if (name == "unsupervised_mean") return EnsembleMode::kUnsupervisedMean;
  throw ConfigError("unknown ensemble mode '" + std::string(name) + "'");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"supervised-eng", "unsup-eng", "unsup-esp", "unsup-hin"};
  return names;
}

Preset builtin_preset(std::string_view name) {
  using K = FeatureKind;
  if (name == "supervised-eng") {
    return {"supervised-eng", EnsembleMode::kSupervisedSvr, "eng",
            FeatureManifest({
                {"mpnet_cos", K::kEmbedCosine, "mpnet", Selection::kAll, false},
                {"jina_cos", K::kEmbedCosine, "jina", Selection::kAll, false},
                {"t5_cos", K::kEmbedCosine, "t5", Selection::kAll, false},
                {"glove_content_cos", K::kWordvecCosine, "glove", Selection::kContent, false},
                {"content_overlap", K::kStatContentOverlap, "", Selection::kAll, false},
                {"char_ratio", K::kStatCharRatio, "", Selection::kAll, false},
            })};
  }
  if (name == "unsup-eng") {
    return {"unsup-eng", EnsembleMode::kUnsupervisedMean, "eng",
            FeatureManifest({
                {"multiqa_pca_cos", K::kEmbedCosine, "multiqa", Selection::kAll, true},
                {"e5_pca_cos", K::kEmbedCosine, "e5", Selection::kAll, true},
                {"glove_content_pca_cos", K::kWordvecCosine, "glove", Selection::kContent, true},
                {"content_overlap", K::kStatContentOverlap, "", Selection::kAll, false},
            })};
  }
  if (name == "unsup-esp" || name == "unsup-hin") {
    return {std::string(name), EnsembleMode::kUnsupervisedMean, name == "unsup-esp" ? "esp" : "hin",
            FeatureManifest({
                {"multiqa_cos", K::kEmbedCosine, "multiqa", Selection::kAll, false},
                {"mbert_first_cos", K::kWordvecCosine, "mbert_first", Selection::kAll, false},
                {"mbert_last_cos", K::kWordvecCosine, "mbert_last", Selection::kAll, false},
                {"word_overlap", K::kStatWordOverlap, "", Selection::kAll, false},
            })};
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

namespace {

ordered_json manifest_to_json(const FeatureManifest& manifest) {
  ordered_json features = ordered_json::array();
  for (const FeatureSpec& spec : manifest.entries()) {
    ordered_json entry;
    entry["name"] = spec.name;
    entry["kind"] = std::string(feature_kind_name(spec.kind));
    entry["source"] = spec.source;
    entry["selection"] = std::string(selection_name(spec.selection));
    entry["pca"] = spec.pca;
    features.push_back(std::move(entry));
  }
  return features;
}

FeatureManifest manifest_from_json(const nlohmann::json& features) {
  if (!features.is_array()) throw ConfigError("manifest 'features' must be an array");
  std::vector<FeatureSpec> specs;
  for (const auto& entry : features) {
    FeatureSpec spec;
    spec.name = entry.at("name").get<std::string>();
    spec.kind = parse_feature_kind(entry.at("kind").get<std::string>());
    spec.source = entry.value("source", "");
    spec.selection = parse_selection(entry.value("selection", "all"));
    spec.pca = entry.value("pca", false);
    specs.push_back(std::move(spec));
  }
  return FeatureManifest(std::move(specs));
}

}  // namespace

Preset parse_manifest_json(std::istream& in, std::string_view source_name) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    Preset preset;
    preset.name = doc.value("name", "custom");
    preset.mode = parse_ensemble_mode(doc.value("mode", "supervised_svr"));
    preset.language = doc.value("language", "eng");
    preset.manifest = manifest_from_json(doc.at("features"));
    return preset;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(source_name) + ": invalid manifest: " + e.what());
  }
}

Preset load_manifest(const std::filesystem::path& path) {
  std::ifstream in = text_io::open_input(path);
  return parse_manifest_json(in, path.string());
}

// ------------------------------------------------------------- features

void check_resolvable(const FeatureManifest& manifest, const FeatureContext& context) {
  for (const FeatureSpec& spec : manifest.entries()) {
    if (spec.kind == FeatureKind::kEmbedCosine) {
      const auto it = context.stores.find(spec.source);
      if (it == context.stores.end()) {
        throw ConfigError("feature '" + spec.name + "' needs embedding store '" + spec.source +
                          "' (pass --embeddings " + spec.source + "=PATH)");
      }
      if (it->second.granularity() != Granularity::kSentence) {
        throw ConfigError("feature '" + spec.name + "': embedding store '" + spec.source +
                          "' must have sentence granularity");
      }
    } else if (spec.kind == FeatureKind::kWordvecCosine) {
      const bool table = context.tables.contains(spec.source);
      const auto store = context.stores.find(spec.source);
      const bool token_store = store != context.stores.end() && store->second.granularity() == Granularity::kToken;
      if (!table && !token_store) {
        throw ConfigError("feature '" + spec.name + "' needs word vectors '" + spec.source +
                          "' (pass --vectors " + spec.source + "=PATH or a token-granularity --embeddings)");
      }
      if ((spec.selection == Selection::kNoun || spec.selection == Selection::kTreeTop3) &&
          context.annotations.empty()) {
        throw ConfigError("feature '" + spec.name + "' uses " + std::string(selection_name(spec.selection)) +
                          " selection and needs --annotations");
      }
    }
  }
}

std::optional<std::vector<double>> side_vector(const SentencePair& pair, Side side, const FeatureSpec& spec,
                                               const FeatureContext& context) {
  const auto where = [&] {
    return "feature '" + spec.name + "', pair '" + pair.pair_id + "' side " + std::string(side_name(side)) + ": ";
  };
  if (spec.kind == FeatureKind::kEmbedCosine) {
    const auto it = context.stores.find(spec.source);
    if (it == context.stores.end()) throw ConfigError(where() + "no embedding store '" + spec.source + "'");
    const std::vector<double>* vector = it->second.sentence(pair.pair_id, side);
    if (vector == nullptr) throw DataError(where() + "embedding store '" + spec.source + "' has no vector");
    return *vector;
  }
  if (spec.kind != FeatureKind::kWordvecCosine) throw ConfigError(where() + "not a cosine feature");

  const auto annotation_it = context.annotations.find({pair.pair_id, side});
  const std::vector<TokenAnnotation>* annotations =
      annotation_it == context.annotations.end() ? nullptr : &annotation_it->second;
  if ((spec.selection == Selection::kNoun || spec.selection == Selection::kTreeTop3) && annotations == nullptr) {
    throw DataError(where() + "no annotations for this sentence");
  }
  const TokenSet tokens = tokenize(pair.text(side));

  SentenceEmbedding embedding;
  if (const auto table = context.tables.find(spec.source); table != context.tables.end()) {
    embedding = mean_embedding(tokens, table->second, spec.selection, annotations, &context.filter);
  } else {
    const auto store = context.stores.find(spec.source);
    if (store == context.stores.end()) throw ConfigError(where() + "no word vectors '" + spec.source + "'");
    const auto* token_vectors = store->second.tokens(pair.pair_id, side);
    if (token_vectors == nullptr) throw DataError(where() + "embedding store '" + spec.source + "' has no tokens");
    std::vector<SelectedToken> selected;
    if (spec.selection == Selection::kAll) {
      for (std::size_t t = 0; t < token_vectors->size(); ++t) selected.push_back({"", static_cast<int>(t)});
    } else {
      // Token indices of the store follow the annotation tokenization.
      if (annotations == nullptr) throw DataError(where() + "token-store selection needs annotations");
      if (spec.selection == Selection::kContent && context.filter.mode() == ContentFilter::Mode::kLexicon) {
        for (const TokenAnnotation& token : *annotations) {
          if (unicode::is_punctuation_or_space(token.surface)) continue;
          std::string text = unicode::normalize_token(token.surface);
          if (!context.filter.is_function_word(text)) selected.push_back({std::move(text), token.token_index});
        }
      } else {
        selected = select_tokens(tokens, spec.selection, annotations, &context.filter);
      }
    }
    embedding = mean_of_selected(
        selected, store->second.dim(),
        [&](const SelectedToken& token) -> std::optional<std::span<const double>> {
          if (token.index < 0 || static_cast<std::size_t>(token.index) >= token_vectors->size()) return std::nullopt;
          return std::span<const double>((*token_vectors)[static_cast<std::size_t>(token.index)]);
        },
        spec.source + ":" + std::string(selection_name(spec.selection)));
  }
  if (!embedding.valid()) return std::nullopt;
  return std::move(embedding.vector);
}

void prepare_pca(const Dataset& dataset, const FeatureManifest& manifest, FeatureContext& context) {
  for (const FeatureSpec& spec : manifest.entries()) {
    if (!spec.pca || context.pca_models.contains(spec.name)) continue;
    std::vector<std::vector<double>> pooled;
    pooled.reserve(2 * dataset.size());
    for (const SentencePair& pair : dataset) {
      for (Side side : {Side::kA, Side::kB}) {
        if (auto v = side_vector(pair, side, spec, context)) pooled.push_back(std::move(*v));
      }
    }
    if (pooled.size() < 2) {
      throw DataError("feature '" + spec.name + "': fewer than 2 valid sentence vectors to fit PCA");
    }
    context.pca_models.emplace(spec.name, fit_pca(pooled));
  }
}

FeatureVector assemble_features(const SentencePair& pair, const FeatureManifest& manifest,
                                const FeatureContext& context) {
  FeatureVector fv;
  fv.pair_id = pair.pair_id;
  fv.values.resize(manifest.size());
  fv.flags.assign(manifest.size(), kFlagNone);

  std::optional<TokenSet> tokens_a;
  std::optional<TokenSet> tokens_b;
  const auto ensure_tokens = [&] {
    if (!tokens_a) {
      tokens_a = tokenize(pair.text_a);
      tokens_b = tokenize(pair.text_b);
    }
  };

  for (std::size_t f = 0; f < manifest.size(); ++f) {
    const FeatureSpec& spec = manifest[f];
    try {
      switch (spec.kind) {
        case FeatureKind::kStatCharRatio:
          fv.values[f] = char_distance_ratio(pair);
          break;
        case FeatureKind::kStatWordOverlap:
          ensure_tokens();
          fv.values[f] = word_overlap_ratio(*tokens_a, *tokens_b);
          break;
        case FeatureKind::kStatContentOverlap: {
          ensure_tokens();
          const auto ann_a = context.annotations.find({pair.pair_id, Side::kA});
          const auto ann_b = context.annotations.find({pair.pair_id, Side::kB});
          ContentOverlap overlap;
          if (context.filter.mode() == ContentFilter::Mode::kPos && ann_a != context.annotations.end() &&
              ann_b != context.annotations.end()) {
            overlap = content_overlap_ratio(context.filter.apply(ann_a->second), context.filter.apply(ann_b->second),
                                            *tokens_a, *tokens_b);
          } else {
            overlap = content_overlap_ratio(*tokens_a, *tokens_b, context.filter);
          }
          fv.values[f] = overlap.value;
          if (overlap.fallback) fv.flags[f] |= kFlagContentFallback;
          break;
        }
        case FeatureKind::kWordvecCosine:
        case FeatureKind::kEmbedCosine: {
          auto va = side_vector(pair, Side::kA, spec, context);
          auto vb = side_vector(pair, Side::kB, spec, context);
          if (!va || !vb) {
            fv.values[f] = 0.0;
            fv.flags[f] |= kFlagInvalidEmbedding;
            break;
          }
          if (spec.pca) {
            const auto model = context.pca_models.find(spec.name);
            if (model == context.pca_models.end()) {
              throw ConfigError("no PCA model prepared for feature '" + spec.name + "'");
            }
            va = model->second.transform(*va);
            vb = model->second.transform(*vb);
          }
          try {
            fv.values[f] = cosine(*va, *vb);
          } catch (const NumericalError&) {
            fv.values[f] = 0.0;
            fv.flags[f] |= kFlagDegenerateVector;
          }
          break;
        }
      }
    } catch (const Error& e) {
      const std::string message = e.what();
      if (message.starts_with("feature '")) throw;
      const std::string prefix = "feature '" + spec.name + "', pair '" + pair.pair_id + "': ";
      if (e.kind() == ErrorKind::kConfig) throw ConfigError(prefix + message);
      if (e.kind() == ErrorKind::kNumerical) throw NumericalError(prefix + message);
      throw DataError(prefix + message);
    }
  }
  return fv;
}

FeatureMatrix FeatureTable::matrix() const {
  FeatureMatrix m;
  m.cols = names.size();
  m.values.reserve(rows.size() * names.size());
  for (const FeatureVector& row : rows) m.push_row(row.values);
  return m;
}

FeatureTable assemble_all(const Dataset& dataset, const FeatureManifest& manifest, const FeatureContext& context,
                          unsigned threads) {
  FeatureTable table;
  table.names = manifest.names();
  table.rows.resize(dataset.size());

  const std::size_t n = dataset.size();
  const unsigned workers = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;

  const auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        table.rows[i] = assemble_features(dataset[i], manifest, context);
      } catch (...) {
        // Report the failure of the earliest pair so errors are order-stable.
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  for (std::size_t f = 0; f < manifest.size(); ++f) {
    std::size_t fallback = 0;
    std::size_t invalid = 0;
    std::size_t degenerate = 0;
    for (const FeatureVector& row : table.rows) {
      fallback += (row.flags[f] & kFlagContentFallback) != 0;
      invalid += (row.flags[f] & kFlagInvalidEmbedding) != 0;
      degenerate += (row.flags[f] & kFlagDegenerateVector) != 0;
    }
    const std::string& name = manifest[f].name;
    if (fallback > 0) {
      table.warnings.push_back("feature '" + name + "': " + std::to_string(fallback) +
                               " pair(s) without content words; used all-word overlap");
    }
    if (invalid > 0) {
      table.warnings.push_back("feature '" + name + "': " + std::to_string(invalid) +
                               " pair(s) with no in-vocabulary selected token; value set to 0");
    }
    if (degenerate > 0) {
      table.warnings.push_back("feature '" + name + "': " + std::to_string(degenerate) +
                               " pair(s) with a zero-norm vector; value set to 0");
    }
  }
  return table;
}

void write_feature_table(std::ostream& out, const FeatureTable& table) {
  out << "pair_id";
  for (const std::string& name : table.names) out << '\t' << name;
  out << '\n';
  for (const FeatureVector& row : table.rows) {
    out << row.pair_id;
    for (double v : row.values) out << '\t' << text_io::format_shortest(v);
    out << '\n';
  }
}

void write_feature_table(const std::filesystem::path& path, const FeatureTable& table) {
  std::ofstream out = text_io::open_output(path);
  write_feature_table(out, table);
  text_io::finish_output(out, path);
}

FeatureTable read_feature_table(std::istream& in, std::string_view source_name) {
  FeatureTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = text_io::split(line, '\t');
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no) + ": ";
    if (!have_header) {
      if (cols.size() < 2 || cols[0] != "pair_id") throw DataError(where + "expected header 'pair_id\\t<feature>...'");
      for (std::size_t i = 1; i < cols.size(); ++i) table.names.emplace_back(cols[i]);
      have_header = true;
      continue;
    }
    if (cols.size() != table.names.size() + 1) throw DataError(where + "column count does not match header");
    FeatureVector row;
    row.pair_id = std::string(cols[0]);
    for (std::size_t i = 1; i < cols.size(); ++i) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cols[i].data(), cols[i].data() + cols[i].size(), v);
      if (ec != std::errc() || ptr != cols[i].data() + cols[i].size() || !std::isfinite(v)) {
        throw DataError(where + "unparseable value '" + std::string(cols[i]) + "'");
      }
      row.values.push_back(v);
    }
    row.flags.assign(row.values.size(), kFlagNone);
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError(std::string(source_name) + ": empty feature table");
  return table;
}

FeatureTable load_feature_table(const std::filesystem::path& path) {
  std::ifstream in = text_io::open_input(path);
  return read_feature_table(in, path.string());
}

// ------------------------------------------------------------ prediction

double predict_raw(const EnsembleModel& model, const FeatureVector& fv) {
  const FeatureManifest& manifest = model.manifest();
  if (fv.values.size() != manifest.size()) {
    throw DataError("pair '" + fv.pair_id + "': feature vector has " + std::to_string(fv.values.size()) +
                    " values, manifest has " + std::to_string(manifest.size()));
  }
  if (model.mode() == EnsembleMode::kSupervisedSvr) {
    if (!model.svr) throw ConfigError("supervised model has no SVR state");
    return model.svr->predict(fv.values);
  }
  double sum = 0.0;
  for (std::size_t f = 0; f < manifest.size(); ++f) {
    const double v = fv.values[f];
    sum += is_cosine_kind(manifest[f].kind) ? std::clamp(v, 0.0, 1.0) : v;
  }
  return sum / static_cast<double>(manifest.size());
}

double predict(const EnsembleModel& model, const FeatureVector& fv) {
  return std::clamp(predict_raw(model, fv), 0.0, 1.0);
}

namespace {

ordered_json doubles(std::span<const double> values) {
  ordered_json out = ordered_json::array();
  for (double v : values) out.push_back(v);
  return out;
}

std::vector<double> read_doubles(const nlohmann::json& node) {
  std::vector<double> out;
  for (const auto& v : node) out.push_back(v.get<double>());
  return out;
}

}  // namespace

void write_model(std::ostream& out, const EnsembleModel& model) {
  ordered_json doc;
  doc["format"] = "semrel-ensemble";
  doc["version"] = 1;
  doc["preset"] = model.preset.name;
  doc["mode"] = std::string(ensemble_mode_name(model.mode()));
  doc["language"] = model.preset.language;
  doc["manifest"] = manifest_to_json(model.manifest());
  ordered_json pca = ordered_json::object();
  for (const auto& [name, p] : model.pca) {
    ordered_json components = ordered_json::array();
    for (std::size_t j = 0; j < p.rank(); ++j) components.push_back(doubles(p.component(j)));
    pca[name] = {{"mean", doubles(p.mean())},
                 {"components", std::move(components)},
                 {"explained_variance", doubles(p.explained_variance())}};
  }
  doc["pca"] = std::move(pca);
  if (model.svr) {
    const SvrModel& svr = *model.svr;
    ordered_json s;
    s["kernel"] = "rbf";
    s["gamma"] = svr.gamma();
    s["C"] = svr.c();
    s["epsilon"] = svr.epsilon();
    s["bias"] = svr.bias();
    s["scaler"] = {{"mean", doubles(svr.scaler().mean)}, {"stddev", doubles(svr.scaler().stddev)}};
    ordered_json vectors = ordered_json::array();
    for (std::size_t i = 0; i < svr.support_vectors().rows; ++i) vectors.push_back(doubles(svr.support_vectors().row(i)));
    s["support_vectors"] = std::move(vectors);
    s["dual_coefs"] = doubles(svr.dual_coefs());
    doc["svr"] = std::move(s);
  } else {
    doc["svr"] = nullptr;
  }
  out << doc.dump(1) << '\n';
}

void write_model(const std::filesystem::path& path, const EnsembleModel& model) {
  std::ofstream out = text_io::open_output(path);
  write_model(out, model);
  text_io::finish_output(out, path);
}

EnsembleModel read_model(std::istream& in, std::string_view source_name) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.value("format", "") != "semrel-ensemble") {
      throw DataError(std::string(source_name) + ": not an ensemble model bundle");
    }
    EnsembleModel model;
    model.preset.name = doc.at("preset").get<std::string>();
    model.preset.mode = parse_ensemble_mode(doc.at("mode").get<std::string>());
    model.preset.language = doc.value("language", "eng");
    model.preset.manifest = manifest_from_json(doc.at("manifest"));
    if (const auto it = doc.find("pca"); it != doc.end()) {
      for (const auto& [name, p] : it->items()) {
        std::vector<double> components;
        for (const auto& row : p.at("components")) {
          const std::vector<double> r = read_doubles(row);
          components.insert(components.end(), r.begin(), r.end());
        }
        model.pca.emplace(name, PcaModel(read_doubles(p.at("mean")), std::move(components),
                                         read_doubles(p.at("explained_variance"))));
      }
    }
    const auto& s = doc.at("svr");
    if (!s.is_null()) {
      Scaler scaler{read_doubles(s.at("scaler").at("mean")), read_doubles(s.at("scaler").at("stddev"))};
      FeatureMatrix support;
      support.cols = scaler.mean.size();
      for (const auto& row : s.at("support_vectors")) support.push_row(read_doubles(row));
      model.svr = SvrModel(std::move(scaler), s.at("gamma").get<double>(), s.at("C").get<double>(),
                           s.at("epsilon").get<double>(), std::move(support), read_doubles(s.at("dual_coefs")),
                           s.at("bias").get<double>());
      if (model.svr->num_features() != model.manifest().size()) {
        throw DataError(std::string(source_name) + ": scaler width does not match manifest");
      }
    }
    if ((model.mode() == EnsembleMode::kSupervisedSvr) != model.svr.has_value()) {
      throw DataError(std::string(source_name) + ": mode and SVR state disagree");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string(source_name) + ": malformed model bundle: " + e.what());
  }
}

EnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in = text_io::open_input(path);
  return read_model(in, path.string());
}

// ---------------------------------------------------------------- tuning

SvrGrid parse_grid(std::string_view text) {
  SvrGrid grid;
  for (std::string_view part : text_io::split(text, ';')) {
    if (part.empty()) continue;
    const std::size_t eq = part.find('=');
    if (eq == std::string_view::npos) throw ConfigError("grid entry '" + std::string(part) + "' lacks '='");
    const std::string_view key = part.substr(0, eq);
    std::vector<std::optional<double>> values;
    for (std::string_view item : text_io::split(part.substr(eq + 1), ',')) {
      if (item == "auto") {
        values.emplace_back(std::nullopt);
        continue;
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v)) {
        throw ConfigError("grid value '" + std::string(item) + "' is not a number");
      }
      values.emplace_back(v);
    }
    const auto numeric = [&](const char* name) {
      std::vector<double> out;
      for (const auto& v : values) {
        if (!v) throw ConfigError(std::string("'auto' is only valid for gamma, not ") + name);
        out.push_back(*v);
      }
      return out;
    };
    if (key == "C" || key == "c") {
      grid.c = numeric("C");
    } else if (key == "epsilon" || key == "eps") {
      grid.epsilon = numeric("epsilon");
    } else if (key == "gamma") {
      grid.gamma = values;
    } else {
      throw ConfigError("unknown grid parameter '" + std::string(key) + "'");
    }
  }
  return grid;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 engine(seed);
  const auto bounded = [&](std::uint64_t range) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw = engine();
    while (draw >= limit) draw = engine();
    return draw % range;
  };
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[bounded(i)]);
  return perm;
}

TuneResult tune_svr(const FeatureMatrix& x, std::span<const double> y, const SvrGrid& grid, std::size_t folds,
                    std::uint64_t seed, const SvrParams& base) {
  if (grid.c.empty() || grid.epsilon.empty() || grid.gamma.empty()) throw ConfigError("empty hyperparameter grid");
  if (folds < 2) throw ConfigError("need at least 2 folds");
  if (folds > x.rows) {
    throw ConfigError(std::to_string(folds) + " folds requested for " + std::to_string(x.rows) + " rows");
  }
  if (x.rows != y.size()) throw DataError("tune_svr: row/target count mismatch");

  const std::vector<std::size_t> perm = seeded_permutation(x.rows, seed);
  std::vector<std::size_t> fold_of(x.rows);
  for (std::size_t p = 0; p < perm.size(); ++p) fold_of[perm[p]] = p % folds;

  const double auto_gamma = [&] {
    const Scaler scaler = Scaler::fit(x);
    FeatureMatrix scaled;
    scaled.cols = x.cols;
    for (std::size_t i = 0; i < x.rows; ++i) scaled.push_row(scaler.apply(x.row(i)));
    return default_gamma(scaled);
  }();
  const auto resolved = [&](const std::optional<double>& g) { return g.value_or(auto_gamma); };

  TuneResult result;
  bool have_best = false;
  for (double c : grid.c) {
    for (double eps : grid.epsilon) {
      for (const auto& gamma : grid.gamma) {
        SvrParams params = base;
        params.c = c;
        params.epsilon = eps;
        params.gamma = gamma;
        double total = 0.0;
        for (std::size_t f = 0; f < folds; ++f) {
          FeatureMatrix train;
          train.cols = x.cols;
          std::vector<double> train_y;
          std::vector<std::size_t> held_out;
          for (std::size_t i = 0; i < x.rows; ++i) {
            if (fold_of[i] == f) {
              held_out.push_back(i);
            } else {
              train.push_row(x.row(i));
              train_y.push_back(y[i]);
            }
          }
          const SvrModel model = fit_svr(train, train_y, params);
          std::vector<double> predicted;
          std::vector<double> gold;
          for (std::size_t i : held_out) {
            predicted.push_back(model.predict(x.row(i)));
            gold.push_back(y[i]);
          }
          try {
            total += spearman(predicted, gold);
          } catch (const Error&) {
            // undefined on constant predictions or single-row folds: scores 0
          }
        }
        const double score = total / static_cast<double>(folds);
        result.candidates.push_back({c, eps, gamma, score});

        bool better = !have_best || score > result.cv_spearman + 1e-9;
        if (have_best && std::abs(score - result.cv_spearman) <= 1e-9) {
          if (c != result.c) {
            better = c < result.c;
          } else if (eps != result.epsilon) {
            better = eps > result.epsilon;
          } else {
            better = resolved(gamma) < resolved(result.gamma);
          }
        }
        if (better) {
          result.c = c;
          result.epsilon = eps;
          result.gamma = gamma;
          result.cv_spearman = score;
          have_best = true;
        }
      }
    }
  }
  return result;
}

}  // namespace semrel
