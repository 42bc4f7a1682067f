#pragma once

// Feature manifests, per-pair feature assembly, and the two ensemble modes:
// an RBF epsilon-SVR over z-scored features, or the unweighted mean of
// positively oriented features.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semrel/corpus.hpp"
#include "semrel/embedstore.hpp"
#include "semrel/pca.hpp"
#include "semrel/svr.hpp"
#include "semrel/textstats.hpp"
#include "semrel/wordvec.hpp"

namespace semrel {

enum class FeatureKind {
  kStatCharRatio,
  kStatWordOverlap,
  kStatContentOverlap,
  kWordvecCosine,
  kEmbedCosine,
};

std::string_view feature_kind_name(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view name);
bool is_cosine_kind(FeatureKind kind);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kStatCharRatio;
  std::string source;                       // table or store name (cosine kinds)
  Selection selection = Selection::kAll;    // wordvec_cosine only
  bool pca = false;                         // cosine kinds only

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

class FeatureManifest {
 public:
  FeatureManifest() = default;
  // ConfigError on duplicate or empty names, or a cosine feature without a source.
  explicit FeatureManifest(std::vector<FeatureSpec> entries);

  const std::vector<FeatureSpec>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return entries_[i]; }
  std::vector<std::string> names() const;

  friend bool operator==(const FeatureManifest&, const FeatureManifest&) = default;

 private:
  std::vector<FeatureSpec> entries_;
};

enum class EnsembleMode { kSupervisedSvr, kUnsupervisedMean };

std::string_view ensemble_mode_name(EnsembleMode mode);
EnsembleMode parse_ensemble_mode(std::string_view name);

// A named system: manifest, combination mode, and the language used to pick
// a function-word list.
struct Preset {
  std::string name;
  EnsembleMode mode = EnsembleMode::kSupervisedSvr;
  std::string language = "eng";
  FeatureManifest manifest;

  friend bool operator==(const Preset&, const Preset&) = default;
};

// supervised-eng, unsup-eng, unsup-esp, unsup-hin
const std::vector<std::string>& preset_names();
Preset builtin_preset(std::string_view name);  // ConfigError if unknown

// JSON {"name","mode","language","features":[{"name","kind","source","selection","pca"}]}
Preset parse_manifest_json(std::istream& in, std::string_view source_name);
Preset load_manifest(const std::filesystem::path& path);

// Bit flags recorded per feature value.
enum FeatureFlag : std::uint8_t {
  kFlagNone = 0,
  kFlagContentFallback = 1,  // content overlap fell back to all words
  kFlagInvalidEmbedding = 2, // no selected token in vocabulary; value set to 0
  kFlagDegenerateVector = 4, // zero-norm vector (e.g. after PCA); value set to 0
};

struct FeatureVector {
  std::string pair_id;
  std::vector<double> values;
  std::vector<std::uint8_t> flags;
};

// Everything a manifest may refer to. Owned by value; immutable while features
// are assembled.
struct FeatureContext {
  std::map<std::string, VectorTable> tables;
  std::map<std::string, EmbeddingStore> stores;
  std::map<std::string, PcaModel> pca_models;  // keyed by feature name
  ContentFilter filter = ContentFilter::builtin("eng");
  AnnotationMap annotations;
};

// ConfigError naming the feature and resource when a manifest entry cannot
// be served by the context (PCA models excluded; see prepare_pca).
void check_resolvable(const FeatureManifest& manifest, const FeatureContext& context);

// Sentence vector for one side under a cosine feature (before PCA). nullopt
// for an invalid (uncovered) embedding. DataError when a store lacks the pair.
std::optional<std::vector<double>> side_vector(const SentencePair& pair, Side side, const FeatureSpec& spec,
                                               const FeatureContext& context);

// Fits a PCA model for each pca-flagged feature that has none in the context,
// pooling valid side vectors of every pair in `dataset`.
void prepare_pca(const Dataset& dataset, const FeatureManifest& manifest, FeatureContext& context);

FeatureVector assemble_features(const SentencePair& pair, const FeatureManifest& manifest,
                                const FeatureContext& context);

struct FeatureTable {
  std::vector<std::string> names;
  std::vector<FeatureVector> rows;  // dataset order
  std::vector<std::string> warnings;

  FeatureMatrix matrix() const;
};

// Parallel over pairs with at most `threads` workers; rows keep dataset order.
FeatureTable assemble_all(const Dataset& dataset, const FeatureManifest& manifest, const FeatureContext& context,
                          unsigned threads = 1);

// TSV with header "pair_id\t<name>...", values in shortest round-trip form.
void write_feature_table(std::ostream& out, const FeatureTable& table);
void write_feature_table(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_table(std::istream& in, std::string_view source_name);
FeatureTable load_feature_table(const std::filesystem::path& path);

struct EnsembleModel {
  Preset preset;  // name, mode, language, manifest
  std::optional<SvrModel> svr;
  std::map<std::string, PcaModel> pca;  // fitted at train time, keyed by feature name

  const FeatureManifest& manifest() const { return preset.manifest; }
  EnsembleMode mode() const { return preset.mode; }

  friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;
};

// Unclamped score. DataError if the vector length does not match the manifest.
double predict_raw(const EnsembleModel& model, const FeatureVector& fv);
// Score clamped to [0, 1].
double predict(const EnsembleModel& model, const FeatureVector& fv);

// Bundle JSON: preset, manifest, PCA models, hyperparameters, scaler, support
// vectors, coefficients. Doubles are written in shortest round-trip form.
void write_model(std::ostream& out, const EnsembleModel& model);
void write_model(const std::filesystem::path& path, const EnsembleModel& model);
EnsembleModel read_model(std::istream& in, std::string_view source_name);
EnsembleModel load_model(const std::filesystem::path& path);

struct SvrGrid {
  std::vector<double> c{1.0};
  std::vector<double> epsilon{0.1};
  std::vector<std::optional<double>> gamma{std::nullopt};  // nullopt: default rule
};

// "C=1,10;epsilon=0.01,0.1;gamma=auto,0.5". ConfigError on malformed input.
SvrGrid parse_grid(std::string_view text);

struct TuneResult {
  double c = 1.0;
  double epsilon = 0.1;
  std::optional<double> gamma;
  double cv_spearman = 0.0;
  struct Candidate {
    double c;
    double epsilon;
    std::optional<double> gamma;
    double cv_spearman;
  };
  std::vector<Candidate> candidates;
};

// k-fold cross-validated Spearman maximization over the grid with seeded
// shuffling. Scores within 1e-9 tie and are broken by smaller C, then larger
// epsilon, then smaller gamma.
TuneResult tune_svr(const FeatureMatrix& x, std::span<const double> y, const SvrGrid& grid, std::size_t folds,
                    std::uint64_t seed, const SvrParams& base = {});

// Deterministic, stdlib-independent permutation of 0..n-1.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace semrel
