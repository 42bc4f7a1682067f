#pragma once

// Static word-vector tables and sentence embeddings composed as means over
// token subsets.

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semrel/corpus.hpp"
#include "semrel/textstats.hpp"

namespace semrel {

class VectorTable {
 public:
  VectorTable() = default;
  VectorTable(std::string name, std::size_t dim);

  // Keys are normalized like tokenize(). Returns true if the key was new.
  bool insert(std::string_view token, std::span<const double> vector);

  std::optional<std::span<const double>> lookup(std::string_view normalized_token) const;

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }
  std::size_t duplicate_count() const { return duplicates_; }

 private:
  std::string name_;
  std::size_t dim_ = 0;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t duplicates_ = 0;
};

// Text format: "token v1 ... vd" per line, whitespace separated. A leading
// word2vec "count dim" header line is skipped. Duplicate tokens: last wins.
VectorTable load_vectors(const std::filesystem::path& path, std::string name);
VectorTable parse_vectors(std::istream& in, std::string_view source_name, std::string name);

enum class Selection { kAll, kContent, kNoun, kTreeTop3 };

Selection parse_selection(std::string_view name);  // all | content | noun | tree_top3
std::string_view selection_name(Selection selection);

struct SelectedToken {
  std::string text;  // normalized
  int index = -1;    // annotation token_index, or position in the TokenSet
};

// Tokens chosen by a selection mode. noun/tree_top3 need annotations;
// content needs a filter (POS mode uses annotations when present).
std::vector<SelectedToken> select_tokens(const TokenSet& tokens, Selection selection,
                                         const std::vector<TokenAnnotation>* annotations,
                                         const ContentFilter* filter);

struct SentenceEmbedding {
  std::vector<double> vector;
  std::size_t covered_tokens = 0;
  std::size_t total_tokens = 0;
  std::string source;

  bool valid() const { return covered_tokens > 0; }
};

using TokenVectorLookup = std::function<std::optional<std::span<const double>>(const SelectedToken&)>;

// Arithmetic mean of the vectors found by `lookup`; missing tokens are skipped
// and counted. No hits yields an invalid embedding (zero vector).
SentenceEmbedding mean_of_selected(const std::vector<SelectedToken>& selected, std::size_t dim,
                                   const TokenVectorLookup& lookup, std::string source);

SentenceEmbedding mean_embedding(const TokenSet& tokens, const VectorTable& table, Selection selection,
                                 const std::vector<TokenAnnotation>* annotations = nullptr,
                                 const ContentFilter* filter = nullptr);

// dot(a,b) / (|a| |b|), clamped to [-1, 1]. DataError on length mismatch,
// NumericalError("degenerate vector") on a zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace semrel
