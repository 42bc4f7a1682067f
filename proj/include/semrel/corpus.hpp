#pragma once

// Sentence-pair datasets and their optional annotation sidecars.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace semrel {

enum class Side { kA, kB };

std::string_view side_name(Side side);
Side parse_side(std::string_view text);  // "A" | "B", throws DataError

struct SentencePair {
  std::string pair_id;
  std::string text_a;
  std::string text_b;
  std::optional<double> gold_score;

  const std::string& text(Side side) const { return side == Side::kA ? text_a : text_b; }

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

// Immutable after construction; iteration order is file order.
class Dataset {
 public:
  Dataset() = default;
  // Throws DataError on duplicate or empty ids, empty texts or out-of-range scores.
  Dataset(std::vector<SentencePair> pairs, std::string language_tag, std::string split_tag);

  const std::vector<SentencePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  const std::string& language_tag() const { return language_tag_; }
  const std::string& split_tag() const { return split_tag_; }

  const SentencePair* find(std::string_view pair_id) const;
  bool all_gold() const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.pairs_ == b.pairs_ && a.language_tag_ == b.language_tag_ && a.split_tag_ == b.split_tag_;
  }

 private:
  std::vector<SentencePair> pairs_;
  std::string language_tag_;
  std::string split_tag_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class DatasetFormat { kNativeTsv, kSemevalCsv };

DatasetFormat parse_dataset_format(std::string_view name);  // "native_tsv" | "semeval_csv"

Dataset parse_dataset(std::istream& in, DatasetFormat format, std::string_view source_name,
                      std::string language_tag = "eng", std::string split_tag = "");
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     std::string language_tag = "eng", std::string split_tag = "");

// Native TSV only. Texts containing tabs or newlines cannot be represented.
void write_dataset(std::ostream& out, const Dataset& dataset);
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);

struct TokenAnnotation {
  std::string pair_id;
  Side side = Side::kA;
  int token_index = 0;
  std::string surface;
  std::string upos;
  int head_index = -1;  // -1 marks the root

  friend bool operator==(const TokenAnnotation&, const TokenAnnotation&) = default;
};

using AnnotationKey = std::pair<std::string, Side>;
using AnnotationMap = std::map<AnnotationKey, std::vector<TokenAnnotation>>;

AnnotationMap parse_annotations(std::istream& in, std::string_view source_name);
AnnotationMap load_annotations(const std::filesystem::path& path);

// Hop count from each token to the root along head_index. Tokens must form a
// valid tree (validated by the loaders).
std::vector<int> dependency_depths(const std::vector<TokenAnnotation>& tokens);

// Validates one sentence's token list; throws DataError naming `where`.
void validate_sentence_tokens(const std::vector<TokenAnnotation>& tokens, std::string_view where);

}  // namespace semrel
