#pragma once

// Surface statistics of a sentence pair: character edit-distance ratio,
// word overlap ratio, and content-word overlap ratio.

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "semrel/corpus.hpp"

namespace semrel {

// Normalized tokens of one sentence plus the set of unique types.
class TokenSet {
 public:
  TokenSet() = default;
  explicit TokenSet(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::set<std::string>& types() const { return types_; }
  bool empty() const { return tokens_.empty(); }
  std::size_t size() const { return tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::set<std::string> types_;
};

// UAX #29 word segmentation over NFC text; tokens are case-folded and
// segments made only of punctuation or whitespace are dropped.
TokenSet tokenize(std::string_view text);

// Tokens taken from annotation surfaces, normalized like tokenize().
TokenSet tokens_from_annotations(const std::vector<TokenAnnotation>& annotations);

// Separates content words from function words, either with a closed-class
// lexicon or (when annotations exist) by coarse POS tag.
class ContentFilter {
 public:
  enum class Mode { kLexicon, kPos };

  // Lexicon of function words; entries are normalized like tokens.
  static ContentFilter from_words(const std::vector<std::string>& words, std::string language);
  // One word per line, '#' starts a comment line.
  static ContentFilter load(const std::filesystem::path& path, std::string language);
  // Built-in lexicon for "eng", "esp" or "hin"; ConfigError otherwise.
  static ContentFilter builtin(std::string_view language);

  ContentFilter with_mode(Mode mode) const;

  Mode mode() const { return mode_; }
  const std::string& language() const { return language_; }
  std::size_t lexicon_size() const { return function_words_.size(); }

  bool is_function_word(std::string_view normalized_token) const;
  static bool is_content_upos(std::string_view upos);

  // Lexicon filtering of a token set (used in both modes when no annotations exist).
  TokenSet apply(const TokenSet& tokens) const;
  // POS mode keeps content-tagged tokens; lexicon mode filters the surfaces.
  TokenSet apply(const std::vector<TokenAnnotation>& annotations) const;

 private:
  Mode mode_ = Mode::kLexicon;
  std::string language_;
  std::unordered_set<std::string> function_words_;
};

// Edit distance over Unicode scalar values of the NFC forms.
std::size_t levenshtein(std::string_view s1, std::string_view s2);
std::size_t levenshtein(std::u32string_view s1, std::u32string_view s2);

namespace detail {
// Two-row dynamic programme.
std::size_t levenshtein_dp(std::u32string_view s1, std::u32string_view s2);
// Myers/Hyyrö bit-vector algorithm; the shorter argument must be <= 64 scalars.
std::size_t levenshtein_bitparallel(std::u32string_view s1, std::u32string_view s2);
}  // namespace detail

// (len1 + len2 - dist) / (len1 + len2) over case-folded NFC scalars,
// whitespace included. DataError when both texts are empty.
double char_distance_ratio(std::string_view text_a, std::string_view text_b);
double char_distance_ratio(const SentencePair& pair);

// |A ∩ B| / |A ∪ B| over token types. DataError when the union is empty.
double word_overlap_ratio(const TokenSet& a, const TokenSet& b);

struct ContentOverlap {
  double value = 0.0;
  bool fallback = false;  // filtered union empty; value is the unfiltered ratio
};

ContentOverlap content_overlap_ratio(const TokenSet& a, const TokenSet& b, const ContentFilter& filter);
// Overlap of already-filtered content sets, falling back to the full sets.
ContentOverlap content_overlap_ratio(const TokenSet& content_a, const TokenSet& content_b,
                                     const TokenSet& all_a, const TokenSet& all_b);

struct StatFeatures {
  double char_distance_ratio = 0.0;
  double word_overlap_ratio = 0.0;
  double content_overlap_ratio = 0.0;
  bool content_fallback = false;
};

// POS mode uses the annotations when both sides are supplied.
StatFeatures stat_features(const SentencePair& pair, const ContentFilter& filter,
                           const std::vector<TokenAnnotation>* annotations_a = nullptr,
                           const std::vector<TokenAnnotation>* annotations_b = nullptr);

}  // namespace semrel
