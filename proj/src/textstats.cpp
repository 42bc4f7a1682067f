#include "semrel/textstats.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>

#include "semrel/error.hpp"
#include "semrel/unicode.hpp"
#include "text_io.hpp"

namespace semrel {

namespace detail {
std::vector<std::string_view> builtin_function_words(std::string_view language);
}  // namespace detail

TokenSet::TokenSet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  types_.insert(tokens_.begin(), tokens_.end());
}

TokenSet tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (const std::string& segment : unicode::word_segments(text)) {
    if (unicode::is_punctuation_or_space(segment)) continue;
    tokens.push_back(unicode::to_utf8(unicode::fold_case(unicode::nfc_scalars(segment))));
  }
  return TokenSet(std::move(tokens));
}

TokenSet tokens_from_annotations(const std::vector<TokenAnnotation>& annotations) {
  std::vector<std::string> tokens;
  tokens.reserve(annotations.size());
  for (const TokenAnnotation& token : annotations) {
    if (unicode::is_punctuation_or_space(token.surface)) continue;
    tokens.push_back(unicode::normalize_token(token.surface));
  }
  return TokenSet(std::move(tokens));
}

// ---------------------------------------------------------------- filter

ContentFilter ContentFilter::from_words(const std::vector<std::string>& words, std::string language) {
  ContentFilter filter;
  filter.language_ = std::move(language);
  for (const std::string& word : words) {
    const std::string_view trimmed = unicode::trim(word);
    if (trimmed.empty()) continue;
    filter.function_words_.insert(unicode::normalize_token(trimmed));
  }
  return filter;
}

ContentFilter ContentFilter::load(const std::filesystem::path& path, std::string language) {
  std::ifstream in = text_io::open_input(path);
  std::vector<std::string> words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view trimmed = unicode::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (!unicode::is_valid_utf8(trimmed)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": invalid UTF-8");
    }
    words.emplace_back(trimmed);
  }
  return from_words(words, std::move(language));
}

ContentFilter ContentFilter::builtin(std::string_view language) {
  const auto words = detail::builtin_function_words(language);
  if (words.empty()) {
    throw ConfigError("no built-in function-word list for language '" + std::string(language) +
                      "'; pass --function-words");
  }
  return from_words(std::vector<std::string>(words.begin(), words.end()), std::string(language));
}

ContentFilter ContentFilter::with_mode(Mode mode) const {
  ContentFilter copy = *this;
  copy.mode_ = mode;
  return copy;
}

bool ContentFilter::is_function_word(std::string_view normalized_token) const {
  return function_words_.contains(std::string(normalized_token));
}

bool ContentFilter::is_content_upos(std::string_view upos) {
  return upos == "NOUN" || upos == "PROPN" || upos == "VERB" || upos == "ADJ" || upos == "ADV";
}

TokenSet ContentFilter::apply(const TokenSet& tokens) const {
  std::vector<std::string> kept;
  for (const std::string& token : tokens.tokens()) {
    if (!is_function_word(token)) kept.push_back(token);
  }
  return TokenSet(std::move(kept));
}

TokenSet ContentFilter::apply(const std::vector<TokenAnnotation>& annotations) const {
  if (mode_ == Mode::kLexicon) return apply(tokens_from_annotations(annotations));
  std::vector<std::string> kept;
  for (const TokenAnnotation& token : annotations) {
    if (!is_content_upos(token.upos) || unicode::is_punctuation_or_space(token.surface)) continue;
    kept.push_back(unicode::normalize_token(token.surface));
  }
  return TokenSet(std::move(kept));
}

// ----------------------------------------------------------- levenshtein

namespace detail {

std::size_t levenshtein_dp(std::u32string_view s1, std::u32string_view s2) {
  if (s1.size() < s2.size()) std::swap(s1, s2);
  std::vector<std::size_t> row(s2.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= s1.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= s2.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t substitution = diagonal + (s1[i - 1] == s2[j - 1] ? 0 : 1);
      row[j] = std::min({above + 1, row[j - 1] + 1, substitution});
      diagonal = above;
    }
  }
  return row[s2.size()];
}

std::size_t levenshtein_bitparallel(std::u32string_view s1, std::u32string_view s2) {
  std::u32string_view pattern = s1.size() <= s2.size() ? s1 : s2;
  std::u32string_view text = s1.size() <= s2.size() ? s2 : s1;
  const std::size_t m = pattern.size();
  if (m == 0) return text.size();
  if (m > 64) throw std::invalid_argument("levenshtein_bitparallel: pattern longer than 64");

  // Match masks per distinct pattern scalar, sorted for binary search.
  std::vector<std::pair<char32_t, std::uint64_t>> peq;
  peq.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto it = std::lower_bound(peq.begin(), peq.end(), pattern[i],
                               [](const auto& entry, char32_t c) { return entry.first < c; });
    if (it == peq.end() || it->first != pattern[i]) it = peq.insert(it, {pattern[i], 0});
    it->second |= std::uint64_t{1} << i;
  }
  const auto match_mask = [&](char32_t c) -> std::uint64_t {
    auto it = std::lower_bound(peq.begin(), peq.end(), c,
                               [](const auto& entry, char32_t key) { return entry.first < key; });
    return (it != peq.end() && it->first == c) ? it->second : 0;
  };

  const std::uint64_t last = std::uint64_t{1} << (m - 1);
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
  std::size_t score = m;
  for (char32_t c : text) {
    const std::uint64_t eq = match_mask(c);
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    if (ph & last) ++score;
    if (mh & last) --score;
    ph = (ph << 1) | 1;  // row 0 grows by one per text scalar
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  return score;
}

}  // namespace detail

std::size_t levenshtein(std::u32string_view s1, std::u32string_view s2) {
  if (std::min(s1.size(), s2.size()) <= 64) return detail::levenshtein_bitparallel(s1, s2);
  return detail::levenshtein_dp(s1, s2);
}

std::size_t levenshtein(std::string_view s1, std::string_view s2) {
  return levenshtein(unicode::nfc_scalars(s1), unicode::nfc_scalars(s2));
}

// ---------------------------------------------------------------- ratios

double char_distance_ratio(std::string_view text_a, std::string_view text_b) {
  const std::u32string a = unicode::fold_case(unicode::nfc_scalars(text_a));
  const std::u32string b = unicode::fold_case(unicode::nfc_scalars(text_b));
  const std::size_t total = a.size() + b.size();
  if (total == 0) throw DataError("undefined ratio: both texts are empty");
  const std::size_t dist = levenshtein(std::u32string_view(a), std::u32string_view(b));
  return static_cast<double>(total - dist) / static_cast<double>(total);
}

double char_distance_ratio(const SentencePair& pair) { return char_distance_ratio(pair.text_a, pair.text_b); }

double word_overlap_ratio(const TokenSet& a, const TokenSet& b) {
  const auto& ta = a.types();
  const auto& tb = b.types();
  std::size_t shared = 0;
  for (const std::string& type : ta) shared += tb.count(type);
  const std::size_t total = ta.size() + tb.size() - shared;
  if (total == 0) throw DataError("undefined ratio: both token sets are empty");
  return static_cast<double>(shared) / static_cast<double>(total);
}

ContentOverlap content_overlap_ratio(const TokenSet& content_a, const TokenSet& content_b, const TokenSet& all_a,
                                     const TokenSet& all_b) {
  if (content_a.empty() && content_b.empty()) return {word_overlap_ratio(all_a, all_b), true};
  return {word_overlap_ratio(content_a, content_b), false};
}

ContentOverlap content_overlap_ratio(const TokenSet& a, const TokenSet& b, const ContentFilter& filter) {
  return content_overlap_ratio(filter.apply(a), filter.apply(b), a, b);
}

StatFeatures stat_features(const SentencePair& pair, const ContentFilter& filter,
                           const std::vector<TokenAnnotation>* annotations_a,
                           const std::vector<TokenAnnotation>* annotations_b) {
  const TokenSet a = tokenize(pair.text_a);
  const TokenSet b = tokenize(pair.text_b);
  StatFeatures features;
  features.char_distance_ratio = char_distance_ratio(pair);
  features.word_overlap_ratio = word_overlap_ratio(a, b);
  ContentOverlap content;
  if (filter.mode() == ContentFilter::Mode::kPos && annotations_a != nullptr && annotations_b != nullptr) {
    content = content_overlap_ratio(filter.apply(*annotations_a), filter.apply(*annotations_b), a, b);
  } else {
    content = content_overlap_ratio(a, b, filter);
  }
  features.content_overlap_ratio = content.value;
  features.content_fallback = content.fallback;
  return features;
}

}  // namespace semrel
