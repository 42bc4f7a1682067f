#include "semrel/wordvec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "semrel/error.hpp"
#include "semrel/simd.hpp"
#include "semrel/unicode.hpp"
#include "text_io.hpp"

namespace semrel {

namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view text, double& value) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(value);
}

bool is_integer(std::string_view text) {
  return !text.empty() && text.find_first_not_of("0123456789") == std::string_view::npos;
}

}  // namespace

VectorTable::VectorTable(std::string name, std::size_t dim) : name_(std::move(name)), dim_(dim) {
  if (dim_ == 0) throw DataError("vector table '" + name_ + "': dimension must be positive");
}

bool VectorTable::insert(std::string_view token, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw DataError("vector table '" + name_ + "': vector of length " + std::to_string(vector.size()) +
                    " under dim " + std::to_string(dim_));
  }
  const std::string key = unicode::normalize_token(token);
  const auto [it, inserted] = index_.emplace(key, data_.size());
  if (inserted) {
    data_.insert(data_.end(), vector.begin(), vector.end());
  } else {
    ++duplicates_;
    std::copy(vector.begin(), vector.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second));
  }
  return inserted;
}

std::optional<std::span<const double>> VectorTable::lookup(std::string_view normalized_token) const {
  const auto it = index_.find(std::string(normalized_token));
  if (it == index_.end()) return std::nullopt;
  return std::span<const double>(data_.data() + it->second, dim_);
}

VectorTable parse_vectors(std::istream& in, std::string_view source_name, std::string name) {
  VectorTable table;
  bool have_table = false;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string_view> fields = split_whitespace(line);
    if (fields.empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no) + ": ";
    if (line_no == 1 && fields.size() == 2 && is_integer(fields[0]) && is_integer(fields[1])) continue;
    if (fields.size() < 2) throw DataError(where + "row has no vector values");
    values.clear();
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double value = 0.0;
      if (!parse_double(fields[i], value)) {
        throw DataError(where + "unparseable value '" + std::string(fields[i]) + "'");
      }
      values.push_back(value);
    }
    if (!have_table) {
      table = VectorTable(std::move(name), values.size());
      have_table = true;
    } else if (values.size() != table.dim()) {
      throw DataError(where + "dimension " + std::to_string(values.size()) + " differs from " +
                      std::to_string(table.dim()));
    }
    if (!unicode::is_valid_utf8(fields[0])) throw DataError(where + "invalid UTF-8 token");
    table.insert(fields[0], values);
  }
  if (!have_table) throw DataError(std::string(source_name) + ": no vectors found");
  return table;
}

VectorTable load_vectors(const std::filesystem::path& path, std::string name) {
  std::ifstream in = text_io::open_input(path);
  return parse_vectors(in, path.string(), std::move(name));
}

Selection parse_selection(std::string_view name) {
  if (name == "all") return Selection::kAll;
  if (name == "content") return Selection::kContent;
  if (name == "noun") return Selection::kNoun;
  if (name == "tree_top3") return Selection::kTreeTop3;
  throw ConfigError("unknown selection mode '" + std::string(name) + "'");
}

std::string_view selection_name(Selection selection) {
  switch (selection) {
    case Selection::kAll:
      return "all";
    case Selection::kContent:
      return "content";
    case Selection::kNoun:
      return "noun";
    case Selection::kTreeTop3:
      return "tree_top3";
  }
  return "?";
}

std::vector<SelectedToken> select_tokens(const TokenSet& tokens, Selection selection,
                                         const std::vector<TokenAnnotation>* annotations,
                                         const ContentFilter* filter) {
  std::vector<SelectedToken> out;
  const auto from_token_set = [&](auto keep) {
    const auto& list = tokens.tokens();
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (keep(list[i])) out.push_back({list[i], static_cast<int>(i)});
    }
  };
  const auto from_annotations = [&](auto keep) {
    for (const TokenAnnotation& token : *annotations) {
      if (unicode::is_punctuation_or_space(token.surface)) continue;
      std::string text = unicode::normalize_token(token.surface);
      if (keep(token, text)) out.push_back({std::move(text), token.token_index});
    }
  };

  switch (selection) {
    case Selection::kAll:
      from_token_set([](const std::string&) { return true; });
      break;
    case Selection::kContent:
      if (filter == nullptr) throw ConfigError("content selection requires a content filter");
      if (filter->mode() == ContentFilter::Mode::kPos && annotations != nullptr) {
        from_annotations([](const TokenAnnotation& t, const std::string&) {
          return ContentFilter::is_content_upos(t.upos);
        });
      } else {
        from_token_set([&](const std::string& t) { return !filter->is_function_word(t); });
      }
      break;
    case Selection::kNoun:
      if (annotations == nullptr) throw ConfigError("noun selection requires annotations");
      from_annotations([](const TokenAnnotation& t, const std::string&) {
        return t.upos == "NOUN" || t.upos == "PROPN";
      });
      break;
    case Selection::kTreeTop3: {
      if (annotations == nullptr) throw ConfigError("tree_top3 selection requires annotations");
      const std::vector<int> depths = dependency_depths(*annotations);
      from_annotations([&](const TokenAnnotation& t, const std::string&) {
        return depths[static_cast<std::size_t>(t.token_index)] <= 2;
      });
      break;
    }
  }
  return out;
}

SentenceEmbedding mean_of_selected(const std::vector<SelectedToken>& selected, std::size_t dim,
                                   const TokenVectorLookup& lookup, std::string source) {
  SentenceEmbedding embedding;
  embedding.vector.assign(dim, 0.0);
  embedding.total_tokens = selected.size();
  embedding.source = std::move(source);
  for (const SelectedToken& token : selected) {
    const auto vector = lookup(token);
    if (!vector) continue;
    if (vector->size() != dim) throw DataError("token vector dimension mismatch for '" + token.text + "'");
    simd::axpy(1.0, *vector, embedding.vector);
    ++embedding.covered_tokens;
  }
  if (embedding.covered_tokens > 0) {
    const double scale = 1.0 / static_cast<double>(embedding.covered_tokens);
    for (double& v : embedding.vector) v *= scale;
  }
  return embedding;
}

SentenceEmbedding mean_embedding(const TokenSet& tokens, const VectorTable& table, Selection selection,
                                 const std::vector<TokenAnnotation>* annotations, const ContentFilter* filter) {
  const std::vector<SelectedToken> selected = select_tokens(tokens, selection, annotations, filter);
  return mean_of_selected(
      selected, table.dim(), [&](const SelectedToken& token) { return table.lookup(token.text); },
      table.name() + ":" + std::string(selection_name(selection)));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DataError("cosine: length mismatch (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  const double aa = simd::dot(a, a);
  const double bb = simd::dot(b, b);
  if (!(aa > 0.0) || !(bb > 0.0)) throw NumericalError("degenerate vector");
  const double value = simd::dot(a, b) / (std::sqrt(aa) * std::sqrt(bb));
  return std::clamp(value, -1.0, 1.0);
}

}  // namespace semrel
