#include "semrel/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "semrel/error.hpp"
#include "semrel/unicode.hpp"
#include "text_io.hpp"

namespace semrel {

namespace {

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

double parse_score(std::string_view text, std::string_view source, std::size_t line) {
  const std::string_view trimmed = unicode::trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
  if (ec != std::errc() || ptr != trimmed.data() + trimmed.size() || !std::isfinite(value)) {
    throw DataError(where(source, line) + "unparseable score '" + std::string(text) + "'");
  }
  if (value < 0.0 || value > 1.0) {
    throw DataError(where(source, line) + "score " + std::string(trimmed) + " outside [0,1]");
  }
  return value;
}

// Row-level validation shared by both formats; reports the source line.
void check_pair(const SentencePair& pair, std::string_view source, std::size_t line) {
  if (pair.pair_id.empty()) throw DataError(where(source, line) + "empty pair_id");
  if (unicode::trim(pair.text_a).empty() || unicode::trim(pair.text_b).empty()) {
    throw DataError(where(source, line) + "empty sentence text in pair '" + pair.pair_id + "'");
  }
  if (!unicode::is_valid_utf8(pair.text_a) || !unicode::is_valid_utf8(pair.text_b) ||
      !unicode::is_valid_utf8(pair.pair_id)) {
    throw DataError(where(source, line) + "invalid UTF-8 in pair '" + pair.pair_id + "'");
  }
}

// Reads one CSV record (RFC 4180 quoting; quoted fields may span lines).
// Returns false at end of input. `line` is advanced past the record.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line,
                     std::string_view source) {
  fields.clear();
  std::string raw;
  if (!std::getline(in, raw)) return false;
  ++line;
  const std::size_t start_line = line;
  std::string field;
  bool in_quotes = false;
  std::size_t i = 0;
  while (true) {
    if (i >= raw.size()) {
      if (!in_quotes) break;
      std::string next;
      if (!std::getline(in, next)) {
        throw DataError(where(source, start_line) + "unterminated quoted field");
      }
      ++line;
      field.push_back('\n');
      raw = std::move(next);
      i = 0;
      continue;
    }
    const char c = raw[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < raw.size() && raw[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r' || i + 1 != raw.size()) {
      field.push_back(c);
    }
    ++i;
  }
  fields.push_back(std::move(field));
  return true;
}

Dataset parse_native(std::istream& in, std::string_view source, std::string language_tag,
                     std::string split_tag) {
  std::vector<SentencePair> pairs;
  std::unordered_map<std::string, std::size_t> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const std::vector<std::string_view> cols = text_io::split(raw, '\t');
    if (cols.size() != 3 && cols.size() != 4) {
      throw DataError(where(source, line) + "expected 3 or 4 tab-separated columns, found " +
                      std::to_string(cols.size()));
    }
    SentencePair pair{std::string(cols[0]), std::string(cols[1]), std::string(cols[2]), std::nullopt};
    if (cols.size() == 4 && !unicode::trim(cols[3]).empty()) {
      pair.gold_score = parse_score(cols[3], source, line);
    }
    check_pair(pair, source, line);
    if (auto [it, inserted] = seen.emplace(pair.pair_id, line); !inserted) {
      throw DataError(where(source, line) + "duplicate pair_id '" + pair.pair_id +
                      "' (first seen on line " + std::to_string(it->second) + ")");
    }
    pairs.push_back(std::move(pair));
  }
  return Dataset(std::move(pairs), std::move(language_tag), std::move(split_tag));
}

Dataset parse_semeval(std::istream& in, std::string_view source, std::string language_tag,
                      std::string split_tag) {
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_csv_record(in, fields, line, source)) {
    return Dataset({}, std::move(language_tag), std::move(split_tag));
  }
  if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
  const auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(fields.begin(), fields.end(), name);
    if (it == fields.end()) return std::nullopt;
    return static_cast<std::size_t>(it - fields.begin());
  };
  const auto id_col = column("PairID");
  const auto text_col = column("Text");
  const auto score_col = column("Score");
  if (!id_col || !text_col) {
    throw DataError(where(source, 1) + "SemEval CSV header must contain PairID and Text columns");
  }
  const std::size_t width = fields.size();

  std::vector<SentencePair> pairs;
  std::unordered_map<std::string, std::size_t> seen;
  while (true) {
    const std::size_t record_line = line + 1;
    if (!read_csv_record(in, fields, line, source)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != width) {
      throw DataError(where(source, record_line) + "expected " + std::to_string(width) +
                      " CSV fields, found " + std::to_string(fields.size()));
    }
    const std::string& text = fields[*text_col];
    const std::size_t sep = text.find("\\n");
    if (sep == std::string::npos || text.find("\\n", sep + 2) != std::string::npos) {
      throw DataError(where(source, record_line) +
                      "Text field must contain exactly one literal \\n separator");
    }
    SentencePair pair{fields[*id_col], text.substr(0, sep), text.substr(sep + 2), std::nullopt};
    if (score_col && !unicode::trim(fields[*score_col]).empty()) {
      pair.gold_score = parse_score(fields[*score_col], source, record_line);
    }
    check_pair(pair, source, record_line);
    if (auto [it, inserted] = seen.emplace(pair.pair_id, record_line); !inserted) {
      throw DataError(where(source, record_line) + "duplicate pair_id '" + pair.pair_id +
                      "' (first seen on line " + std::to_string(it->second) + ")");
    }
    pairs.push_back(std::move(pair));
  }
  return Dataset(std::move(pairs), std::move(language_tag), std::move(split_tag));
}

int parse_int(std::string_view text, std::string_view source, std::size_t line, const char* what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(where(source, line) + "unparseable " + what + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string_view side_name(Side side) { return side == Side::kA ? "A" : "B"; }

Side parse_side(std::string_view text) {
  if (text == "A") return Side::kA;
  if (text == "B") return Side::kB;
  throw DataError("side must be 'A' or 'B', got '" + std::string(text) + "'");
}

Dataset::Dataset(std::vector<SentencePair> pairs, std::string language_tag, std::string split_tag)
    : pairs_(std::move(pairs)), language_tag_(std::move(language_tag)), split_tag_(std::move(split_tag)) {
  index_.reserve(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const SentencePair& pair = pairs_[i];
    check_pair(pair, "<dataset>", i + 1);
    if (pair.gold_score && !(*pair.gold_score >= 0.0 && *pair.gold_score <= 1.0)) {
      throw DataError("pair '" + pair.pair_id + "': score outside [0,1]");
    }
    if (!index_.emplace(pair.pair_id, i).second) {
      throw DataError("duplicate pair_id '" + pair.pair_id + "'");
    }
  }
}

const SentencePair* Dataset::find(std::string_view pair_id) const {
  const auto it = index_.find(std::string(pair_id));
  return it == index_.end() ? nullptr : &pairs_[it->second];
}

bool Dataset::all_gold() const {
  return std::all_of(pairs_.begin(), pairs_.end(), [](const SentencePair& p) { return p.gold_score.has_value(); });
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "native_tsv" || name == "tsv") return DatasetFormat::kNativeTsv;
  if (name == "semeval_csv" || name == "csv") return DatasetFormat::kSemevalCsv;
  throw ConfigError("unknown dataset format '" + std::string(name) + "'");
}

Dataset parse_dataset(std::istream& in, DatasetFormat format, std::string_view source_name,
                      std::string language_tag, std::string split_tag) {
  if (format == DatasetFormat::kNativeTsv) {
    return parse_native(in, source_name, std::move(language_tag), std::move(split_tag));
  }
  return parse_semeval(in, source_name, std::move(language_tag), std::move(split_tag));
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format, std::string language_tag,
                     std::string split_tag) {
  std::ifstream in = text_io::open_input(path);
  return parse_dataset(in, format, path.string(), std::move(language_tag), std::move(split_tag));
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  for (const SentencePair& pair : dataset) {
    for (const std::string* field : {&pair.pair_id, &pair.text_a, &pair.text_b}) {
      if (field->find_first_of("\t\n") != std::string::npos) {
        throw DataError("pair '" + pair.pair_id + "' contains a tab or newline; not representable as TSV");
      }
    }
    out << pair.pair_id << '\t' << pair.text_a << '\t' << pair.text_b;
    if (pair.gold_score) out << '\t' << text_io::format_shortest(*pair.gold_score);
    out << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out = text_io::open_output(path);
  write_dataset(out, dataset);
  text_io::finish_output(out, path);
}

AnnotationMap parse_annotations(std::istream& in, std::string_view source_name) {
  AnnotationMap map;
  std::map<AnnotationKey, std::size_t> first_line;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const std::vector<std::string_view> cols = text_io::split(raw, '\t');
    if (cols.size() != 6) {
      throw DataError(where(source_name, line) + "expected 6 tab-separated columns, found " +
                      std::to_string(cols.size()));
    }
    TokenAnnotation token;
    token.pair_id = std::string(cols[0]);
    try {
      token.side = parse_side(cols[1]);
    } catch (const DataError& e) {
      throw DataError(where(source_name, line) + e.what());
    }
    token.token_index = parse_int(cols[2], source_name, line, "token_index");
    token.surface = std::string(cols[3]);
    token.upos = std::string(cols[4]);
    token.head_index = parse_int(cols[5], source_name, line, "head_index");
    if (token.token_index < 0) throw DataError(where(source_name, line) + "negative token_index");
    AnnotationKey key{token.pair_id, token.side};
    first_line.emplace(key, line);
    map[key].push_back(std::move(token));
  }
  for (auto& [key, tokens] : map) {
    std::stable_sort(tokens.begin(), tokens.end(),
                     [](const TokenAnnotation& a, const TokenAnnotation& b) { return a.token_index < b.token_index; });
    validate_sentence_tokens(tokens, where(source_name, first_line[key]) + "sentence " + key.first + "/" +
                                         std::string(side_name(key.second)));
  }
  return map;
}

AnnotationMap load_annotations(const std::filesystem::path& path) {
  std::ifstream in = text_io::open_input(path);
  return parse_annotations(in, path.string());
}

void validate_sentence_tokens(const std::vector<TokenAnnotation>& tokens, std::string_view where_text) {
  const auto n = static_cast<int>(tokens.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    if (tokens[static_cast<std::size_t>(i)].token_index != i) {
      throw DataError(std::string(where_text) + ": token_index gap or duplicate at position " + std::to_string(i));
    }
  }
  for (int i = 0; i < n; ++i) {
    const int head = tokens[static_cast<std::size_t>(i)].head_index;
    if (head == -1) {
      ++roots;
    } else if (head < 0 || head >= n || head == i) {
      throw DataError(std::string(where_text) + ": invalid head_index " + std::to_string(head) + " for token " +
                      std::to_string(i));
    }
  }
  if (roots == 0) throw DataError(std::string(where_text) + ": no root");
  if (roots > 1) throw DataError(std::string(where_text) + ": multiple roots");
  // Cycle check: every head chain must reach the root within n hops.
  for (int i = 0; i < n; ++i) {
    int node = i;
    int hops = 0;
    while (tokens[static_cast<std::size_t>(node)].head_index != -1) {
      node = tokens[static_cast<std::size_t>(node)].head_index;
      if (++hops > n) throw DataError(std::string(where_text) + ": head_index cycle through token " + std::to_string(i));
    }
  }
}

std::vector<int> dependency_depths(const std::vector<TokenAnnotation>& tokens) {
  const std::size_t n = tokens.size();
  std::vector<int> depth(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    int hops = 0;
    int node = static_cast<int>(i);
    while (tokens[static_cast<std::size_t>(node)].head_index != -1) {
      node = tokens[static_cast<std::size_t>(node)].head_index;
      if (++hops > static_cast<int>(n)) throw DataError("head_index cycle in sentence " + tokens[i].pair_id);
    }
    depth[i] = hops;
  }
  return depth;
}

}  // namespace semrel
