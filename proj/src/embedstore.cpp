#include "semrel/embedstore.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "semrel/error.hpp"
#include "semrel/wordvec.hpp"
#include "text_io.hpp"

namespace semrel {

namespace {

std::vector<double> to_float_precision(std::span<const double> vector, const std::string& what) {
  std::vector<double> out;
  out.reserve(vector.size());
  for (double v : vector) {
    if (!std::isfinite(v)) throw DataError(what + ": non-finite vector value");
    out.push_back(static_cast<double>(static_cast<float>(v)));
  }
  return out;
}

std::string record_name(const std::string& model, const std::string& pair_id, Side side) {
  return "embedding store '" + model + "' record (" + pair_id + ", " + std::string(side_name(side)) + ")";
}

Granularity parse_granularity(std::string_view name) {
  if (name == "sentence") return Granularity::kSentence;
  if (name == "token") return Granularity::kToken;
  throw DataError("unknown granularity '" + std::string(name) + "'");
}

}  // namespace

std::string_view granularity_name(Granularity granularity) {
  return granularity == Granularity::kSentence ? "sentence" : "token";
}

EmbeddingStore::EmbeddingStore(std::string model, std::size_t dim, Granularity granularity)
    : model_(std::move(model)), dim_(dim), granularity_(granularity) {
  if (dim_ == 0) throw DataError("embedding store '" + model_ + "': dim must be positive");
}

void EmbeddingStore::add(const std::string& pair_id, Side side, std::span<const double> vector) {
  const std::string what = record_name(model_, pair_id, side);
  if (granularity_ != Granularity::kSentence) throw DataError(what + ": sentence record in a token-granularity store");
  if (vector.size() != dim_) {
    throw DataError(what + ": vector length " + std::to_string(vector.size()) + " != dim " + std::to_string(dim_));
  }
  AnnotationKey key{pair_id, side};
  auto [it, inserted] = entries_.try_emplace(key);
  if (!inserted) throw DataError(what + ": duplicate (pair_id, side)");
  it->second.vectors.push_back(to_float_precision(vector, what));
  order_.push_back(std::move(key));
  ++record_count_;
}

void EmbeddingStore::add_token(const std::string& pair_id, Side side, int token_index,
                               std::span<const double> vector) {
  const std::string what = record_name(model_, pair_id, side) + " token " + std::to_string(token_index);
  if (granularity_ != Granularity::kToken) throw DataError(what + ": token record in a sentence-granularity store");
  if (vector.size() != dim_) {
    throw DataError(what + ": vector length " + std::to_string(vector.size()) + " != dim " + std::to_string(dim_));
  }
  AnnotationKey key{pair_id, side};
  auto [it, inserted] = entries_.try_emplace(key);
  if (inserted) order_.push_back(key);
  auto& vectors = it->second.vectors;
  if (token_index != static_cast<int>(vectors.size())) {
    throw DataError(what + ": token_index must continue 0..n-1 in order (expected " +
                    std::to_string(vectors.size()) + ")");
  }
  vectors.push_back(to_float_precision(vector, what));
  ++record_count_;
}

const std::vector<double>* EmbeddingStore::sentence(const std::string& pair_id, Side side) const {
  if (granularity_ != Granularity::kSentence) return nullptr;
  const auto it = entries_.find({pair_id, side});
  return it == entries_.end() ? nullptr : &it->second.vectors.front();
}

const std::vector<std::vector<double>>* EmbeddingStore::tokens(const std::string& pair_id, Side side) const {
  if (granularity_ != Granularity::kToken) return nullptr;
  const auto it = entries_.find({pair_id, side});
  return it == entries_.end() ? nullptr : &it->second.vectors;
}

std::vector<AnnotationKey> EmbeddingStore::missing(const Dataset& dataset) const {
  std::vector<AnnotationKey> out;
  for (const SentencePair& pair : dataset) {
    for (Side side : {Side::kA, Side::kB}) {
      if (!entries_.contains({pair.pair_id, side})) out.emplace_back(pair.pair_id, side);
    }
  }
  return out;
}

void EmbeddingStore::write(std::ostream& out) const {
  nlohmann::ordered_json header;
  header["type"] = "header";
  header["model"] = model_;
  header["dim"] = dim_;
  header["granularity"] = std::string(granularity_name(granularity_));
  out << header.dump() << '\n';
  for (const AnnotationKey& key : order_) {
    const auto& vectors = entries_.at(key).vectors;
    for (std::size_t t = 0; t < vectors.size(); ++t) {
      out << "{\"pair_id\":" << nlohmann::json(key.first).dump() << ",\"side\":\"" << side_name(key.second) << '"';
      if (granularity_ == Granularity::kToken) out << ",\"token_index\":" << t;
      out << ",\"vector\":[";
      for (std::size_t i = 0; i < vectors[t].size(); ++i) {
        if (i > 0) out << ',';
        out << text_io::format_significant(vectors[t][i], 9);
      }
      out << "]}\n";
    }
  }
}

bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
  if (a.model_ != b.model_ || a.dim_ != b.dim_ || a.granularity_ != b.granularity_ ||
      a.record_count_ != b.record_count_ || a.entries_.size() != b.entries_.size()) {
    return false;
  }
  for (const auto& [key, entry] : a.entries_) {
    const auto it = b.entries_.find(key);
    if (it == b.entries_.end() || it->second.vectors != entry.vectors) return false;
  }
  return true;
}

EmbeddingStore parse_embeddings(std::istream& in, std::string_view source_name) {
  std::string line;
  std::size_t line_no = 0;
  const auto where = [&] { return std::string(source_name) + ":" + std::to_string(line_no) + ": "; };
  const auto parse_line = [&](const std::string& text) {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where() + "invalid JSON: " + e.what());
    }
  };

  EmbeddingStore store;
  bool have_header = false;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const nlohmann::json record = parse_line(line);
    try {
      if (!have_header) {
        if (!record.is_object() || record.value("type", "") != "header") {
          throw DataError(where() + "first record must be a header");
        }
        const auto dim = record.at("dim").get<long long>();
        if (dim <= 0) throw DataError(where() + "header dim must be positive");
        store = EmbeddingStore(record.at("model").get<std::string>(), static_cast<std::size_t>(dim),
                               parse_granularity(record.value("granularity", "sentence")));
        have_header = true;
        continue;
      }
      const std::string pair_id = record.at("pair_id").get<std::string>();
      const Side side = parse_side(record.at("side").get<std::string>());
      const auto& vector = record.at("vector");
      if (!vector.is_array()) throw DataError(where() + "vector must be an array");
      values.clear();
      for (const auto& v : vector) values.push_back(v.get<double>());
      if (store.granularity() == Granularity::kToken) {
        store.add_token(pair_id, side, record.at("token_index").get<int>(), values);
      } else {
        store.add(pair_id, side, values);
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where() + "malformed record: " + e.what());
    } catch (const DataError& e) {
      const std::string message = e.what();
      if (message.starts_with(std::string(source_name))) throw;
      throw DataError(where() + message);
    }
  }
  if (!have_header) throw DataError(std::string(source_name) + ": missing header record");
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  std::ifstream in = text_io::open_input(path);
  return parse_embeddings(in, path.string());
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingStore& store) {
  std::ofstream out = text_io::open_output(path);
  store.write(out);
  text_io::finish_output(out, path);
}

double pair_cosine(const EmbeddingStore& store, const std::string& pair_id) {
  const std::vector<double>* a = store.sentence(pair_id, Side::kA);
  const std::vector<double>* b = store.sentence(pair_id, Side::kB);
  if (a == nullptr || b == nullptr) {
    throw DataError("embedding store '" + store.model() + "' has no side " + (a == nullptr ? "A" : "B") +
                    " vector for pair '" + pair_id + "'");
  }
  return cosine(*a, *b);
}

}  // namespace semrel
