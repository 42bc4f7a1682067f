#pragma once

// Precomputed sentence (or token) embeddings from external encoders, read
// from a JSONL sidecar:
//
//   {"type":"header","model":"mpnet","dim":768,"granularity":"sentence"}
//   {"pair_id":"p1","side":"A","vector":[...]}
//   {"pair_id":"p1","side":"A","token_index":0,"vector":[...]}   (token granularity)
//
// Values are held at float32 precision and written with 9 significant digits,
// which round-trips float32 exactly.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semrel/corpus.hpp"

namespace semrel {

enum class Granularity { kSentence, kToken };

std::string_view granularity_name(Granularity granularity);

class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::string model, std::size_t dim, Granularity granularity);

  // DataError on length mismatch, non-finite values, duplicates or a
  // granularity mismatch.
  void add(const std::string& pair_id, Side side, std::span<const double> vector);
  void add_token(const std::string& pair_id, Side side, int token_index, std::span<const double> vector);

  const std::string& model() const { return model_; }
  std::size_t dim() const { return dim_; }
  Granularity granularity() const { return granularity_; }
  std::size_t record_count() const { return record_count_; }

  // Sentence granularity: the side's vector, or nullptr.
  const std::vector<double>* sentence(const std::string& pair_id, Side side) const;
  // Token granularity: token vectors ordered by token_index, or nullptr.
  const std::vector<std::vector<double>>* tokens(const std::string& pair_id, Side side) const;

  // (pair_id, side) combinations of `dataset` the store cannot serve.
  std::vector<AnnotationKey> missing(const Dataset& dataset) const;

  // Writes records in insertion order.
  void write(std::ostream& out) const;

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&);

 private:
  struct Entry {
    std::vector<std::vector<double>> vectors;  // one for sentence granularity
  };

  std::string model_;
  std::size_t dim_ = 0;
  Granularity granularity_ = Granularity::kSentence;
  std::size_t record_count_ = 0;
  std::map<AnnotationKey, Entry> entries_;
  std::vector<AnnotationKey> order_;
};

EmbeddingStore parse_embeddings(std::istream& in, std::string_view source_name);
EmbeddingStore load_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingStore& store);

// Cosine of the side-A and side-B sentence vectors. DataError naming the
// pair and side when one is missing.
double pair_cosine(const EmbeddingStore& store, const std::string& pair_id);

}  // namespace semrel
