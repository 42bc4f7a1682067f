#pragma once

// Synthetic corpus for end-to-end runs: sentence pairs with a latent
// relatedness r, three sentence-embedding sidecars (mpnet, jina, t5) whose
// pair cosines track r with independent noise, a word-vector table (glove),
// and gold scores built as a monotone blend of the six supervised-eng
// features plus Gaussian noise.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace semrel::testkit {

struct SyntheticFiles {
  std::filesystem::path train;  // native TSV with gold
  std::filesystem::path test;   // native TSV with gold
  std::filesystem::path all;    // both splits
  std::map<std::string, std::filesystem::path> embeddings;  // mpnet, jina, t5
  std::filesystem::path glove;
};

struct SyntheticOptions {
  std::size_t pairs = 200;
  std::size_t train_pairs = 150;
  double gold_noise = 0.02;
  std::uint64_t seed = 7;
};

SyntheticFiles write_synthetic_corpus(const std::filesystem::path& dir, const SyntheticOptions& options = {});

struct PipelineResult {
  int exit_code = 0;
  std::string stage;  // failing stage when exit_code != 0
  std::string error;
  double ensemble_spearman = 0.0;
  std::map<std::string, double> feature_spearman;
  std::filesystem::path model;
  std::filesystem::path predictions;
  std::filesystem::path report;
};

// train (supervised-eng, grid search) → predict → features → eval, all via
// the CLI entry point, on the held-out split.
PipelineResult run_supervised_pipeline(const SyntheticFiles& files, const std::filesystem::path& out_dir,
                                       std::uint64_t seed = 20240101);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace semrel::testkit
