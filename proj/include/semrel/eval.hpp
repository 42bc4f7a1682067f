#pragma once

// Rank correlation and evaluation reports.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semrel/corpus.hpp"

namespace semrel {

// Fractional (1-based) ranks; tied values share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of average ranks. DataError for mismatched or short
// input, NumericalError("undefined correlation") when either list is constant.
double spearman(std::span<const double> x, std::span<const double> y);

struct SystemScore {
  std::string name;
  double spearman = 0.0;
  std::size_t n = 0;
};

struct FeatureScore {
  std::string name;
  double spearman = 0.0;
};

struct EvalReport {
  std::string dataset;
  std::size_t n_pairs = 0;
  std::vector<SystemScore> systems;
  std::vector<FeatureScore> features;
  std::vector<std::string> warnings;
};

using Predictions = std::vector<std::pair<std::string, double>>;

// Spearman of predictions against gold over every gold-scored pair.
// DataError listing pair_ids without a prediction.
SystemScore score_system(const Dataset& dataset, const Predictions& predictions, const std::string& name);

EvalReport evaluate(const Dataset& dataset, const Predictions& predictions, const std::string& system_name = "system");

void write_report_json(std::ostream& out, const EvalReport& report);
void write_report_text(std::ostream& out, const EvalReport& report);

// Predictions TSV: pair_id \t score, one row per pair.
void write_predictions(std::ostream& out, const Predictions& predictions);
void write_predictions(const std::filesystem::path& path, const Predictions& predictions);
Predictions read_predictions(std::istream& in, std::string_view source_name);
Predictions load_predictions(const std::filesystem::path& path);

}  // namespace semrel
