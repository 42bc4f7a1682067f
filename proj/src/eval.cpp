#include "semrel/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "semrel/error.hpp"
#include "text_io.hpp"

namespace semrel {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) hold ranks i+1..j; their average:
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("correlation: length mismatch");
  if (x.size() < 2) throw DataError("correlation: need at least 2 values");
  const auto n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw NumericalError("undefined correlation: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman: length mismatch");
  if (x.size() < 2) throw DataError("spearman: need at least 2 values");
  for (std::span<const double> values : {x, y}) {
    for (double v : values) {
      if (!std::isfinite(v)) throw DataError("spearman: non-finite value");
    }
  }
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

SystemScore score_system(const Dataset& dataset, const Predictions& predictions, const std::string& name) {
  std::unordered_map<std::string, double> lookup;
  for (const auto& [id, score] : predictions) lookup.emplace(id, score);
  std::vector<double> gold;
  std::vector<double> predicted;
  std::vector<std::string> missing;
  for (const SentencePair& pair : dataset) {
    if (!pair.gold_score) continue;
    const auto it = lookup.find(pair.pair_id);
    if (it == lookup.end()) {
      missing.push_back(pair.pair_id);
      continue;
    }
    gold.push_back(*pair.gold_score);
    predicted.push_back(it->second);
  }
  if (!missing.empty()) {
    std::string message = "system '" + name + "': " + std::to_string(missing.size()) + " pairs lack a prediction:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) message += " " + missing[i];
    if (missing.size() > 20) message += " ...";
    throw DataError(message);
  }
  if (gold.empty()) throw DataError("dataset has no gold scores to evaluate against");
  return {name, spearman(predicted, gold), gold.size()};
}

EvalReport evaluate(const Dataset& dataset, const Predictions& predictions, const std::string& system_name) {
  EvalReport report;
  report.dataset = dataset.language_tag() + (dataset.split_tag().empty() ? "" : "/" + dataset.split_tag());
  report.systems.push_back(score_system(dataset, predictions, system_name));
  report.n_pairs = report.systems.back().n;
  return report;
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["dataset"] = report.dataset;
  doc["n_pairs"] = report.n_pairs;
  doc["systems"] = nlohmann::ordered_json::array();
  for (const SystemScore& s : report.systems) {
    doc["systems"].push_back({{"name", s.name}, {"spearman", s.spearman}, {"n", s.n}});
  }
  doc["features"] = nlohmann::ordered_json::array();
  for (const FeatureScore& f : report.features) {
    doc["features"].push_back({{"name", f.name}, {"spearman", f.spearman}});
  }
  doc["warnings"] = report.warnings;
  out << doc.dump(2) << '\n';
}

namespace {

std::string fixed3(double value) {
  char buffer[32];
  const int n = std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return std::string(buffer, static_cast<std::size_t>(n));
}

}  // namespace

void write_report_text(std::ostream& out, const EvalReport& report) {
  std::size_t width = 8;
  for (const auto& s : report.systems) width = std::max(width, s.name.size());
  for (const auto& f : report.features) width = std::max(width, f.name.size());
  const auto row = [&](const std::string& name, double r) {
    out << "  " << name << std::string(width - name.size() + 2, ' ') << fixed3(r)
        << '\n';
  };
  out << "dataset: " << report.dataset << "  (n = " << report.n_pairs << ")\n";
  if (!report.systems.empty()) {
    out << "systems" << std::string(width - 3, ' ') << "Spearman r\n";
    for (const auto& s : report.systems) row(s.name, s.spearman);
  }
  if (!report.features.empty()) {
    out << "features" << std::string(width - 4, ' ') << "Spearman r\n";
    for (const auto& f : report.features) row(f.name, f.spearman);
  }
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
}

void write_predictions(std::ostream& out, const Predictions& predictions) {
  for (const auto& [id, score] : predictions) out << id << '\t' << text_io::format_shortest(score) << '\n';
}

void write_predictions(const std::filesystem::path& path, const Predictions& predictions) {
  std::ofstream out = text_io::open_output(path);
  write_predictions(out, predictions);
  text_io::finish_output(out, path);
}

Predictions read_predictions(std::istream& in, std::string_view source_name) {
  Predictions out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no) + ": ";
    const auto cols = text_io::split(line, '\t');
    if (cols.size() != 2) throw DataError(where + "expected pair_id\\tscore");
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), score);
    if (ec != std::errc() || ptr != cols[1].data() + cols[1].size() || !std::isfinite(score)) {
      // A header row is tolerated on the first line.
      if (line_no == 1) continue;
      throw DataError(where + "unparseable score '" + std::string(cols[1]) + "'");
    }
    if (!seen.emplace(cols[0]).second) throw DataError(where + "duplicate pair_id '" + std::string(cols[0]) + "'");
    out.emplace_back(std::string(cols[0]), score);
  }
  return out;
}

Predictions load_predictions(const std::filesystem::path& path) {
  std::ifstream in = text_io::open_input(path);
  return read_predictions(in, path.string());
}

}  // namespace semrel
