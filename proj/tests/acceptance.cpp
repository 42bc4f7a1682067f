// Acceptance checks. One PASS/FAIL/SKIP line per criterion; exit status is
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "semrel/corpus.hpp"
#include "semrel/error.hpp"
#include "semrel/eval.hpp"
#include "semrel/pca.hpp"
#include "semrel/svr.hpp"
#include "semrel/textstats.hpp"
#include "semrel/unicode.hpp"
#include "synthetic.hpp"

namespace {

using namespace semrel;
using Clock = std::chrono::steady_clock;

struct Outcome {
  enum class Status { kPass, kFail, kSkip } status;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::kFail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::Status::kSkip, std::move(d)}; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Latin, Greek, Cyrillic, Devanagari, Han, Hangul and emoji scalars, all NFC-stable.
const std::u32string kMixedAlphabet = U"abcxyzAZ éßαβΩдЖяकखग中文가\U0001F600";

std::u32string random_string(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, kMixedAlphabet.size() - 1);
  std::u32string s(len(rng), U' ');
  for (char32_t& c : s) c = kMixedAlphabet[pick(rng)];
  return s;
}

Outcome edit_distance_oracle() {
  std::mt19937_64 rng(101);
  const auto t0 = Clock::now();
  std::size_t mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    const std::u32string a = random_string(rng, 12);
    const std::u32string b = random_string(rng, 12);
    const std::size_t got = levenshtein(unicode::to_utf8(a), unicode::to_utf8(b));
    if (got != oracle::levenshtein_memo(a, b)) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  const std::string detail = "500 mixed-script pairs, " + std::to_string(mismatches) + " mismatches, " +
                             fmt("%.3f s", elapsed);
  return mismatches == 0 && elapsed < 5.0 ? pass(detail) : fail(detail);
}

Outcome ratio_correctness() {
  const double kitten = char_distance_ratio("kitten", "sitting");
  const double overlap = word_overlap_ratio(tokenize("the cat sat"), tokenize("the cat ran"));
  if (kitten != 10.0 / 13.0) return fail("kitten/sitting gave " + fmt("%.17g", kitten));
  if (overlap != 0.5) return fail("{the,cat,sat}/{the,cat,ran} gave " + fmt("%.17g", overlap));

  std::mt19937_64 rng(202);
  static const std::vector<std::string> words{"the", "a", "of", "cat", "dog", "Hund", "gato", "el", "der", "und",
                                              "किताब", "का", "猫", "кот", "и", "running", "ran", "is", "on", "mat"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> len(1, 8);
  const ContentFilter filter = ContentFilter::builtin("eng");
  std::size_t out_of_range = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string a;
    std::string b;
    for (int k = len(rng); k > 0; --k) a += words[pick(rng)] + (k > 1 ? " " : ".");
    for (int k = len(rng); k > 0; --k) b += words[pick(rng)] + (k > 1 ? " " : "!");
    const TokenSet ta = tokenize(a);
    const TokenSet tb = tokenize(b);
    for (double r : {char_distance_ratio(a, b), word_overlap_ratio(ta, tb), content_overlap_ratio(ta, tb, filter).value}) {
      if (!(r >= 0.0 && r <= 1.0)) ++out_of_range;
    }
  }
  const std::string detail = "fixtures exact (10/13, 0.5); 10000 random pairs, " + std::to_string(out_of_range) +
                             " ratios outside [0,1]";
  return out_of_range == 0 ? pass(detail) : fail(detail);
}

Outcome spearman_correctness() {
  const double fixture = spearman(std::vector<double>{1, 3, 2, 5, 4}, std::vector<double>{1, 2, 3, 4, 5});
  if (fixture != 0.8) return fail("[1,3,2,5,4] gave " + fmt("%.17g", fixture));
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> len(3, 60);
  std::uniform_int_distribution<int> small(0, 6);
  std::uniform_real_distribution<double> real(-1, 1);
  double worst = 0;
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = len(rng);
    const bool tied = i % 2 == 0;
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = tied ? small(rng) : real(rng);
      y[k] = (i % 4 < 2) ? small(rng) : real(rng);
    }
    const double expected = oracle::spearman_bruteforce(x, y);
    if (!std::isfinite(expected)) {
      // constant input: the library must refuse
      try {
        spearman(x, y);
        return fail("constant input accepted");
      } catch (const NumericalError&) {
      }
      continue;
    }
    worst = std::max(worst, std::abs(spearman(x, y) - expected));
    ++compared;
  }
  const std::string detail = "fixture 0.8 exact; " + std::to_string(compared) + " random cases, max |diff| " +
                             fmt("%.3g", worst);
  return worst <= 1e-12 ? pass(detail) : fail(detail);
}

Outcome pca_properties() {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> normal(0, 1);
  const std::size_t n = 50;
  const std::size_t d = 16;
  std::vector<std::vector<double>> data(n, std::vector<double>(d));
  for (auto& row : data)
    for (std::size_t j = 0; j < d; ++j) row[j] = normal(rng) * (1.0 + static_cast<double>(j)) + 0.5 * j;
  const PcaModel model = fit_pca(data);

  double ortho = 0;
  for (std::size_t a = 0; a < model.rank(); ++a) {
    for (std::size_t b = 0; b < model.rank(); ++b) {
      double dot = 0;
      for (std::size_t j = 0; j < d; ++j) dot += model.component(a)[j] * model.component(b)[j];
      ortho = std::max(ortho, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  bool non_increasing = true;
  for (std::size_t k = 1; k < model.rank(); ++k) {
    non_increasing &= model.explained_variance()[k] <= model.explained_variance()[k - 1];
  }
  double recon = 0;
  std::vector<double> means(model.rank(), 0.0);
  for (const auto& row : data) {
    const std::vector<double> t = model.transform(row);
    const std::vector<double> back = model.inverse_transform(t);
    for (std::size_t j = 0; j < d; ++j) recon = std::max(recon, std::abs(back[j] - row[j]));
    for (std::size_t k = 0; k < t.size(); ++k) means[k] += t[k] / static_cast<double>(n);
  }
  double mean_dev = 0;
  for (double m : means) mean_dev = std::max(mean_dev, std::abs(m));

  const std::string detail = "rank " + std::to_string(model.rank()) + ", orthonormality " + fmt("%.2g", ortho) +
                             ", reconstruction " + fmt("%.2g", recon) + ", column means " + fmt("%.2g", mean_dev) +
                             (non_increasing ? ", variance non-increasing" : ", variance NOT monotone");
  const bool ok = model.rank() == d && ortho <= 1e-8 && non_increasing && recon <= 1e-8 && mean_dev <= 1e-8;
  return ok ? pass(detail) : fail(detail);
}

Outcome svr_correctness() {
  // tiny instances against the projected-gradient oracle
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0, 1);
  double worst_gap = 0;
  double worst_box = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 3);
    const std::size_t m = 1 + static_cast<std::size_t>(trial % 2);
    std::vector<std::vector<double>> rows(n, std::vector<double>(m));
    FeatureMatrix x;
    x.cols = m;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (double& v : rows[i]) v = u(rng);
      x.push_row(rows[i]);
      y[i] = u(rng);
    }
    SvrParams params;
    params.c = trial % 2 == 0 ? 1.0 : 5.0;
    params.epsilon = trial % 4 < 2 ? 0.1 : 0.02;
    const SvrFit fit = fit_svr_detailed(x, y, params);
    const std::vector<double> kernel = oracle::rbf_gram_zscored(rows);
    const auto reference = oracle::svr_dual_projected_gradient(kernel, y, params.c, params.epsilon);
    const double ours = oracle::svr_dual_objective(kernel, y, params.epsilon, fit.coefficients);
    worst_gap = std::max(worst_gap, std::abs(ours - reference.objective));
    for (double b : fit.coefficients) worst_box = std::max(worst_box, std::abs(b) - params.c);
  }

  FeatureMatrix line;
  line.cols = 1;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    const double v = i / 19.0;
    line.push_row(std::vector<double>{v});
    y.push_back(v);
  }
  SvrParams params;
  params.c = 10.0;
  params.epsilon = 0.01;
  const SvrFit fit = fit_svr_detailed(line, y, params);
  double sse = 0;
  for (int i = 0; i < 20; ++i) {
    const double e = fit.model.predict(line.row(static_cast<std::size_t>(i))) - y[static_cast<std::size_t>(i)];
    sse += e * e;
  }
  const double rmse = std::sqrt(sse / 20);
  for (double b : fit.coefficients) worst_box = std::max(worst_box, std::abs(b) - params.c);

  const std::string detail = "20 tiny instances, max dual objective gap " + fmt("%.2g", worst_gap) +
                             "; y=x (n=20, C=10, epsilon=0.01) RMSE " + fmt("%.4f", rmse) +
                             "; max box excess " + fmt("%.2g", std::max(0.0, worst_box));
  return worst_gap <= 1e-4 && rmse <= 0.02 && worst_box <= 1e-9 ? pass(detail) : fail(detail);
}

Outcome end_to_end() {
  testkit::TempDir dir("acceptance-e2e");
  const auto t0 = Clock::now();
  const auto files = testkit::write_synthetic_corpus(dir / "corpus");
  const auto result = testkit::run_supervised_pipeline(files, dir / "run");
  const double elapsed = seconds_since(t0);
  if (result.exit_code != 0) {
    return fail("stage " + result.stage + " exited " + std::to_string(result.exit_code) + ": " + result.error);
  }
  std::string best_name;
  double best = -1;
  for (const auto& [name, r] : result.feature_spearman) {
    if (r > best) {
      best = r;
      best_name = name;
    }
  }
  const std::string detail = "held-out Spearman " + fmt("%.4f", result.ensemble_spearman) + ", best single feature " +
                             best_name + " " + fmt("%.4f", best) + ", " + fmt("%.1f s", elapsed);
  const bool ok = result.ensemble_spearman >= 0.95 && result.ensemble_spearman > best &&
                  result.feature_spearman.size() == 6 && elapsed < 60.0;
  return ok ? pass(detail) : fail(detail);
}

Outcome determinism() {
  testkit::TempDir dir("acceptance-det");
  const auto files = testkit::write_synthetic_corpus(dir / "corpus");
  const auto first = testkit::run_supervised_pipeline(files, dir / "run1", 99);
  const auto second = testkit::run_supervised_pipeline(files, dir / "run2", 99);
  if (first.exit_code != 0 || second.exit_code != 0) return fail("pipeline failed: " + first.error + second.error);
  const bool model_same = testkit::read_file(first.model) == testkit::read_file(second.model);
  const bool predictions_same = testkit::read_file(first.predictions) == testkit::read_file(second.predictions);
  const std::string detail = std::string("model bundle ") + (model_same ? "identical" : "DIFFERS") +
                             ", predictions " + (predictions_same ? "identical" : "DIFFER");
  return model_same && predictions_same ? pass(detail) : fail(detail);
}

Outcome semeval_scale() {
  const char* path = std::getenv("SEMREL_SEMEVAL_ENG");
  if (path == nullptr || *path == '\0') {
    return skip("set SEMREL_SEMEVAL_ENG to the SemEval-2024 English CSV to run");
  }
  const Dataset dataset = load_dataset(path, DatasetFormat::kSemevalCsv, "eng");
  const ContentFilter filter = ContentFilter::builtin("eng");
  std::vector<double> gold;
  std::vector<double> chr;
  std::vector<double> word;
  std::vector<double> content;
  for (const SentencePair& pair : dataset) {
    if (!pair.gold_score) continue;
    const StatFeatures f = stat_features(pair, filter);
    gold.push_back(*pair.gold_score);
    chr.push_back(f.char_distance_ratio);
    word.push_back(f.word_overlap_ratio);
    content.push_back(f.content_overlap_ratio);
  }
  const double r_char = spearman(chr, gold);
  const double r_word = spearman(word, gold);
  const double r_content = spearman(content, gold);
  const std::string detail = "char " + fmt("%.3f", r_char) + " (0.513), word " + fmt("%.3f", r_word) +
                             " (0.593), content " + fmt("%.3f", r_content) + " (0.604)";
  const bool ok = std::abs(r_char - 0.513) <= 0.03 && std::abs(r_word - 0.593) <= 0.03 &&
                  std::abs(r_content - 0.604) <= 0.03;
  return ok ? pass(detail) : fail(detail);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"edit-distance oracle", edit_distance_oracle},
      {"ratio correctness", ratio_correctness},
      {"spearman correctness", spearman_correctness},
      {"pca properties", pca_properties},
      {"svr correctness", svr_correctness},
      {"end-to-end synthetic reproduction", end_to_end},
      {"determinism", determinism},
      {"SemEval English stat features (optional)", semeval_scale},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    const char* tag = outcome.status == Outcome::Status::kPass   ? "PASS"
                      : outcome.status == Outcome::Status::kSkip ? "SKIP"
                                                                 : "FAIL";
    if (outcome.status == Outcome::Status::kFail) ++failures;
    std::printf("[%s] %s: %s\n", tag, name.c_str(), outcome.detail.c_str());
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
