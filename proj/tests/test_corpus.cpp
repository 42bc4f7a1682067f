#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <sstream>

#include "semrel/corpus.hpp"
#include "semrel/error.hpp"
#include "semrel/unicode.hpp"
#include "synthetic.hpp"

namespace {

using namespace semrel;

Dataset parse_tsv(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in, DatasetFormat::kNativeTsv, "mem.tsv");
}

Dataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in, DatasetFormat::kSemevalCsv, "mem.csv");
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(NativeTsv, ThreeAndFourColumns) {
  const Dataset d = parse_tsv("p1\tA cat.\tA dog.\t0.5\np2\tx\ty\n\np3\tu\tv\t\n");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].text_a, "A cat.");
  EXPECT_EQ(*d[0].gold_score, 0.5);
  EXPECT_FALSE(d[1].gold_score.has_value());
  EXPECT_FALSE(d[2].gold_score.has_value());
  EXPECT_FALSE(d.all_gold());
  EXPECT_EQ(d.find("p2")->text_b, "y");
  EXPECT_EQ(d.find("nope"), nullptr);
}

TEST(NativeTsv, CrlfTolerated) {
  const Dataset d = parse_tsv("p1\ta\tb\t1\r\n");
  EXPECT_EQ(d[0].text_b, "b");
  EXPECT_EQ(*d[0].gold_score, 1.0);
}

TEST(NativeTsv, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of([] { parse_tsv("p1\ta\tb\n\np1\tc\td\n"); }).find("mem.tsv:3:"), std::string::npos);
  EXPECT_NE(error_of([] { parse_tsv("p1\ta\n"); }).find("mem.tsv:1: expected 3 or 4"), std::string::npos);
  EXPECT_NE(error_of([] { parse_tsv("p1\ta\tb\t1.5\n"); }).find("outside [0,1]"), std::string::npos);
  EXPECT_NE(error_of([] { parse_tsv("p1\ta\tb\tabc\n"); }).find("unparseable score"), std::string::npos);
  EXPECT_NE(error_of([] { parse_tsv("p1\t  \tb\n"); }).find("empty sentence"), std::string::npos);
  EXPECT_NE(error_of([] { parse_tsv("\ta\tb\n"); }).find("empty pair_id"), std::string::npos);
  EXPECT_THROW(parse_tsv("p1\t\xFF\tb\n"), DataError);
}

TEST(SemevalCsv, SplitsOnLiteralBackslashN) {
  const Dataset d = parse_csv(
      "PairID,Text,Score\n"
      "eng-1,\"a cat.\\ncats.\",0.75\n"
      "eng-2,\"He said \"\"hi\"\", ok\\nhello\",0\n"
      "eng-3,one\\ntwo,1\n");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].text_a, "a cat.");
  EXPECT_EQ(d[0].text_b, "cats.");
  EXPECT_EQ(*d[0].gold_score, 0.75);
  EXPECT_EQ(d[1].text_a, "He said \"hi\", ok");
  EXPECT_EQ(d[2].text_b, "two");
}

TEST(SemevalCsv, ScoreColumnOptionalAndReordered) {
  const Dataset d = parse_csv("\xEF\xBB\xBFText,PairID\n\"x\\ny\",t1\n");
  EXPECT_EQ(d[0].pair_id, "t1");
  EXPECT_FALSE(d[0].gold_score);
}

TEST(SemevalCsv, RejectsMissingOrRepeatedSeparator) {
  EXPECT_THROW(parse_csv("PairID,Text\np,\"no separator\"\n"), DataError);
  EXPECT_THROW(parse_csv("PairID,Text\np,\"a\\nb\\nc\"\n"), DataError);
  EXPECT_THROW(parse_csv("ID,Sentence\np,a\\nb\n"), DataError);
  EXPECT_THROW(parse_csv("PairID,Text\np,\"unterminated\n"), DataError);
}

TEST(Dataset, ConstructorValidates) {
  EXPECT_THROW(Dataset({{"a", "x", "y", 2.0}}, "eng", ""), DataError);
  EXPECT_THROW(Dataset({{"a", "x", "y", {}}, {"a", "z", "w", {}}}, "eng", ""), DataError);
  EXPECT_NO_THROW(Dataset({{"a", "x", "y", 0.0}}, "eng", ""));
}

TEST(Dataset, FormatNames) {
  EXPECT_EQ(parse_dataset_format("native_tsv"), DatasetFormat::kNativeTsv);
  EXPECT_EQ(parse_dataset_format("semeval_csv"), DatasetFormat::kSemevalCsv);
  EXPECT_THROW(parse_dataset_format("xml"), ConfigError);
}

TEST(Dataset, MissingFileIsConfigError) {
  EXPECT_THROW(load_dataset("/nonexistent/x.tsv", DatasetFormat::kNativeTsv), ConfigError);
}

// Random text over a mixed alphabet without tabs or newlines.
std::string random_text(std::mt19937_64& rng) {
  static const std::u32string alphabet = U"abc XYZ éü ßαΩжक中,.'\"!?\\";
  std::uniform_int_distribution<std::size_t> len(1, 30);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::u32string s;
  while (unicode::trim(unicode::to_utf8(s)).empty()) {
    s.assign(len(rng), U' ');
    for (char32_t& c : s) c = alphabet[pick(rng)];
  }
  return unicode::to_utf8(s);
}

TEST(NativeTsvProperty, WriteParseRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SentencePair> pairs;
    const int n = 1 + trial % 9;
    for (int i = 0; i < n; ++i) {
      std::optional<double> score;
      if (u(rng) < 0.7) score = u(rng);
      pairs.push_back({"id" + std::to_string(trial) + "_" + std::to_string(i), random_text(rng), random_text(rng), score});
    }
    const Dataset original(pairs, "eng", "");
    std::ostringstream out;
    write_dataset(out, original);
    EXPECT_EQ(parse_tsv(out.str()), original);
  }
}

TEST(NativeTsv, WriteRejectsTabs) {
  const Dataset d({{"p", "a\tb", "c", {}}}, "eng", "");
  std::ostringstream out;
  EXPECT_THROW(write_dataset(out, d), DataError);
}

AnnotationMap parse_ann(const std::string& text) {
  std::istringstream in(text);
  return parse_annotations(in, "ann.tsv");
}

TEST(Annotations, ParsesAndSortsByIndex) {
  const auto map = parse_ann(
      "p1\tA\t1\tcat\tNOUN\t-1\n"
      "p1\tA\t0\tthe\tDET\t1\n"
      "p1\tB\t0\tdogs\tNOUN\t-1\n");
  const auto& a = map.at({"p1", Side::kA});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].surface, "the");
  EXPECT_EQ(dependency_depths(a), (std::vector<int>{1, 0}));
}

TEST(Annotations, RejectsMalformedTrees) {
  EXPECT_NE(error_of([] { parse_ann("p\tA\t0\ta\tX\t1\np\tA\t1\tb\tX\t0\n"); }).find("no root"), std::string::npos);
  EXPECT_NE(error_of([] { parse_ann("p\tA\t0\ta\tX\t-1\np\tA\t1\tb\tX\t-1\n"); }).find("multiple roots"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_ann("p\tA\t0\ta\tX\t-1\np\tA\t2\tb\tX\t0\n"); }).find("gap"), std::string::npos);
  EXPECT_NE(error_of([] { parse_ann("p\tA\t0\ta\tX\t-1\np\tA\t1\tb\tX\t7\n"); }).find("invalid head"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              parse_ann("p\tA\t0\ta\tX\t-1\np\tA\t1\tb\tX\t2\np\tA\t2\tc\tX\t1\n");
            }).find("cycle"),
            std::string::npos);
  EXPECT_THROW(parse_ann("p\tC\t0\ta\tX\t-1\n"), DataError);
  EXPECT_THROW(parse_ann("p\tA\tzero\ta\tX\t-1\n"), DataError);
  EXPECT_THROW(parse_ann("p\tA\t0\ta\tX\n"), DataError);
}

TEST(Annotations, DepthsOfDeeperTree) {
  std::vector<TokenAnnotation> t;
  const std::vector<int> heads{2, 2, -1, 4, 2};
  for (int i = 0; i < 5; ++i) t.push_back({"p", Side::kA, i, "w", "X", heads[static_cast<std::size_t>(i)]});
  EXPECT_EQ(dependency_depths(t), (std::vector<int>{1, 1, 0, 2, 1}));
}

}  // namespace
