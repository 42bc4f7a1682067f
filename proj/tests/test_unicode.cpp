#include <gtest/gtest.h>

#include "semrel/error.hpp"
#include "semrel/textstats.hpp"
#include "semrel/unicode.hpp"

namespace {

using semrel::unicode::fold_case;
using semrel::unicode::nfc;
using semrel::unicode::nfc_scalars;
using semrel::unicode::normalize_token;

TEST(Unicode, NfcComposesCombiningSequences) {
  EXPECT_EQ(nfc("e\xCC\x81"), "\xC3\xA9");  // e + U+0301 → é
  EXPECT_EQ(nfc_scalars("e\xCC\x81").size(), 1u);
  EXPECT_EQ(nfc("plain"), "plain");
}

TEST(Unicode, SimpleFoldingIsOneToOne) {
  EXPECT_EQ(normalize_token("HeLLo"), "hello");
  EXPECT_EQ(normalize_token("ΣΟΦΙΑ"), "σοφια");
  // simple folding leaves ß alone (full folding would give "ss")
  EXPECT_EQ(normalize_token("Straße"), "straße");
  const std::u32string s = U"ÀÉÎ";
  EXPECT_EQ(fold_case(s).size(), s.size());
}

TEST(Unicode, RejectsInvalidUtf8) {
  EXPECT_FALSE(semrel::unicode::is_valid_utf8("\xC3\x28"));
  EXPECT_TRUE(semrel::unicode::is_valid_utf8("κόσμε"));
  EXPECT_THROW(nfc("\xFF"), semrel::DataError);
}

TEST(Unicode, Trim) {
  EXPECT_EQ(semrel::unicode::trim("  a b \t\n"), "a b");
  EXPECT_EQ(semrel::unicode::trim("\xE3\x80\x80x\xE3\x80\x80"), "x");  // ideographic space
  EXPECT_EQ(semrel::unicode::trim("   "), "");
}

TEST(Tokenize, KeepsContractionsAndDropsPunctuation) {
  const auto t = semrel::tokenize("Don't stop, STOP!");
  EXPECT_EQ(t.tokens(), (std::vector<std::string>{"don't", "stop", "stop"}));
  EXPECT_EQ(t.types().size(), 2u);
}

TEST(Tokenize, SplitsHanPerIcuDictionary) {
  const auto t = semrel::tokenize("猫 sat 。");
  ASSERT_FALSE(t.empty());
  EXPECT_EQ(t.tokens().front(), "猫");
  EXPECT_EQ(t.tokens().back(), "sat");
}

TEST(Tokenize, DevanagariWordsStayWhole) {
  const auto t = semrel::tokenize("मैं किताब पढ़ता हूँ।");
  EXPECT_EQ(t.size(), 4u);
  EXPECT_EQ(t.tokens()[1], "किताब");
}

TEST(Tokenize, NumbersAreTokens) {
  EXPECT_EQ(semrel::tokenize("3.14 is pi").tokens(), (std::vector<std::string>{"3.14", "is", "pi"}));
}

TEST(Tokenize, PunctuationOnlyIsEmpty) {
  EXPECT_TRUE(semrel::tokenize("... !? --").empty());
}

}  // namespace
