#include "semrel/unicode.hpp"

#include <unicode/brkiter.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <memory>

#include "semrel/error.hpp"

namespace semrel::unicode {

namespace {

icu::UnicodeString from_utf8(std::string_view text) {
  if (!is_valid_utf8(text)) throw DataError("invalid UTF-8 input");
  return icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
}

const icu::Normalizer2& nfc_normalizer() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || normalizer == nullptr) {
    throw ConfigError(std::string("ICU NFC normalizer unavailable: ") + u_errorName(status));
  }
  return *normalizer;
}

icu::UnicodeString nfc_ustring(std::string_view text) {
  icu::UnicodeString source = from_utf8(text);
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString result = nfc_normalizer().normalize(source, status);
  if (U_FAILURE(status)) throw DataError(std::string("NFC normalization failed: ") + u_errorName(status));
  return result;
}

std::u32string scalars_of(const icu::UnicodeString& text) {
  std::u32string out;
  out.reserve(static_cast<std::size_t>(text.length()));
  for (int32_t i = 0; i < text.length();) {
    const UChar32 c = text.char32At(i);
    out.push_back(static_cast<char32_t>(c));
    i += U16_LENGTH(c);
  }
  return out;
}

}  // namespace

bool is_valid_utf8(std::string_view text) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

std::string nfc(std::string_view text) {
  std::string out;
  nfc_ustring(text).toUTF8String(out);
  return out;
}

std::u32string nfc_scalars(std::string_view text) { return scalars_of(nfc_ustring(text)); }

std::u32string fold_case(std::u32string_view scalars) {
  std::u32string out;
  out.reserve(scalars.size());
  for (char32_t c : scalars) {
    out.push_back(static_cast<char32_t>(u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT)));
  }
  return out;
}

std::string normalize_token(std::string_view text) { return to_utf8(fold_case(nfc_scalars(text))); }

std::string to_utf8(std::u32string_view scalars) {
  std::string out;
  out.reserve(scalars.size());
  for (char32_t c : scalars) {
    uint8_t buffer[U8_MAX_LENGTH];
    int32_t length = 0;
    UBool error = false;
    U8_APPEND(buffer, length, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) throw DataError("cannot encode scalar value as UTF-8");
    out.append(reinterpret_cast<const char*>(buffer), static_cast<std::size_t>(length));
  }
  return out;
}

bool is_punctuation_or_space(std::string_view text) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) return false;
    if (u_ispunct(c) || u_isUWhiteSpace(c) || u_iscntrl(c)) continue;
    // Default-ignorable format characters (ZWJ, ZWNJ, BOM) do not make a word.
    if (u_charType(c) == U_FORMAT_CHAR) continue;
    return false;
  }
  return true;
}

std::vector<std::string> word_segments(std::string_view text) {
  const icu::UnicodeString source = nfc_ustring(text);
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> iter(
      icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status)) throw ConfigError(std::string("ICU word break iterator unavailable: ") + u_errorName(status));
  iter->setText(source);
  std::vector<std::string> out;
  int32_t start = iter->first();
  for (int32_t end = iter->next(); end != icu::BreakIterator::DONE; start = end, end = iter->next()) {
    std::string piece;
    source.tempSubStringBetween(start, end).toUTF8String(piece);
    out.push_back(std::move(piece));
  }
  return out;
}

std::string_view trim(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  // Unicode whitespace (e.g. U+00A0, U+3000) around the edges.
  while (!text.empty()) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    int32_t i = 0;
    UChar32 c;
    U8_NEXT(bytes, i, static_cast<int32_t>(text.size()), c);
    if (c < 0 || !u_isUWhiteSpace(c)) break;
    text.remove_prefix(static_cast<std::size_t>(i));
  }
  while (!text.empty()) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    auto i = static_cast<int32_t>(text.size());
    UChar32 c;
    U8_PREV(bytes, 0, i, c);
    if (c < 0 || !u_isUWhiteSpace(c)) break;
    text.remove_suffix(text.size() - static_cast<std::size_t>(i));
  }
  return text;
}

}  // namespace semrel::unicode
