#pragma once

// Thin UTF-8 / Unicode helpers backed by ICU.

#include <string>
#include <string_view>
#include <vector>

namespace semrel::unicode {

bool is_valid_utf8(std::string_view text);

// NFC-normalized text. Throws DataError on invalid UTF-8.
std::string nfc(std::string_view text);

// Unicode scalar values of the NFC form of `text`.
std::u32string nfc_scalars(std::string_view text);

// Simple (1:1) case folding applied per scalar value.
std::u32string fold_case(std::u32string_view scalars);

// NFC followed by simple case folding, returned as UTF-8.
std::string normalize_token(std::string_view text);

std::string to_utf8(std::u32string_view scalars);

// True when every scalar is whitespace, punctuation, or a control character.
bool is_punctuation_or_space(std::string_view text);

// UAX #29 word segments of `text` (including whitespace/punctuation segments).
std::vector<std::string> word_segments(std::string_view text);

// Trim ASCII and Unicode whitespace from both ends.
std::string_view trim(std::string_view text);

}  // namespace semrel::unicode
