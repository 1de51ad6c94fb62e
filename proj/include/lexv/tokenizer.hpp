#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lexv {

enum class TokenizerMode {
  Words,    // CJK ideographs become one token each
  Bigrams,  // CJK runs become overlapping character bigrams
};

/// Lowercased word tokens. ASCII and other letters/digits form words; CJK
/// ideographs are split per mode; everything else separates.
std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode = TokenizerMode::Words);

/// Decode UTF-8 into code points; invalid bytes map to U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view text);
std::string encode_utf8(char32_t cp);

}  // namespace lexv
