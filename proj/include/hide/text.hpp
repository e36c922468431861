#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hide {

// A tokenized text: ordered, lowercased tokens with no empty entries.
using TokenSequence = std::vector<std::string>;

// Shared normalizer used by every metric, the discriminator, and the
// feature-hash encoder. Splits UTF-8 text on whitespace and punctuation:
//   - ASCII: anything that is not a letter or digit separates tokens;
//     letters are lowercased.
//   - Non-ASCII code points are word characters, except a fixed separator
//     set (NBSP, curly quotes, en/em dash, ellipsis, Devanagari danda,
//     ideographic full stop) listed in text.cpp.
TokenSequence tokenize(std::string_view text);

// tokenize() followed by removal of the fixed English stopword list
// (see kStopwords in text.cpp). Used for hint keyword extraction.
TokenSequence content_words(std::string_view text);

bool is_stopword(std::string_view token);

// FNV-1a 64-bit over the bytes of `data`, starting from `basis`.
inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t basis = kFnvOffsetBasis) {
    std::uint64_t h = basis;
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Strips ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

}  // namespace hide
