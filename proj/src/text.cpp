#include "hide/text.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace hide {

namespace {

// Non-ASCII code points treated as separators. Everything else above
// U+007F is a word character, so Devanagari, Bengali, and Thai text
// stays intact.
bool is_unicode_separator(char32_t cp) {
    switch (cp) {
        case 0x00A0:  // no-break space
        case 0x2013:  // en dash
        case 0x2014:  // em dash
        case 0x2018:  // left single quote
        case 0x2019:  // right single quote
        case 0x201C:  // left double quote
        case 0x201D:  // right double quote
        case 0x2026:  // ellipsis
        case 0x0964:  // Devanagari danda
        case 0x0965:  // Devanagari double danda
        case 0x3002:  // ideographic full stop
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200B;  // typographic spaces
    }
}

// Decodes one UTF-8 code point starting at s[i]; advances i past it.
// Malformed bytes are consumed one at a time and returned verbatim.
char32_t next_code_point(std::string_view s, std::size_t& i, std::size_t& len) {
    unsigned char c = s[i];
    std::size_t n = 1;
    char32_t cp = c;
    if (c >= 0xF0)
        n = 4, cp = c & 0x07;
    else if (c >= 0xE0)
        n = 3, cp = c & 0x0F;
    else if (c >= 0xC0)
        n = 2, cp = c & 0x1F;
    if (i + n > s.size()) n = 1, cp = c;
    for (std::size_t k = 1; k < n; ++k) {
        unsigned char cont = s[i + k];
        if ((cont & 0xC0) != 0x80) {
            n = 1;
            cp = c;
            break;
        }
        cp = (cp << 6) | (cont & 0x3F);
    }
    len = n;
    i += n;
    return cp;
}

const std::unordered_set<std::string_view>& stopwords() {
    static const std::unordered_set<std::string_view> kStopwords = {
        "a",     "an",    "the",   "and",   "or",    "but",   "if",
        "then",  "than",  "so",    "such",  "as",    "of",    "to",
        "in",    "on",    "at",    "by",    "for",   "with",  "from",
        "into",  "over",  "under", "about", "while", "during", "without",
        "within", "against", "between", "is",  "are",   "was",   "were",
        "be",    "been",  "being", "am",    "do",    "does",  "did",
        "have",  "has",   "had",   "will",  "would", "can",   "could",
        "shall", "should", "may",  "might", "must",  "not",   "no",
        "nor",   "this",  "that",  "these", "those", "it",    "its",
        "he",    "she",   "they",  "them",  "his",   "her",   "their",
        "i",     "we",    "you",   "your",  "our",   "us",    "me",
        "my",    "who",   "whom",  "which", "what",  "when",  "where",
        "why",   "how",   "there", "here",  "also",  "just",  "only",
        "very",  "too",   "some",  "any",   "someone", "something",
        "anything", "nothing", "one", "ones",
    };
    return kStopwords;
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
    TokenSequence tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t start = i, len = 0;
        char32_t cp = next_code_point(text, i, len);
        bool separator;
        if (cp < 0x80) {
            unsigned char c = static_cast<unsigned char>(cp);
            if (std::isalpha(c)) {
                current.push_back(static_cast<char>(std::tolower(c)));
                continue;
            }
            if (std::isdigit(c)) {
                current.push_back(static_cast<char>(c));
                continue;
            }
            separator = true;
        } else {
            separator = is_unicode_separator(cp);
        }
        if (separator) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.append(text.substr(start, len));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool is_stopword(std::string_view token) { return stopwords().count(token) > 0; }

TokenSequence content_words(std::string_view text) {
    TokenSequence tokens = tokenize(text);
    TokenSequence out;
    out.reserve(tokens.size());
    for (auto& t : tokens)
        if (!is_stopword(t)) out.push_back(std::move(t));
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

std::string_view trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace hide
