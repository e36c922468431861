#include <doctest.h>

#include "hide/text.hpp"

using namespace hide;

TEST_CASE("tokenize lowercases and splits on punctuation") {
    CHECK(tokenize("The cat, sat!") == TokenSequence{"the", "cat", "sat"});
    CHECK(tokenize("  spaced   out  ") == TokenSequence{"spaced", "out"});
    CHECK(tokenize("") == TokenSequence{});
    CHECK(tokenize("...!?") == TokenSequence{});
}

TEST_CASE("tokenize keeps digits and non-ASCII words") {
    CHECK(tokenize("top-10 list") == TokenSequence{"top", "10", "list"});
    // Devanagari danda separates; the script itself survives intact.
    CHECK(tokenize("आसमान से।") ==
          TokenSequence{"आसमान", "से"});
    // Curly quotes and em dashes separate.
    CHECK(tokenize("“walls”—ears") ==
          TokenSequence{"walls", "ears"});
}

TEST_CASE("tokenize never yields empty tokens") {
    for (const char* s : {"a  b", "a..b", "--", "x", " . y . "}) {
        for (const auto& t : tokenize(s)) CHECK(!t.empty());
    }
}

TEST_CASE("content words drop the stopword list") {
    CHECK(content_words("the cat sat on a mat") ==
          TokenSequence{"cat", "sat", "mat"});
    CHECK(is_stopword("the"));
    CHECK(!is_stopword("cat"));
}

TEST_CASE("fnv1a64 matches the published test vectors") {
    // Reference values for the 64-bit FNV-1a parameters.
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("trim strips both ends") {
    CHECK(trim("  x  ") == "x");
    CHECK(trim("\t\r\n") == "");
    CHECK(trim("ab") == "ab");
}
