#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "hide/efrepo.hpp"

using namespace hide;
namespace fs = std::filesystem;

namespace {

ErrorQuintuple make_quintuple(const std::string& id) {
    return {id, "idiom " + id, "pred T " + id, "pred E " + id, "gold T " + id,
            "gold E " + id};
}

Hint make_hint(const std::string& text) {
    Hint h;
    h.error_category = ErrorCategory::missing_gist;
    h.avoid_summary = "wrong reading";
    h.gold_keywords = {"figurative", "meaning"};
    h.rendered = text;
    return h;
}

Embedding vec2(double x, double y) {
    Embedding v(2);
    v << x, y;
    return v;
}

struct TempFile {
    fs::path path;
    explicit TempFile(const char* name)
        : path(fs::temp_directory_path() / name) {}
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_CASE("ingest assigns consecutive indices starting at zero") {
    Repository repo(2, "feature_hash:2");
    CHECK(repo.ingest(make_quintuple("a"), make_hint("h1"), vec2(1, 0)) == 0);
    CHECK(repo.ingest(make_quintuple("b"), make_hint("h2"), vec2(0, 1)) == 1);
    CHECK(repo.size() == 2);
    CHECK(repo.entries()[0].entry_index == 0);
    CHECK(repo.entries()[1].entry_index == 1);
}

TEST_CASE("ingest guards dim, hint, and quintuple invariants") {
    Repository repo(2, "feature_hash:2");
    Embedding wrong(3);
    wrong << 1, 2, 3;
    CHECK_THROWS_AS(repo.ingest(make_quintuple("a"), make_hint("h"), wrong),
                    DimMismatch);

    Hint empty_hint;
    CHECK_THROWS_AS(repo.ingest(make_quintuple("a"), empty_hint, vec2(1, 0)),
                    EmptyHint);

    auto q = make_quintuple("a");
    q.pred_explanation = "  ";
    CHECK_THROWS_AS(repo.ingest(q, make_hint("h"), vec2(1, 0)), EmptyText);
    CHECK(repo.empty());
}

TEST_CASE("retrieve_nearest returns the singleton regardless of query") {
    Repository repo(2, "feature_hash:2");
    repo.ingest(make_quintuple("only"), make_hint("h"), vec2(1, 0));
    const auto hit = repo.retrieve_nearest(vec2(0, 1));
    CHECK(hit.entry->idiom_id == "only");
}

TEST_CASE("retrieve_nearest finds an exact stored vector with similarity 1") {
    Repository repo(2, "feature_hash:2");
    repo.ingest(make_quintuple("a"), make_hint("h"), vec2(1, 0));
    repo.ingest(make_quintuple("b"), make_hint("h"), vec2(0.6, 0.8));
    const auto hit = repo.retrieve_nearest(vec2(0.6, 0.8));
    CHECK(hit.entry->idiom_id == "b");
    CHECK(hit.similarity == doctest::Approx(1.0));
}

TEST_CASE("retrieve_nearest maximizes cosine over all entries") {
    Repository repo(2, "feature_hash:2");
    repo.ingest(make_quintuple("x"), make_hint("h"), vec2(1, 0));
    repo.ingest(make_quintuple("y"), make_hint("h"), vec2(0, 1));
    repo.ingest(make_quintuple("z"), make_hint("h"), vec2(0.6, 0.8));
    const auto hit = repo.retrieve_nearest(vec2(0.8, 0.6));
    CHECK(hit.entry->idiom_id == "z");
    CHECK(hit.similarity == doctest::Approx(0.96));
}

TEST_CASE("exact similarity ties resolve to the lowest entry index") {
    Repository repo(2, "feature_hash:2");
    repo.ingest(make_quintuple("first"), make_hint("h"), vec2(1, 0));
    repo.ingest(make_quintuple("twin"), make_hint("h"), vec2(1, 0));
    const auto hit = repo.retrieve_nearest(vec2(1, 0));
    CHECK(hit.entry->entry_index == 0);
    CHECK(hit.entry->idiom_id == "first");
}

TEST_CASE("retrieval does not mutate the repository") {
    Repository repo(2, "feature_hash:2");
    repo.ingest(make_quintuple("a"), make_hint("h"), vec2(1, 0));
    const auto first = repo.retrieve_nearest(vec2(0.5, 0.5));
    const auto second = repo.retrieve_nearest(vec2(0.5, 0.5));
    CHECK(first.entry == second.entry);
    CHECK(first.similarity == second.similarity);
    CHECK(repo.size() == 1);
}

TEST_CASE("retrieve_top_k orders by similarity then index") {
    Repository repo(2, "feature_hash:2");
    repo.ingest(make_quintuple("a"), make_hint("h"), vec2(1, 0));
    repo.ingest(make_quintuple("b"), make_hint("h"), vec2(0, 1));
    repo.ingest(make_quintuple("c"), make_hint("h"), vec2(1, 0));
    const auto top = repo.retrieve_top_k(vec2(1, 0), 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].entry->idiom_id == "a");  // tie with c broken by index
    CHECK(top[1].entry->idiom_id == "c");
}

TEST_CASE("empty repository and dim mismatches raise") {
    Repository repo(2, "feature_hash:2");
    CHECK_THROWS_AS(repo.retrieve_nearest(vec2(1, 0)), EmptyRepository);
    repo.ingest(make_quintuple("a"), make_hint("h"), vec2(1, 0));
    Embedding wrong(3);
    wrong << 1, 2, 3;
    CHECK_THROWS_AS(repo.retrieve_nearest(wrong), DimMismatch);
}

TEST_CASE("save/load round-trips an empty repository") {
    TempFile file("hide_repo_empty.jsonl");
    Repository repo(8, "feature_hash:8");
    repo.save(file.path);
    const Repository loaded = Repository::load(file.path);
    CHECK(loaded.dim() == 8);
    CHECK(loaded.encoder_fingerprint() == "feature_hash:8");
    CHECK(loaded.empty());
}

TEST_CASE("save/load round-trips entries field-for-field") {
    TempFile file("hide_repo_three.jsonl");
    Repository repo(2, "feature_hash:2");
    repo.ingest(make_quintuple("a"), make_hint("hint a"), vec2(0.123456789, -1));
    repo.ingest(make_quintuple("b"), make_hint("hint b"), vec2(1.0 / 3.0, 2e-17));
    repo.ingest(make_quintuple("c"), make_hint("hint c"), vec2(-0.5, 0.5));
    repo.save(file.path);

    const Repository loaded = Repository::load(file.path);
    REQUIRE(loaded.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& orig = repo.entries()[i];
        const auto& back = loaded.entries()[i];
        CHECK(back.entry_index == orig.entry_index);
        CHECK(back.idiom_id == orig.idiom_id);
        CHECK(back.pred_translation == orig.pred_translation);
        CHECK(back.pred_explanation == orig.pred_explanation);
        CHECK(back.hint == orig.hint);
        CHECK(back.embedding == orig.embedding);  // bit-exact
    }
}

TEST_CASE("load rejects an altered version header") {
    TempFile file("hide_repo_badver.jsonl");
    Repository repo(2, "feature_hash:2");
    repo.save(file.path);

    std::ifstream in(file.path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    in.close();
    auto pos = content.find("\"format_version\":1");
    REQUIRE(pos != std::string::npos);
    content.replace(pos, 18, "\"format_version\":9");
    std::ofstream out(file.path);
    out << content;
    out.close();

    CHECK_THROWS_AS(Repository::load(file.path), FormatVersionMismatch);
}

TEST_CASE("require_encoder refuses a mismatched fingerprint") {
    Repository repo(4, "feature_hash:4");
    FeatureHashEncoder right(4), wrong(8);
    CHECK_NOTHROW(repo.require_encoder(right));
    CHECK_THROWS_AS(repo.require_encoder(wrong), EncoderFingerprintMismatch);
}
