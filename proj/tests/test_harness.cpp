#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hide/harness.hpp"

using namespace hide;
namespace fs = std::filesystem;

namespace {

IdiomRecord record(const std::string& id, const std::string& idiom,
                   const std::string& translation,
                   const std::string& explanation) {
    IdiomRecord rec;
    rec.id = id;
    rec.language = Language::hi;
    rec.idiom = idiom;
    rec.gold_translation = translation;
    rec.gold_explanation = explanation;
    return rec;
}

std::vector<IdiomRecord> tiny_corpus() {
    return {
        record("r0", "idiom zero marker", "literal zero", "meaning of calm patience"),
        record("r1", "idiom one marker", "literal one", "meaning of sudden luck"),
        record("r2", "idiom two marker", "literal two", "meaning of hidden danger"),
    };
}

GenerationConfig stub_config() {
    GenerationConfig cfg;
    cfg.backend = Backend::stub;
    return cfg;
}

struct TempFile {
    fs::path path;
    explicit TempFile(const char* name)
        : path(fs::temp_directory_path() / name) {}
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_CASE("run_baseline keeps input order and prompts without hints") {
    StubTable table;
    table.add({.echo = true});
    ModelClient client(stub_config(), table);

    const auto corpus = tiny_corpus();
    const PredictionSet set = run_baseline(corpus, client);
    REQUIRE(set.items.size() == 3);
    CHECK(!set.hide_pass);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(set.items[i].idiom_id == corpus[i].id);
        CHECK(set.items[i].prompt == build_prompt(corpus[i].idiom));
        CHECK(!set.items[i].retrieved_entry_index.has_value());
        // Echo stub: the explanation contains the idiom verbatim.
        CHECK(set.items[i].explanation.find(corpus[i].idiom) != std::string::npos);
    }
}

TEST_CASE("run_baseline flags failed calls and continues") {
    StubTable table;
    table.add({.if_contains = "idiom one", .fail = true});
    table.add({.echo = true});
    ModelClient client(stub_config(), table);

    const auto corpus = tiny_corpus();
    const PredictionSet set = run_baseline(corpus, client);
    REQUIRE(set.items.size() == 3);
    CHECK(set.items[0].ok);
    CHECK(!set.items[1].ok);
    CHECK(!set.items[1].error.empty());
    CHECK(set.items[2].ok);
}

TEST_CASE("build_repository archives exactly the flagged predictions") {
    const auto corpus = tiny_corpus();
    FeatureHashEncoder encoder(64);
    DiscriminatorConfig disc;

    PredictionSet predictions;
    predictions.items.resize(3);
    for (std::size_t i = 0; i < 3; ++i) {
        predictions.items[i].idiom_id = corpus[i].id;
        predictions.items[i].prompt = build_prompt(corpus[i].idiom);
        predictions.items[i].translation = "some literal";
    }

    SUBCASE("all correct -> empty repository") {
        for (std::size_t i = 0; i < 3; ++i)
            predictions.items[i].explanation = corpus[i].gold_explanation;
        const Repository repo = build_repository(predictions, corpus, encoder, disc);
        CHECK(repo.empty());
    }

    SUBCASE("all wrong -> entry per record") {
        for (auto& item : predictions.items)
            item.explanation = "totally unrelated words entirely";
        const Repository repo = build_repository(predictions, corpus, encoder, disc);
        CHECK(repo.size() == 3);
        CHECK(repo.entries()[0].idiom_id == "r0");
    }

    SUBCASE("failed items are skipped") {
        for (auto& item : predictions.items)
            item.explanation = "totally unrelated words entirely";
        predictions.items[1].ok = false;
        predictions.items[1].explanation.clear();
        const Repository repo = build_repository(predictions, corpus, encoder, disc);
        CHECK(repo.size() == 2);
    }

    SUBCASE("unknown id -> JoinFailure") {
        predictions.items[0].idiom_id = "ghost";
        predictions.items[0].explanation = "words";
        CHECK_THROWS_AS(build_repository(predictions, corpus, encoder, disc),
                        JoinFailure);
    }
}

TEST_CASE("build_repository mirrors a 60% error rate") {
    std::vector<IdiomRecord> corpus;
    PredictionSet predictions;
    for (int i = 0; i < 10; ++i) {
        const std::string id = "s" + std::to_string(i);
        corpus.push_back(record(id, "idiom " + id, "literal " + id,
                                "gold meaning " + id));
        PredictionItem item;
        item.idiom_id = id;
        item.prompt = "p";
        item.translation = "t";
        // Six of ten predictions miss the gold explanation entirely.
        item.explanation = i < 6 ? "wrong words entirely unrelated"
                                 : "gold meaning " + id;
        predictions.items.push_back(item);
    }
    FeatureHashEncoder encoder(64);
    const Repository repo =
        build_repository(predictions, corpus, encoder, DiscriminatorConfig{});
    CHECK(repo.size() == 6);
}

TEST_CASE("run_hide floor above 1 reproduces baseline prompts") {
    const auto corpus = tiny_corpus();
    FeatureHashEncoder encoder(64);
    StubTable table;
    table.add({.echo = true});
    ModelClient client(stub_config(), table);

    Repository repo(encoder.dim(), encoder.fingerprint());
    Hint hint;
    hint.rendered = "some corrective cue";
    repo.ingest({"r9", "other idiom", "t", "e", "gt", "ge"}, hint,
                encoder.encode("other idiom"));

    const PredictionSet hide_set =
        run_hide(corpus, repo, encoder, client, /*similarity_floor=*/1.1);
    const PredictionSet base_set = run_baseline(corpus, client);
    REQUIRE(hide_set.items.size() == base_set.items.size());
    for (std::size_t i = 0; i < hide_set.items.size(); ++i) {
        CHECK(hide_set.items[i].prompt == base_set.items[i].prompt);
        CHECK(hide_set.items[i].retrieved_entry_index.has_value());
        CHECK(hide_set.items[i].retrieval_similarity.has_value());
    }
}

TEST_CASE("run_hide with a singleton repository injects its hint everywhere") {
    const auto corpus = tiny_corpus();
    FeatureHashEncoder encoder(64);
    StubTable table;
    table.add({.echo = true});
    ModelClient client(stub_config(), table);

    Repository repo(encoder.dim(), encoder.fingerprint());
    Hint hint;
    hint.rendered = "the only archived cue";
    repo.ingest({"r9", "idiom zero marker", "t", "e", "gt", "ge"}, hint,
                encoder.encode("idiom zero marker"));

    const PredictionSet set = run_hide(corpus, repo, encoder, client, 0.0);
    for (const auto& item : set.items) {
        CHECK(item.prompt.find("the only archived cue") != std::string::npos);
        CHECK(*item.retrieved_entry_index == 0);
    }
    CHECK(set.hide_pass);
}

TEST_CASE("run_hide guards the repository and encoder") {
    const auto corpus = tiny_corpus();
    FeatureHashEncoder enc64(64), enc32(32);
    StubTable table;
    table.add({.echo = true});
    ModelClient client(stub_config(), table);

    Repository empty(64, enc64.fingerprint());
    CHECK_THROWS_AS(run_hide(corpus, empty, enc64, client), EmptyRepository);

    Repository repo(64, enc64.fingerprint());
    Hint hint;
    hint.rendered = "cue";
    repo.ingest({"x", "idiom", "t", "e", "gt", "ge"}, hint,
                enc64.encode("idiom"));
    CHECK_THROWS_AS(run_hide(corpus, repo, enc32, client),
                    EncoderFingerprintMismatch);
}

TEST_CASE("evaluate_predictions averages per-record rows") {
    const auto corpus = tiny_corpus();
    FeatureHashEncoder encoder(64);

    PredictionSet predictions;
    PredictionItem perfect;
    perfect.idiom_id = "r0";
    perfect.prompt = "p";
    perfect.explanation = corpus[0].gold_explanation;
    PredictionItem disjoint;
    disjoint.idiom_id = "r1";
    disjoint.prompt = "p";
    disjoint.explanation = "entirely unrelated text";
    predictions.items = {perfect, disjoint};

    const EvaluationResult result =
        evaluate_predictions(predictions, corpus, encoder);
    CHECK(result.evaluated == 2);
    CHECK(result.per_record[0].second.r1 == doctest::Approx(1.0));
    CHECK(result.per_record[1].second.r1 == doctest::Approx(0.0));
    CHECK(result.corpus_mean.r1 == doctest::Approx(0.5));

    PredictionSet empty;
    CHECK_THROWS_AS(evaluate_predictions(empty, corpus, encoder), EmptyInput);
}

TEST_CASE("evaluate_predictions counts failures separately") {
    const auto corpus = tiny_corpus();
    FeatureHashEncoder encoder(64);
    PredictionSet predictions;
    PredictionItem good;
    good.idiom_id = "r0";
    good.explanation = corpus[0].gold_explanation;
    PredictionItem bad;
    bad.idiom_id = "r1";
    bad.ok = false;
    bad.error = "backend down";
    PredictionItem tokenless;  // unevaluable output, flagged not fatal
    tokenless.idiom_id = "r2";
    tokenless.explanation = "?!...";
    predictions.items = {good, bad, tokenless};

    const EvaluationResult result =
        evaluate_predictions(predictions, corpus, encoder);
    CHECK(result.evaluated == 1);
    CHECK(result.failed == 2);
}

TEST_CASE("prediction sets round-trip through disk") {
    TempFile file("hide_predictions_roundtrip.jsonl");
    PredictionSet set;
    set.run_id = "runX";
    set.hide_pass = true;
    PredictionItem a;
    a.idiom_id = "r0";
    a.prompt = "Idiom: x\nline";
    a.translation = "t";
    a.explanation = "e";
    a.retrieved_entry_index = 4;
    a.retrieval_similarity = 0.921;
    PredictionItem b;
    b.idiom_id = "r1";
    b.prompt = "p";
    b.ok = false;
    b.error = "stub rule: simulated outage";
    set.items = {a, b};

    set.save(file.path);
    const PredictionSet loaded = PredictionSet::load(file.path);
    CHECK(loaded == set);
}

TEST_CASE("manifest parsing reads the documented keys") {
    TempFile file("hide_configuration.cfg");
    {
        std::ofstream out(file.path);
        out << "# comment line\n"
               "run_id = demo\n"
               "corpus = data/corpus.jsonl\n"
               "train_fraction = 0.8\n"
               "seed = 42\n"
               "out_dir = out/demo\n"
               "similarity_floor = 0.25\n"
               "encoder.kind = feature_hash\n"
               "encoder.dim = 128\n"
               "discriminator.threshold = 0.4\n"
               "discriminator.score_kind = token_f1\n"
               "model.backend = stub\n"
               "model.top_k = 10\n"
               "model.stub_table = stub.jsonl\n";
    }
    const RunManifest m = load_manifest(file.path);
    CHECK(m.run_id == "demo");
    CHECK(m.split.train_fraction == doctest::Approx(0.8));
    CHECK(m.split.seed == 42);
    CHECK(m.similarity_floor == doctest::Approx(0.25));
    CHECK(m.encoder.dim == 128);
    CHECK(m.discriminator.threshold == doctest::Approx(0.4));
    CHECK(m.generation.backend == Backend::stub);
    CHECK(m.generation.top_k == 10);
    CHECK(m.generation.stub_table_path == "stub.jsonl");
}

TEST_CASE("manifest parsing rejects malformed lines and bad thresholds") {
    TempFile file("hide_bad_config.cfg");
    {
        std::ofstream out(file.path);
        out << "not a key value line\n";
    }
    CHECK_THROWS_AS(load_manifest(file.path), ConfigError);
    {
        std::ofstream out(file.path);
        out << "discriminator.threshold = 1.5\n";
    }
    CHECK_THROWS_AS(load_manifest(file.path), ConfigError);
}

TEST_CASE("report columns appear in the documented order") {
    MetricReport a;
    a.r1 = 0.9; a.r2 = 0.8; a.rl = 0.7; a.b1 = 0.6; a.b2 = 0.5; a.b3 = 0.4;
    a.bl = 0.3; a.bs = 0.95; a.ms = 0.6; a.cd = 0.1; a.jsd = 0.2;
    a.l2 = 3.0; a.l1 = 5.0; a.ps = 12.0; a.frs = 70.0;
    const std::vector<ReportRow> rows{{"system", a}};

    const std::string csv = report_csv(rows);
    CHECK(csv.rfind("model,R-1,R-2,R-L,B-1,B-2,B-3,B-L,BS,MS,CD,JSD,L2,L1,PS,FRS\n",
                    0) == 0);
    CHECK(csv.find("system,0.9000,0.8000,0.7000") != std::string::npos);

    std::istringstream lines(csv);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 2);  // header + one data row
}

TEST_CASE("report marks per-column best with the direction arrow") {
    MetricReport better, worse;
    better.r1 = 0.9; worse.r1 = 0.5;
    better.b1 = 0.8; worse.b1 = 0.4;
    better.cd = 0.1; worse.cd = 0.7;   // lower is better
    better.ps = 10.0; worse.ps = 50.0; // lower is better
    better.frs = 60.0; worse.frs = 40.0;
    const std::vector<ReportRow> rows{{"A", better}, {"B", worse}};

    const std::string text = report_text(rows);
    CHECK(text.find("0.9000↑") != std::string::npos);  // A best on R-1
    CHECK(text.find("0.1000↓") != std::string::npos);  // A best on CD
    CHECK(text.find("10.0000↓") != std::string::npos); // A best on PS
    CHECK(text.find("60.0000↑") != std::string::npos); // A best on FRS
    CHECK(text.find("0.5000↑") == std::string::npos);  // B never best on R-1
}

TEST_CASE("full stub run is reproducible end to end") {
    const auto corpus = tiny_corpus();
    FeatureHashEncoder encoder(64);
    StubTable table;
    table.add({.echo = true});
    ModelClient client(stub_config(), table);

    auto run_once = [&] {
        const PredictionSet base = run_baseline(corpus, client, "r");
        const Repository repo =
            build_repository(base, corpus, encoder, DiscriminatorConfig{});
        const PredictionSet hide_set =
            run_hide(corpus, repo, encoder, client, 0.0, "r");
        const EvaluationResult eval =
            evaluate_predictions(hide_set, corpus, encoder);
        const std::vector<ReportRow> rows{{"hide", eval.corpus_mean}};
        return std::make_pair(hide_set, report_csv(rows));
    };
    const auto first = run_once();
    const auto second = run_once();
    CHECK(first.first == second.first);    // prompts and predictions
    CHECK(first.second == second.second);  // report bytes
}

TEST_CASE("evaluation aggregation order is input order under parallelism") {
    std::vector<IdiomRecord> corpus;
    PredictionSet predictions;
    for (int i = 0; i < 64; ++i) {
        const std::string id = "p" + std::to_string(i);
        corpus.push_back(record(id, "idiom " + id, "lit " + id,
                                "meaning number " + std::to_string(i)));
        PredictionItem item;
        item.idiom_id = id;
        item.explanation = i % 2 ? corpus.back().gold_explanation
                                 : "unrelated words entirely";
        predictions.items.push_back(item);
    }
    FeatureHashEncoder encoder(64);
    const EvaluationResult result =
        evaluate_predictions(predictions, corpus, encoder);
    REQUIRE(result.per_record.size() == 64);
    for (int i = 0; i < 64; ++i) {
        CHECK(result.per_record[i].first == "p" + std::to_string(i));
        CHECK(result.per_record[i].second.r1 ==
              doctest::Approx(i % 2 ? 1.0 : 0.0));
    }
}
