#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hide/corpus.hpp"
#include "hide/harness.hpp"

namespace fs = std::filesystem;

namespace {

hide::RunManifest manifest_or_default(const std::string& config_path) {
    if (config_path.empty()) return {};
    return hide::load_manifest(config_path);
}

void ensure_out_dir(const hide::RunManifest& manifest) {
    if (!manifest.out_dir.empty()) fs::create_directories(manifest.out_dir);
}

fs::path default_out(const hide::RunManifest& manifest, const char* name) {
    return fs::path(manifest.out_dir) / name;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HIDE error-feedback loop for idiom explanation"};
    app.require_subcommand(1);

    std::string config_path;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse and validate a corpus file");
    std::string ingest_input;
    bool ingest_validate = false;
    ingest->add_option("--config", config_path, "Run config file");
    ingest->add_option("--input", ingest_input, "Corpus file (JSON Lines)")
        ->required();
    ingest->add_flag("--validate", ingest_validate,
                     "Validate only; exit nonzero on the first bad record");

    // split
    auto* split = app.add_subcommand("split", "Deterministic train/test split");
    std::string split_input, out_train, out_test;
    double fraction = 0.8;
    std::uint64_t seed = 0;
    split->add_option("--config", config_path, "Run config file");
    split->add_option("--input", split_input, "Corpus file")->required();
    split->add_option("--fraction", fraction, "Train fraction in (0,1)");
    split->add_option("--seed", seed, "Shuffle seed");
    split->add_option("--out-train", out_train, "Train output path")->required();
    split->add_option("--out-test", out_test, "Test output path")->required();

    // run-baseline
    auto* baseline = app.add_subcommand("run-baseline",
                                        "Generate without hints for each record");
    std::string baseline_test, baseline_out;
    baseline->add_option("--config", config_path, "Run config file")->required();
    baseline->add_option("--test", baseline_test, "Test corpus (JSON Lines)")
        ->required();
    baseline->add_option("--out", baseline_out, "Prediction output path");

    // build-repo
    auto* build = app.add_subcommand(
        "build-repo", "Archive flagged errors into a repository");
    std::string build_predictions, build_gold, build_out;
    build->add_option("--config", config_path, "Run config file")->required();
    build->add_option("--predictions", build_predictions,
                      "Baseline prediction set")->required();
    build->add_option("--gold", build_gold, "Gold corpus for the predictions")
        ->required();
    build->add_option("--out", build_out, "Repository output path");

    // run-hide
    auto* hide_pass = app.add_subcommand(
        "run-hide", "Generate with retrieved hints for each record");
    std::string hide_test, hide_repo, hide_out;
    hide_pass->add_option("--config", config_path, "Run config file")->required();
    hide_pass->add_option("--test", hide_test, "Test corpus")->required();
    hide_pass->add_option("--repo", hide_repo, "Repository file")->required();
    hide_pass->add_option("--out", hide_out, "Prediction output path");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate",
                                        "Score predictions against gold");
    std::string eval_predictions, eval_gold, eval_out;
    evaluate->add_option("--config", config_path, "Run config file")->required();
    evaluate->add_option("--predictions", eval_predictions, "Prediction set")
        ->required();
    evaluate->add_option("--gold", eval_gold, "Gold corpus")->required();
    evaluate->add_option("--out", eval_out, "Evaluation output path");

    // report
    auto* report = app.add_subcommand("report",
                                      "Tabulate evaluation rows side by side");
    std::vector<std::string> report_rows;
    std::string report_csv_path, report_text_path;
    report->add_option("--config", config_path, "Run config file");
    report->add_option("--row", report_rows,
                       "name=evaluation.json (repeatable)")->required();
    report->add_option("--out-csv", report_csv_path, "CSV output path");
    report->add_option("--out-text", report_text_path, "Text table output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            const auto records = hide::parse_corpus(fs::path(ingest_input));
            std::cout << "ok: " << records.size() << " records\n";
            return 0;
        }

        if (*split) {
            const auto records = hide::parse_corpus(fs::path(split_input));
            const auto [train, test] =
                hide::split_dataset(records, {fraction, seed});
            hide::serialize_corpus(train, fs::path(out_train));
            hide::serialize_corpus(test, fs::path(out_test));
            std::cout << "train: " << train.size() << "  test: " << test.size()
                      << '\n';
            return 0;
        }

        hide::RunManifest manifest = manifest_or_default(config_path);
        ensure_out_dir(manifest);

        if (*baseline) {
            const auto records = hide::parse_corpus(fs::path(baseline_test));
            hide::ModelClient client(manifest.generation);
            const auto predictions =
                hide::run_baseline(records, client, manifest.run_id);
            const fs::path out = baseline_out.empty()
                                     ? default_out(manifest, "baseline_predictions.jsonl")
                                     : fs::path(baseline_out);
            predictions.save(out);
            hide::save_manifest(manifest, default_out(manifest, "manifest.json"));
            std::size_t failures = 0;
            for (const auto& item : predictions.items)
                if (!item.ok) ++failures;
            std::cout << "predictions: " << predictions.items.size()
                      << "  failures: " << failures << "  -> " << out.string()
                      << '\n';
            return 0;
        }

        if (*build) {
            const auto predictions =
                hide::PredictionSet::load(fs::path(build_predictions));
            const auto gold = hide::parse_corpus(fs::path(build_gold));
            const auto encoder = hide::make_encoder(manifest.encoder);
            const auto repo = hide::build_repository(predictions, gold, *encoder,
                                                     manifest.discriminator);
            const fs::path out = build_out.empty()
                                     ? default_out(manifest, "repository.jsonl")
                                     : fs::path(build_out);
            repo.save(out);
            std::cout << "archived errors: " << repo.size() << " / "
                      << predictions.items.size() << "  -> " << out.string()
                      << '\n';
            return 0;
        }

        if (*hide_pass) {
            const auto records = hide::parse_corpus(fs::path(hide_test));
            const auto repo = hide::Repository::load(fs::path(hide_repo));
            const auto encoder = hide::make_encoder(manifest.encoder);
            hide::ModelClient client(manifest.generation);
            const auto predictions =
                hide::run_hide(records, repo, *encoder, client,
                               manifest.similarity_floor, manifest.run_id);
            const fs::path out = hide_out.empty()
                                     ? default_out(manifest, "hide_predictions.jsonl")
                                     : fs::path(hide_out);
            predictions.save(out);
            std::cout << "predictions: " << predictions.items.size() << "  -> "
                      << out.string() << '\n';
            return 0;
        }

        if (*evaluate) {
            const auto predictions =
                hide::PredictionSet::load(fs::path(eval_predictions));
            const auto gold = hide::parse_corpus(fs::path(eval_gold));
            const auto encoder = hide::make_encoder(manifest.encoder);
            const auto result =
                hide::evaluate_predictions(predictions, gold, *encoder);
            const fs::path out = eval_out.empty()
                                     ? default_out(manifest, "evaluation.json")
                                     : fs::path(eval_out);
            result.save(out);
            std::cout << "evaluated: " << result.evaluated
                      << "  failed: " << result.failed << "  -> " << out.string()
                      << '\n';
            return 0;
        }

        if (*report) {
            std::vector<hide::ReportRow> rows;
            for (const auto& spec : report_rows) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos)
                    throw hide::ConfigError("--row expects name=path: " + spec);
                const auto result =
                    hide::EvaluationResult::load(fs::path(spec.substr(eq + 1)));
                rows.emplace_back(spec.substr(0, eq), result.corpus_mean);
            }
            const fs::path csv = report_csv_path.empty()
                                     ? default_out(manifest, "report.csv")
                                     : fs::path(report_csv_path);
            const fs::path text = report_text_path.empty()
                                      ? default_out(manifest, "report.txt")
                                      : fs::path(report_text_path);
            hide::write_report(rows, csv, text);
            std::cout << hide::report_text(rows);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
