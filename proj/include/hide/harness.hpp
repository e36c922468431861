#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hide/corpus.hpp"
#include "hide/efrepo.hpp"
#include "hide/encoder.hpp"
#include "hide/errors.hpp"
#include "hide/hinting.hpp"
#include "hide/metrics.hpp"
#include "hide/modelclient.hpp"

namespace hide {

// Everything a run needs for reproduction given fixed backends. Parsed
// from a `key = value` config file; see load_manifest() for the key list.
struct RunManifest {
    std::string run_id = "run0";
    std::string corpus_path;
    SplitSpec split;
    EncoderConfig encoder;
    DiscriminatorConfig discriminator;
    GenerationConfig generation;
    double similarity_floor = 0.0;
    std::string out_dir = "out";
    std::string created_at;  // ISO-8601, filled when a run starts
};

RunManifest load_manifest(const std::filesystem::path& config_path);
void save_manifest(const RunManifest& manifest,
                   const std::filesystem::path& path);

struct PredictionItem {
    std::string idiom_id;
    std::string prompt;
    std::string translation;
    std::string explanation;
    bool ok = true;
    std::string error;  // set when ok == false
    std::optional<std::size_t> retrieved_entry_index;
    std::optional<double> retrieval_similarity;

    bool operator==(const PredictionItem&) const = default;
};

struct PredictionSet {
    std::string run_id;
    bool hide_pass = false;
    std::vector<PredictionItem> items;

    void save(const std::filesystem::path& path) const;
    static PredictionSet load(const std::filesystem::path& path);

    static constexpr int kFormatVersion = 1;

    bool operator==(const PredictionSet&) const = default;
};

// One prediction per record, in input order. Backend failures are
// flagged per item and the pass continues.
PredictionSet run_baseline(std::span<const IdiomRecord> test_records,
                           const ModelClient& client,
                           const std::string& run_id = "run0");

// For every prediction the discriminator flags, generates a hint,
// encodes the idiom, and ingests the quintuple. Predictions join gold
// records on idiom_id. Failed predictions carry nothing to archive and
// are skipped; empty predicted translations are stored as "(none)".
Repository build_repository(const PredictionSet& predictions,
                            std::span<const IdiomRecord> gold_records,
                            const Encoder& encoder,
                            const DiscriminatorConfig& discriminator);

// The HIDE pass: encode each test idiom, retrieve the nearest archived
// failure, inject its hint when similarity >= floor, and generate.
// Retrieval index and similarity are recorded on every item.
PredictionSet run_hide(std::span<const IdiomRecord> test_records,
                       const Repository& repository, const Encoder& encoder,
                       const ModelClient& client, double similarity_floor = 0.0,
                       const std::string& run_id = "run0");

struct EvaluationResult {
    std::vector<std::pair<std::string, MetricReport>> per_record;  // idiom_id, row
    MetricReport corpus_mean;
    std::size_t evaluated = 0;
    std::size_t failed = 0;  // backend failures plus token-less outputs

    void save(const std::filesystem::path& path) const;
    static EvaluationResult load(const std::filesystem::path& path);
};

// Scores every successful prediction against its gold explanation with
// the full battery; the corpus row is the unweighted mean. The unigram
// LM is fitted on the gold explanations unless one is supplied.
EvaluationResult evaluate_predictions(const PredictionSet& predictions,
                                      std::span<const IdiomRecord> gold_records,
                                      const Encoder& encoder);
EvaluationResult evaluate_predictions(const PredictionSet& predictions,
                                      std::span<const IdiomRecord> gold_records,
                                      const Encoder& encoder,
                                      const UnigramLm& lm);

// Fraction of successful predictions whose explanation equals the gold
// explanation exactly.
double exact_match_rate(const PredictionSet& predictions,
                        std::span<const IdiomRecord> gold_records);

// Report rows: (system name, corpus-mean metrics).
using ReportRow = std::pair<std::string, MetricReport>;

// Fifteen columns in fixed order. Higher is better for the overlap and
// readability columns, lower for distances and perplexity.
inline constexpr std::string_view kReportHeader =
    "R-1,R-2,R-L,B-1,B-2,B-3,B-L,BS,MS,CD,JSD,L2,L1,PS,FRS";

std::string report_csv(std::span<const ReportRow> rows);
// Aligned table; the best value per column is marked with the column's
// direction arrow.
std::string report_text(std::span<const ReportRow> rows);
void write_report(std::span<const ReportRow> rows,
                  const std::filesystem::path& csv_path,
                  const std::filesystem::path& text_path);

}  // namespace hide
