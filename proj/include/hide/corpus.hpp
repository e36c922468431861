#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hide/errors.hpp"

namespace hide {

enum class Language { hi, bn, th };

std::string_view to_string(Language lang);
Language language_from_string(std::string_view code);

// One corpus row. Optional fields are omitted from the serialized form
// when absent; image_path is carried through untouched (this artifact
// never opens it).
struct IdiomRecord {
    std::string id;
    Language language = Language::hi;
    std::string idiom;
    std::string gold_translation;
    std::string gold_explanation;
    std::optional<std::string> usage_example;
    std::optional<std::string> cultural_note;
    std::optional<std::string> image_path;

    bool operator==(const IdiomRecord&) const = default;
};

// Corpus files are UTF-8 JSON Lines: one object per line, field names
// matching IdiomRecord. Blank lines are skipped.
std::vector<IdiomRecord> parse_corpus(std::istream& in);
std::vector<IdiomRecord> parse_corpus(const std::filesystem::path& path);
void serialize_corpus(std::span<const IdiomRecord> records, std::ostream& out);
void serialize_corpus(std::span<const IdiomRecord> records,
                      const std::filesystem::path& path);

struct SplitSpec {
    double train_fraction = 0.8;  // must lie in (0,1)
    std::uint64_t seed = 0;
};

// Seeded Fisher-Yates shuffle of the record indices (std::mt19937_64,
// j = rng() % (i + 1), i from N-1 down to 1), then the first
// floor(N * train_fraction) shuffled records become the train side.
// Both sides keep the shuffled order.
std::pair<std::vector<IdiomRecord>, std::vector<IdiomRecord>> split_dataset(
    std::span<const IdiomRecord> records, const SplitSpec& spec);

// Five-aspect annotation quality assessment; each flag means the aspect
// was retained.
struct IprAssessment {
    bool literal_translation = false;
    bool contextual_interpretation = false;
    bool usage_scenario = false;
    bool cultural_significance = false;
    bool coherence = false;
};

int ipr_score(const IprAssessment& a);

// Cohen's kappa over two equal-length categorical label lists:
// kappa = (p_o - p_e) / (1 - p_e), with chance agreement p_e taken from
// the marginal label frequencies. When p_e == 1 both lists are constant
// on the same label, so full agreement holds and 1.0 is returned.
template <typename Label>
double cohens_kappa(std::span<const Label> labels_a,
                    std::span<const Label> labels_b) {
    if (labels_a.size() != labels_b.size())
        throw LengthMismatch("label lists differ in length: " +
                             std::to_string(labels_a.size()) + " vs " +
                             std::to_string(labels_b.size()));
    if (labels_a.empty()) throw EmptyInput("label lists are empty");

    const double n = static_cast<double>(labels_a.size());
    std::map<Label, double> freq_a, freq_b;
    double agreements = 0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        freq_a[labels_a[i]] += 1;
        freq_b[labels_b[i]] += 1;
        if (labels_a[i] == labels_b[i]) agreements += 1;
    }
    const double p_o = agreements / n;
    double p_e = 0;
    for (const auto& [label, count_a] : freq_a) {
        auto it = freq_b.find(label);
        if (it != freq_b.end()) p_e += (count_a / n) * (it->second / n);
    }
    if (p_e >= 1.0) return 1.0;  // both lists constant on the same label
    return (p_o - p_e) / (1.0 - p_e);
}

template <typename Label>
double cohens_kappa(const std::vector<Label>& a, const std::vector<Label>& b) {
    return cohens_kappa(std::span<const Label>(a), std::span<const Label>(b));
}

}  // namespace hide
