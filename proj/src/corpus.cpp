#include "hide/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace hide {

using nlohmann::json;

std::string_view to_string(Language lang) {
    switch (lang) {
        case Language::hi: return "hi";
        case Language::bn: return "bn";
        case Language::th: return "th";
    }
    return "hi";
}

Language language_from_string(std::string_view code) {
    if (code == "hi") return Language::hi;
    if (code == "bn") return Language::bn;
    if (code == "th") return Language::th;
    throw Error("unsupported language code: " + std::string(code));
}

namespace {

std::string require_string(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw MalformedRecord(line, std::string("missing or non-string field '") + key + "'");
    std::string value = it->get<std::string>();
    if (value.empty())
        throw MalformedRecord(line, std::string("field '") + key + "' is empty");
    return value;
}

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string())
        throw MalformedRecord(line, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

IdiomRecord record_from_line(const std::string& text, std::size_t line) {
    json obj = json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
        throw MalformedRecord(line, "not a JSON object");

    IdiomRecord rec;
    rec.id = require_string(obj, "id", line);
    std::string lang = require_string(obj, "language", line);
    try {
        rec.language = language_from_string(lang);
    } catch (const Error&) {
        throw MalformedRecord(line, "unsupported language code '" + lang + "'");
    }
    rec.idiom = require_string(obj, "idiom", line);
    rec.gold_translation = require_string(obj, "gold_translation", line);
    rec.gold_explanation = require_string(obj, "gold_explanation", line);
    rec.usage_example = optional_string(obj, "usage_example", line);
    rec.cultural_note = optional_string(obj, "cultural_note", line);
    rec.image_path = optional_string(obj, "image_path", line);
    return rec;
}

json record_to_json(const IdiomRecord& rec) {
    json obj{{"id", rec.id},
             {"language", std::string(to_string(rec.language))},
             {"idiom", rec.idiom},
             {"gold_translation", rec.gold_translation},
             {"gold_explanation", rec.gold_explanation}};
    if (rec.usage_example) obj["usage_example"] = *rec.usage_example;
    if (rec.cultural_note) obj["cultural_note"] = *rec.cultural_note;
    if (rec.image_path) obj["image_path"] = *rec.image_path;
    return obj;
}

}  // namespace

std::vector<IdiomRecord> parse_corpus(std::istream& in) {
    std::vector<IdiomRecord> records;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        IdiomRecord rec = record_from_line(line, line_number);
        if (!seen_ids.insert(rec.id).second) throw DuplicateId(rec.id);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<IdiomRecord> parse_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open corpus file: " + path.string());
    return parse_corpus(in);
}

void serialize_corpus(std::span<const IdiomRecord> records, std::ostream& out) {
    for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

void serialize_corpus(std::span<const IdiomRecord> records,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write corpus file: " + path.string());
    serialize_corpus(records, out);
}

std::pair<std::vector<IdiomRecord>, std::vector<IdiomRecord>> split_dataset(
    std::span<const IdiomRecord> records, const SplitSpec& spec) {
    if (records.empty()) throw EmptyCorpus();
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw Error("train_fraction must lie in (0,1)");

    const std::size_t n = records.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }

    const auto train_size = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * spec.train_fraction));

    std::vector<IdiomRecord> train, test;
    train.reserve(train_size);
    test.reserve(n - train_size);
    for (std::size_t i = 0; i < n; ++i) {
        (i < train_size ? train : test).push_back(records[order[i]]);
    }
    return {std::move(train), std::move(test)};
}

int ipr_score(const IprAssessment& a) {
    return static_cast<int>(a.literal_translation) +
           static_cast<int>(a.contextual_interpretation) +
           static_cast<int>(a.usage_scenario) +
           static_cast<int>(a.cultural_significance) +
           static_cast<int>(a.coherence);
}

}  // namespace hide
