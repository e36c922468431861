#include "hide/efrepo.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "hide/text.hpp"

namespace hide {

using nlohmann::json;

namespace {

void validate_quintuple(const ErrorQuintuple& q) {
    auto check = [](std::string_view value, const char* name) {
        if (trim(value).empty())
            throw EmptyText(std::string("quintuple field '") + name + "' is empty");
    };
    check(q.idiom, "idiom");
    check(q.pred_translation, "pred_translation");
    check(q.pred_explanation, "pred_explanation");
    check(q.gold_translation, "gold_translation");
    check(q.gold_explanation, "gold_explanation");
}

json hint_to_json(const Hint& hint) {
    return json{{"error_category", std::string(to_string(hint.error_category))},
                {"avoid_summary", hint.avoid_summary},
                {"gold_keywords", hint.gold_keywords},
                {"rendered", hint.rendered}};
}

Hint hint_from_json(const json& obj) {
    Hint hint;
    hint.error_category =
        error_category_from_string(obj.at("error_category").get<std::string>());
    hint.avoid_summary = obj.at("avoid_summary").get<std::string>();
    hint.gold_keywords = obj.at("gold_keywords").get<std::vector<std::string>>();
    hint.rendered = obj.at("rendered").get<std::string>();
    return hint;
}

}  // namespace

std::size_t Repository::ingest(const ErrorQuintuple& quintuple, const Hint& hint,
                               const Embedding& embedding) {
    validate_quintuple(quintuple);
    if (hint.rendered.empty()) throw EmptyHint();
    if (embedding.size() != dim_)
        throw DimMismatch("embedding dim " + std::to_string(embedding.size()) +
                          " does not match repository dim " + std::to_string(dim_));
    if (!embedding.allFinite())
        throw Error("embedding has non-finite entries");

    ErrorEntry entry;
    entry.entry_index = entries_.size();
    entry.embedding = embedding;
    entry.hint = hint;
    entry.pred_translation = quintuple.pred_translation;
    entry.pred_explanation = quintuple.pred_explanation;
    entry.idiom_id = quintuple.idiom_id;
    entries_.push_back(std::move(entry));
    return entries_.size() - 1;
}

RetrievalResult Repository::retrieve_nearest(const Embedding& query) const {
    if (entries_.empty()) throw EmptyRepository();
    if (query.size() != dim_)
        throw DimMismatch("query dim " + std::to_string(query.size()) +
                          " does not match repository dim " + std::to_string(dim_));

    RetrievalResult best{&entries_.front(),
                         cosine_similarity(query, entries_.front().embedding)};
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        const double sim = cosine_similarity(query, entries_[i].embedding);
        if (sim > best.similarity) best = {&entries_[i], sim};
    }
    return best;
}

std::vector<RetrievalResult> Repository::retrieve_top_k(const Embedding& query,
                                                        std::size_t k) const {
    if (entries_.empty()) throw EmptyRepository();
    if (query.size() != dim_)
        throw DimMismatch("query dim " + std::to_string(query.size()) +
                          " does not match repository dim " + std::to_string(dim_));

    std::vector<RetrievalResult> scored;
    scored.reserve(entries_.size());
    for (const auto& entry : entries_)
        scored.push_back({&entry, cosine_similarity(query, entry.embedding)});
    std::stable_sort(scored.begin(), scored.end(),
                     [](const RetrievalResult& a, const RetrievalResult& b) {
                         if (a.similarity != b.similarity)
                             return a.similarity > b.similarity;
                         return a.entry->entry_index < b.entry->entry_index;
                     });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

void Repository::require_encoder(const Encoder& encoder) const {
    if (encoder.fingerprint() != encoder_fingerprint_)
        throw EncoderFingerprintMismatch(
            "repository was built with encoder '" + encoder_fingerprint_ +
            "' but queried with '" + encoder.fingerprint() + "'");
}

void Repository::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write repository file: " + path.string());

    json header{{"kind", "hide-efrepo"},
                {"format_version", kFormatVersion},
                {"dim", dim_},
                {"encoder_fingerprint", encoder_fingerprint_},
                {"entry_count", entries_.size()}};
    out << header.dump() << '\n';

    for (const auto& entry : entries_) {
        json obj{{"entry_index", entry.entry_index},
                 {"embedding", std::vector<double>(
                                   entry.embedding.data(),
                                   entry.embedding.data() + entry.embedding.size())},
                 {"hint", hint_to_json(entry.hint)},
                 {"pred_translation", entry.pred_translation},
                 {"pred_explanation", entry.pred_explanation},
                 {"idiom_id", entry.idiom_id}};
        out << obj.dump() << '\n';
    }
    if (!out) throw IoFailure("write failed: " + path.string());
}

Repository Repository::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open repository file: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw IoFailure("repository file is empty: " + path.string());
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object())
        throw IoFailure("repository header is not valid JSON");
    if (header.value("kind", "") != "hide-efrepo")
        throw FormatVersionMismatch("not a repository file: " + path.string());
    if (header.value("format_version", -1) != kFormatVersion)
        throw FormatVersionMismatch(
            "unsupported repository format version " +
            header.value("format_version", json(-1)).dump());

    Repository repo(header.at("dim").get<int>(),
                    header.at("encoder_fingerprint").get<std::string>());
    const auto expected = header.at("entry_count").get<std::size_t>();

    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded())
            throw IoFailure("repository entry is not valid JSON");

        ErrorEntry entry;
        entry.entry_index = obj.at("entry_index").get<std::size_t>();
        const auto values = obj.at("embedding").get<std::vector<double>>();
        if (static_cast<int>(values.size()) != repo.dim_)
            throw DimMismatch("stored embedding dim mismatch");
        entry.embedding = Eigen::Map<const Embedding>(values.data(),
                                                      static_cast<Eigen::Index>(values.size()));
        entry.hint = hint_from_json(obj.at("hint"));
        entry.pred_translation = obj.at("pred_translation").get<std::string>();
        entry.pred_explanation = obj.at("pred_explanation").get<std::string>();
        entry.idiom_id = obj.at("idiom_id").get<std::string>();
        if (entry.entry_index != repo.entries_.size())
            throw IoFailure("repository entry indices are not contiguous");
        repo.entries_.push_back(std::move(entry));
    }
    if (repo.entries_.size() != expected)
        throw IoFailure("repository entry count mismatch: header says " +
                        std::to_string(expected) + ", found " +
                        std::to_string(repo.entries_.size()));
    return repo;
}

}  // namespace hide
