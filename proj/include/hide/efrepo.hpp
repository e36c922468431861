#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hide/encoder.hpp"
#include "hide/errors.hpp"
#include "hide/hinting.hpp"

namespace hide {

// One incorrectly handled idiom as handed to ingestion: the idiom, the
// model's translation/explanation, and the gold counterparts. All five
// text fields must be nonempty.
struct ErrorQuintuple {
    std::string idiom_id;
    std::string idiom;
    std::string pred_translation;
    std::string pred_explanation;
    std::string gold_translation;
    std::string gold_explanation;
};

// The archived tuple: embedding, hint, and the failed prediction pair.
// Gold fields are not retained; idiom_id stays for traceability.
struct ErrorEntry {
    std::size_t entry_index = 0;
    Embedding embedding;
    Hint hint;
    std::string pred_translation;
    std::string pred_explanation;
    std::string idiom_id;
};

struct RetrievalResult {
    const ErrorEntry* entry = nullptr;
    double similarity = 0.0;
};

// The Idiomatic Error-Feedback Repository: an append-only archive of
// error entries answering exact cosine nearest-neighbor queries by
// linear scan. Entries number in the hundreds, so no index structure.
// Single writer while building; immutable snapshot for querying.
class Repository {
public:
    Repository(int dim, std::string encoder_fingerprint)
        : dim_(dim), encoder_fingerprint_(std::move(encoder_fingerprint)) {
        if (dim <= 0) throw Error("repository dim must be positive");
    }

    int dim() const { return dim_; }
    const std::string& encoder_fingerprint() const { return encoder_fingerprint_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<ErrorEntry>& entries() const { return entries_; }

    // Appends an entry; returns its index (== previous entry count).
    std::size_t ingest(const ErrorQuintuple& quintuple, const Hint& hint,
                       const Embedding& embedding);

    // Entry maximizing cos(query, z_k); ties go to the lowest entry index.
    RetrievalResult retrieve_nearest(const Embedding& query) const;

    // Same contract, top k entries ordered by (similarity desc, index asc).
    std::vector<RetrievalResult> retrieve_top_k(const Embedding& query,
                                                std::size_t k = 1) const;

    // Refuses queries from a differently configured encoder.
    void require_encoder(const Encoder& encoder) const;

    void save(const std::filesystem::path& path) const;
    static Repository load(const std::filesystem::path& path);

    static constexpr int kFormatVersion = 1;

private:
    int dim_;
    std::string encoder_fingerprint_;
    std::vector<ErrorEntry> entries_;
};

}  // namespace hide
