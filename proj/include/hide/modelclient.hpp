#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hide/errors.hpp"

namespace hide {

enum class Backend { http, stub };

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view s);

struct GenerationConfig {
    Backend backend = Backend::stub;
    std::string endpoint;                 // http only
    std::string model_name;
    double temperature = 0.7;
    int top_k = 10;
    int max_tokens = 256;
    int timeout_ms = 30000;
    int max_retries = 3;
    int backoff_ms = 100;                 // doubles per retry
    int max_concurrency = 4;
    std::string token_env = "HIDE_MODEL_TOKEN";
    std::string stub_table_path;          // stub only
};

struct GenerationResult {
    std::string translation;
    std::string explanation;
    std::string raw;
    double latency_ms = 0.0;
    int attempts = 1;
};

// Two-part response convention: "Translation:" and "Explanation:"
// markers. When the Explanation marker is absent the whole text is the
// explanation and the translation is empty.
inline constexpr std::string_view kTranslationMarker = "Translation:";
inline constexpr std::string_view kExplanationMarker = "Explanation:";

std::pair<std::string, std::string> parse_generation_text(std::string_view raw);
std::string render_generation_text(std::string_view translation,
                                   std::string_view explanation);

// Deterministic offline backend: an ordered rule list, first match wins.
// File form is JSON Lines, one rule per line:
//   {"exact": "<prompt>", "then": "<raw response>"}
//   {"if_contains": "<s>", "then": "<raw>"}
//   {"if_contains": "<s>", "and_contains": "<s>", "then": "<raw>", "else": "<raw>"}
//   {"if_contains": "<s>", "fail": true}         -- simulated backend outage
//   {"echo": true}                                -- respond with the prompt
//   {"default": "<raw response>"}
struct StubRule {
    std::optional<std::string> exact;
    std::optional<std::string> if_contains;
    std::optional<std::string> and_contains;
    std::optional<std::string> then;
    std::optional<std::string> otherwise;
    bool echo = false;
    bool fail = false;
};

class StubTable {
public:
    StubTable() = default;
    static StubTable load(const std::filesystem::path& path);

    StubTable& add(StubRule rule) {
        rules_.push_back(std::move(rule));
        return *this;
    }

    // Raw response for the prompt; throws BackendUnreachable for fail
    // rules and MalformedResponse when no rule matches.
    std::string respond(std::string_view prompt) const;

private:
    std::vector<StubRule> rules_;
};

// Abstraction over the generation model M. Shareable across threads;
// bounds concurrent generate() calls at config.max_concurrency.
class ModelClient {
public:
    explicit ModelClient(GenerationConfig config);
    ModelClient(GenerationConfig config, StubTable table);
    ~ModelClient();

    ModelClient(const ModelClient&) = delete;
    ModelClient& operator=(const ModelClient&) = delete;

    GenerationResult generate(std::string_view prompt) const;
    const GenerationConfig& config() const { return config_; }

private:
    std::string post_http(std::string_view prompt) const;

    GenerationConfig config_;
    StubTable stub_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hide
