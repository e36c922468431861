#include "hide/modelclient.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "hide/text.hpp"

namespace hide {

using nlohmann::json;

std::string_view to_string(Backend b) {
    return b == Backend::http ? "http" : "stub";
}

Backend backend_from_string(std::string_view s) {
    if (s == "http") return Backend::http;
    if (s == "stub") return Backend::stub;
    throw Error("unknown backend: " + std::string(s));
}

std::pair<std::string, std::string> parse_generation_text(std::string_view raw) {
    const auto expl_pos = raw.find(kExplanationMarker);
    if (expl_pos == std::string_view::npos)
        return {"", std::string(trim(raw))};

    std::string translation;
    const auto trans_pos = raw.find(kTranslationMarker);
    if (trans_pos != std::string_view::npos && trans_pos < expl_pos) {
        translation = std::string(trim(raw.substr(
            trans_pos + kTranslationMarker.size(),
            expl_pos - trans_pos - kTranslationMarker.size())));
    }
    std::string explanation =
        std::string(trim(raw.substr(expl_pos + kExplanationMarker.size())));
    return {std::move(translation), std::move(explanation)};
}

std::string render_generation_text(std::string_view translation,
                                   std::string_view explanation) {
    std::string out;
    out.append(kTranslationMarker);
    out.push_back(' ');
    out.append(translation);
    out.push_back('\n');
    out.append(kExplanationMarker);
    out.push_back(' ');
    out.append(explanation);
    return out;
}

StubTable StubTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open stub table: " + path.string());

    StubTable table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw IoFailure("stub table line " + std::to_string(line_number) +
                            " is not a JSON object");
        StubRule rule;
        if (obj.contains("exact")) rule.exact = obj["exact"].get<std::string>();
        if (obj.contains("if_contains"))
            rule.if_contains = obj["if_contains"].get<std::string>();
        if (obj.contains("and_contains"))
            rule.and_contains = obj["and_contains"].get<std::string>();
        if (obj.contains("then")) rule.then = obj["then"].get<std::string>();
        if (obj.contains("else")) rule.otherwise = obj["else"].get<std::string>();
        if (obj.contains("default")) {
            rule.then = obj["default"].get<std::string>();
        }
        rule.echo = obj.value("echo", false);
        rule.fail = obj.value("fail", false);
        table.add(std::move(rule));
    }
    return table;
}

std::string StubTable::respond(std::string_view prompt) const {
    const std::string prompt_str(prompt);
    for (const auto& rule : rules_) {
        if (rule.exact) {
            if (*rule.exact != prompt) continue;
            if (rule.fail) throw BackendUnreachable("stub rule: simulated outage");
            if (rule.echo) return prompt_str;
            return rule.then.value_or("");
        }
        if (rule.if_contains &&
            prompt_str.find(*rule.if_contains) == std::string::npos)
            continue;
        if (rule.fail) throw BackendUnreachable("stub rule: simulated outage");
        if (rule.echo) return prompt_str;
        if (rule.and_contains) {
            if (prompt_str.find(*rule.and_contains) != std::string::npos)
                return rule.then.value_or("");
            if (rule.otherwise) return *rule.otherwise;
            continue;
        }
        if (rule.then) return *rule.then;
    }
    throw MalformedResponse("no stub rule matched the prompt");
}

struct ModelClient::Impl {
    explicit Impl(int cap) : gate(cap) {}
    std::counting_semaphore<256> gate;
};

ModelClient::ModelClient(GenerationConfig config)
    : config_(std::move(config)),
      impl_(std::make_unique<Impl>(std::max(1, config_.max_concurrency))) {
    if (config_.top_k < 1) throw Error("top_k must be >= 1");
    if (config_.max_retries < 0) throw Error("max_retries must be >= 0");
    if (config_.backend == Backend::stub && !config_.stub_table_path.empty())
        stub_ = StubTable::load(config_.stub_table_path);
}

ModelClient::ModelClient(GenerationConfig config, StubTable table)
    : ModelClient(std::move(config)) {
    stub_ = std::move(table);
}

ModelClient::~ModelClient() = default;

namespace {

struct ParsedEndpoint {
    std::string base;
    std::string path;
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint must start with http:// : " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

std::string ModelClient::post_http(std::string_view prompt) const {
    auto [base, path] = parse_endpoint(config_.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_ms / 1000,
                                  (config_.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000,
                            (config_.timeout_ms % 1000) * 1000);
    if (!config_.token_env.empty()) {
        if (const char* token = std::getenv(config_.token_env.c_str());
            token && *token)
            client.set_bearer_token_auth(token);
    }

    json body{{"model", config_.model_name},
              {"prompt", std::string(prompt)},
              {"temperature", config_.temperature},
              {"top_k", config_.top_k},
              {"max_tokens", config_.max_tokens}};
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
        if (res.error() == httplib::Error::ConnectionTimeout ||
            res.error() == httplib::Error::Read)
            throw Timeout("model request timed out");
        throw BackendUnreachable("model endpoint unreachable: " +
                                 httplib::to_string(res.error()));
    }
    if (res->status >= 500)
        throw BackendUnreachable("model endpoint returned status " +
                                 std::to_string(res->status));
    if (res->status != 200)
        throw MalformedResponse("model endpoint returned status " +
                                std::to_string(res->status));

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("text") ||
        !reply["text"].is_string())
        throw MalformedResponse("model response missing 'text' field");
    return reply["text"].get<std::string>();
}

GenerationResult ModelClient::generate(std::string_view prompt) const {
    if (trim(prompt).empty()) throw EmptyText("prompt is empty");

    impl_->gate.acquire();
    struct Release {
        std::counting_semaphore<256>& gate;
        ~Release() { gate.release(); }
    } release{impl_->gate};

    const auto started = std::chrono::steady_clock::now();
    GenerationResult result;

    if (config_.backend == Backend::stub) {
        result.raw = stub_.respond(prompt);
    } else {
        int backoff = config_.backoff_ms;
        for (int attempt = 0;; ++attempt) {
            result.attempts = attempt + 1;
            try {
                result.raw = post_http(prompt);
                break;
            } catch (const MalformedResponse&) {
                throw;  // permanent: retrying cannot help
            } catch (const Error&) {
                if (attempt >= config_.max_retries) throw;
                std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
                backoff *= 2;
            }
        }
    }

    auto [translation, explanation] = parse_generation_text(result.raw);
    result.translation = std::move(translation);
    result.explanation = std::move(explanation);
    result.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  started)
            .count();
    return result;
}

}  // namespace hide
