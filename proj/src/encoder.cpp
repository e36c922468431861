#include "hide/encoder.hpp"

#include <cstdlib>
#include <semaphore>

#include <httplib.h>
#include <json.hpp>

#include "hide/text.hpp"

namespace hide {

using nlohmann::json;

double cosine_similarity(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size())
        throw DimMismatch("embedding dims differ: " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()));
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

FeatureHashEncoder::FeatureHashEncoder(int dim) : dim_(dim) {
    if (dim <= 0) throw Error("encoder dim must be positive");
}

Embedding FeatureHashEncoder::encode(std::string_view text) const {
    Embedding v = Embedding::Zero(dim_);
    for (const auto& token : tokenize(text)) {
        const auto bucket = fnv1a64(token) % static_cast<std::uint64_t>(dim_);
        const double sign = (fnv1a64(token, kSignBasis) & 1ull) ? 1.0 : -1.0;
        v[static_cast<Eigen::Index>(bucket)] += sign;
    }
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    return v;
}

std::string FeatureHashEncoder::fingerprint() const {
    return "feature_hash:" + std::to_string(dim_);
}

namespace {

// Splits "http://host:port/path" into client base and path.
struct ParsedEndpoint {
    std::string base;  // scheme://host[:port]
    std::string path;  // leading-slash path, "/" when absent
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint must start with http:// : " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

std::string bearer_from_env(const std::string& env_name) {
    if (env_name.empty()) return {};
    const char* value = std::getenv(env_name.c_str());
    return value ? value : "";
}

}  // namespace

struct RemoteEncoder::Impl {
    explicit Impl(int max_in_flight) : gate(max_in_flight) {}
    std::counting_semaphore<256> gate;
};

RemoteEncoder::RemoteEncoder(EncoderConfig config)
    : config_(std::move(config)),
      impl_(std::make_unique<Impl>(std::max(1, config_.max_in_flight))) {
    if (config_.dim <= 0) throw Error("encoder dim must be positive");
    if (config_.endpoint.empty())
        throw ConfigError("remote encoder requires an endpoint");
}

RemoteEncoder::~RemoteEncoder() = default;

Embedding RemoteEncoder::encode(std::string_view text) const {
    impl_->gate.acquire();
    struct Release {
        std::counting_semaphore<256>& gate;
        ~Release() { gate.release(); }
    } release{impl_->gate};

    auto [base, path] = parse_endpoint(config_.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout_ms / 1000,
                                  (config_.timeout_ms % 1000) * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000,
                            (config_.timeout_ms % 1000) * 1000);
    const std::string token = bearer_from_env(config_.token_env);
    if (!token.empty()) client.set_bearer_token_auth(token);

    json body{{"model", config_.model}, {"input", std::string(text)}};
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res || res->status != 200)
        throw RemoteEncoderUnavailable(
            "embedding request failed: " +
            (res ? "status " + std::to_string(res->status) : "no response"));

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("embedding") ||
        !reply["embedding"].is_array())
        throw RemoteEncoderUnavailable("embedding response missing 'embedding' array");

    const auto& values = reply["embedding"];
    if (static_cast<int>(values.size()) != config_.dim)
        throw DimMismatch("remote embedding has dim " +
                          std::to_string(values.size()) + ", expected " +
                          std::to_string(config_.dim));
    Embedding v(config_.dim);
    for (int i = 0; i < config_.dim; ++i) v[i] = values[i].get<double>();
    return v;
}

std::string RemoteEncoder::fingerprint() const {
    return "remote:" + std::to_string(config_.dim) + ":" + config_.model;
}

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config) {
    if (config.kind == EncoderKind::feature_hash)
        return std::make_unique<FeatureHashEncoder>(config.dim);
    return std::make_unique<RemoteEncoder>(config);
}

}  // namespace hide
