#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "hide/errors.hpp"

namespace hide {

// Embedding vectors live in R^d as dense Eigen columns.
using Embedding = Eigen::VectorXd;

// dot(a,b) / (|a||b|); 0.0 when either vector is zero so degenerate
// queries never abort a batch run.
double cosine_similarity(const Embedding& a, const Embedding& b);

enum class EncoderKind { feature_hash, remote };

struct EncoderConfig {
    EncoderKind kind = EncoderKind::feature_hash;
    int dim = 256;
    std::string endpoint;           // remote only, e.g. http://host:8080/embed
    std::string model;              // remote only
    std::string token_env = "HIDE_ENCODER_TOKEN";
    int max_in_flight = 4;          // remote request cap
    int timeout_ms = 30000;
};

// The semantic encoder f: X -> R^d. Immutable after construction;
// encode() may be called concurrently.
class Encoder {
public:
    virtual ~Encoder() = default;
    virtual Embedding encode(std::string_view text) const = 0;
    virtual int dim() const = 0;
    // Stable identifier of (kind, dim, model); repositories refuse
    // queries whose encoder fingerprint differs from the one they were
    // built with.
    virtual std::string fingerprint() const = 0;
};

// Deterministic offline encoder: tokenize, hash each token into one of
// d buckets (FNV-1a 64), flip the sign by a second FNV-1a pass with a
// different basis, accumulate, then L2-normalize. Empty token lists map
// to the zero vector.
class FeatureHashEncoder final : public Encoder {
public:
    explicit FeatureHashEncoder(int dim = 256);

    Embedding encode(std::string_view text) const override;
    int dim() const override { return dim_; }
    std::string fingerprint() const override;

    // Basis for the sign hash; documented so tests can recompute buckets.
    static constexpr std::uint64_t kSignBasis = 0x9E3779B97F4A7C15ull;

private:
    int dim_;
};

// Client for an HTTP embedding service. POSTs {"model", "input"} and
// expects {"embedding": [ ... ]} back; bearer token read from the
// environment variable named in the config. Bounds in-flight requests
// at config.max_in_flight.
class RemoteEncoder final : public Encoder {
public:
    explicit RemoteEncoder(EncoderConfig config);
    ~RemoteEncoder() override;

    Embedding encode(std::string_view text) const override;
    int dim() const override { return config_.dim; }
    std::string fingerprint() const override;

private:
    EncoderConfig config_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config);

}  // namespace hide
