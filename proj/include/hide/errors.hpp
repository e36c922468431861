#pragma once

#include <stdexcept>
#include <string>

namespace hide {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// corpus
struct MalformedRecord : Error {
    MalformedRecord(std::size_t line, const std::string& reason)
        : Error("malformed record at line " + std::to_string(line) + ": " + reason),
          line_number(line) {}
    std::size_t line_number;
};
struct DuplicateId : Error {
    explicit DuplicateId(const std::string& id)
        : Error("duplicate record id: " + id), id(id) {}
    std::string id;
};
struct EmptyCorpus : Error {
    EmptyCorpus() : Error("corpus is empty") {}
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct EmptyInput : Error {
    using Error::Error;
};

// encoder / efrepo
struct DimMismatch : Error {
    using Error::Error;
};
struct RemoteEncoderUnavailable : Error {
    using Error::Error;
};
struct EmptyHint : Error {
    EmptyHint() : Error("hint text is empty") {}
};
struct EmptyRepository : Error {
    EmptyRepository() : Error("repository has no entries") {}
};
struct IoFailure : Error {
    using Error::Error;
};
struct FormatVersionMismatch : Error {
    using Error::Error;
};
struct EncoderFingerprintMismatch : Error {
    using Error::Error;
};

// hinting / metrics
struct EmptyText : Error {
    using Error::Error;
};

// modelclient
struct BackendUnreachable : Error {
    using Error::Error;
};
struct MalformedResponse : Error {
    using Error::Error;
};
struct Timeout : Error {
    using Error::Error;
};

// harness
struct JoinFailure : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace hide
