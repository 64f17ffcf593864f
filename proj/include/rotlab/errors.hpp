#pragma once

#include <stdexcept>
#include <string>

namespace rotlab {

enum class ErrorKind {
    Validation,
    Index,
    Resource,
    Precision,
    Consistency,
    Construction,
    Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every error thrown by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct IndexError : Error {
    explicit IndexError(const std::string& w) : Error(ErrorKind::Index, w) {}
};

/// A caller-supplied cap (on k, arcs, bits, ...) was exceeded.
struct ResourceError : Error {
    explicit ResourceError(const std::string& w) : Error(ErrorKind::Resource, w) {}
};

/// Certified arithmetic could not decide a comparison at the allowed precision.
struct PrecisionError : Error {
    explicit PrecisionError(const std::string& w) : Error(ErrorKind::Precision, w) {}
};

/// An invariant that must hold by construction was violated (a bug signal).
struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& w) : Error(ErrorKind::Consistency, w) {}
};

struct ConstructionError : Error {
    explicit ConstructionError(const std::string& w) : Error(ErrorKind::Construction, w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};

}  // namespace rotlab
