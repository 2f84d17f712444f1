#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rdnn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Base for all library errors so callers can catch one type at the CLI edge.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an iteration turns non-finite.  For training losses it carries
// the epoch so the caller can checkpoint the last finite parameter state.
struct DivergedError : Error {
    long epoch = -1;
    explicit DivergedError(long e)
        : Error("loss became non-finite at epoch " + std::to_string(e)), epoch(e) {}
    explicit DivergedError(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    using Error::Error;
};

struct IOError : Error {
    using Error::Error;
};

// Vectorised tanh.  Eigen's double-precision .tanh() falls back to scalar
// libm; exp() does not, and tanh(z) == 1 - 2/(exp(2z)+1) exactly (saturates
// to +-1 correctly because exp overflows to inf / underflows to 0).
inline MatrixXd fast_tanh(const MatrixXd& z) {
    return 1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0);
}

// FNV-1a, used for config and reference-cache fingerprints.  Stable across
// runs and platforms, unlike std::hash.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

}  // namespace rdnn
