#pragma once

#include <stdexcept>
#include <string>

namespace waterfill {

// Error vocabulary used across the library. Everything derives from
// std::runtime_error so callers can catch broadly or by exact kind.

struct FileNotFound : std::runtime_error {
    explicit FileNotFound(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnsupportedFormat : std::runtime_error {
    explicit UnsupportedFormat(const std::string& msg) : std::runtime_error(msg) {}
};

struct ImageTooSmall : std::runtime_error {
    explicit ImageTooSmall(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Water simulation exceeded the altitude guard; parameters were unusable.
struct Diverged : std::runtime_error {
    explicit Diverged(const std::string& msg) : std::runtime_error(msg) {}
};

// Diffusion rate outside the stable interval (0, 0.25].
struct UnstableRate : std::runtime_error {
    explicit UnstableRate(const std::string& msg) : std::runtime_error(msg) {}
};

// Downsampling rate would leave fewer than 3x3 coarse samples.
struct RateTooLarge : std::runtime_error {
    explicit RateTooLarge(const std::string& msg) : std::runtime_error(msg) {}
};

// Upscale target smaller than the source grid.
struct InvalidTarget : std::runtime_error {
    explicit InvalidTarget(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed synthetic-document specification.
struct InvalidSpec : std::runtime_error {
    explicit InvalidSpec(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace waterfill
