#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wordgeom {

// Raised when an input file violates its declared format. Carries the
// byte or line offset where parsing stopped.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::uint64_t offset, bool byte_offset)
        : std::runtime_error(what + (byte_offset ? " (byte " : " (line ") +
                             std::to_string(offset) + ")"),
          offset_(offset), byte_offset_(byte_offset) {}

    std::uint64_t offset() const { return offset_; }
    bool is_byte_offset() const { return byte_offset_; }

private:
    std::uint64_t offset_;
    bool byte_offset_;
};

// Raised by vocabulary lookups. Callers decide whether a miss is fatal
// (single-word query) or skippable (batch analyses, resampling replicates).
class missing_token_error : public std::runtime_error {
public:
    explicit missing_token_error(const std::string& token)
        : std::runtime_error("token not in vocabulary: \"" + token + "\""),
          token_(token) {}

    const std::string& token() const { return token_; }

private:
    std::string token_;
};

// SplitMix64. All seeded behavior in the library (training, resampling,
// power-iteration start vectors) goes through this generator so that runs
// are reproducible and independent reimplementations can follow the same
// draw sequence.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). Modulo reduction; the tiny bias is irrelevant for
    // resampling and is part of the documented draw rule.
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

    // Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace wordgeom
