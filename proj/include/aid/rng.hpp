#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace aid {

/// Deterministic random stream identified by (seed, stream name).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. All conversions to real/integer/normal variates are done here
/// rather than through <random> distributions, whose algorithms are
/// implementation-defined, so identical (seed, stream, call sequence)
/// produce identical values on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::string stream = "root");

    std::uint64_t seed() const noexcept { return seed_; }
    const std::string& stream() const noexcept { return stream_; }

    /// Independent child stream; the parent is not advanced.
    Rng fork(std::string_view name) const;
    Rng fork(std::uint64_t index) const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [lo, hi] (inclusive).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    bool bernoulli(double p);
    /// Standard normal via Box-Muller (no cached second variate).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t seed_;
    std::string stream_;
    std::mt19937_64 engine_;
};

}  // namespace aid
