#include "aid/rng.hpp"

#include <cmath>
#include <numbers>

#include "aid/error.hpp"

namespace aid {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::string stream)
    : seed_(seed), stream_(std::move(stream)),
      engine_(splitmix64(splitmix64(seed) ^ fnv1a(stream_))) {}

Rng Rng::fork(std::string_view name) const {
    return Rng(seed_, stream_ + "/" + std::string(name));
}

Rng Rng::fork(std::uint64_t index) const {
    return fork(std::to_string(index));
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    AID_CHECK(lo <= hi, "uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(engine_());
    const std::uint64_t range = span + 1;
    // Rejection keeps the result exactly uniform.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range) - 1;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x > limit);
    return lo + static_cast<std::int64_t>(x % range);
}

bool Rng::bernoulli(double p) {
    return uniform() < p;
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace aid
