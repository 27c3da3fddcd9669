#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace xpc {

// Seeded generator whose derived draws are identical on every platform.
// std::mt19937_64 is fully specified by the standard, the distributions
// are not, so the bounded/normal draws are implemented here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform();

    // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
    std::size_t uniform_int(std::size_t lo, std::size_t hi);

    // Box-Muller; one uniform pair per draw.
    double normal(double mean, double stddev);

private:
    std::mt19937_64 engine_;
};

// Sub-seed for a named stage: splitmix64(seed ^ fnv1a64(tag)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

} // namespace xpc
