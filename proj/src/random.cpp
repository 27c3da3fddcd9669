#include "xpc/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "xpc/error.hpp"

namespace xpc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::DuplicateId: return "duplicate id";
    case ErrorKind::OutOfBounds: return "out of bounds";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::VocabularyMismatch: return "vocabulary mismatch";
    case ErrorKind::SingleClass: return "single class";
    case ErrorKind::EmptyVocabulary: return "empty vocabulary";
    case ErrorKind::EmptyDocument: return "empty document";
    case ErrorKind::ClassTooSmall: return "class too small";
    case ErrorKind::NoPositives: return "no positives";
    case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::uniform_int(std::size_t lo, std::size_t hi) {
    if (lo > hi) {
        throw Error(ErrorKind::InvalidArgument, "uniform_int: empty range");
    }
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo);
    if (range == std::numeric_limits<std::uint64_t>::max()) {
        return lo + static_cast<std::size_t>(engine_());
    }
    const std::uint64_t buckets = range + 1;
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % buckets;
    std::uint64_t draw = 0;
    do {
        draw = engine_();
    } while (draw >= limit);
    return lo + static_cast<std::size_t>(draw % buckets);
}

double Rng::normal(double mean, double stddev) {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) {
        u1 = 0x1.0p-53;
    }
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t hash = basis;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t z = seed ^ fnv1a64(tag);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace xpc
