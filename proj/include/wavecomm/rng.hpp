#pragma once

#include <cstdint>

namespace wavecomm {

// splitmix64 generator. Chosen over std::mt19937_64 + <random> distributions
// because distribution output is not specified by the standard; this produces
// bit-identical streams on every platform, which the determinism contract
// (same seed -> byte-identical artifacts) depends on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive. Modulo bias is negligible for
    // the small ranges used here.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Derives a decorrelated seed for a sub-stream (epoch/frame/purpose).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        Rng r(seed ^ (a * 0xD1B54A32D192ED03ULL) ^ (b * 0x94D049BB133111EBULL));
        r.next_u64();
        return r.next_u64();
    }

private:
    std::uint64_t state_;
};

namespace nn {
using wavecomm::Rng;
}

}  // namespace wavecomm
