#pragma once

#include <cstdint>
#include <random>

namespace hiker {

// SplitMix64 step, used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Combines two seeds into one. Order matters: mix_seed(a, b) != mix_seed(b, a).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

// Seeded random stream. All draws go through the raw 64-bit engine so that
// results are reproducible across platforms and standard library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n). Requires n >= 1.
    int uniform_int(int n) {
        int v = static_cast<int>(uniform01() * static_cast<double>(n));
        return v < n ? v : n - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace hiker
