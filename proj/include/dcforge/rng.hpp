#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace dcforge {

/// Seeded 64-bit generator. `split` derives an independent child stream so that
/// nested checks stay reproducible regardless of call order.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 42) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const { return seed_; }

    Rng split(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ULL))); }

    double uniform(double lo = 0.0, double hi = 1.0) {
        // 53-bit mantissa draw; avoids library-specific distribution implementations.
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    int uniform_int(int lo, int hi) { // inclusive
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(engine_() % span);
    }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::uint64_t next() { return engine_(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace dcforge
