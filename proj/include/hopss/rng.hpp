#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hopss {

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Counter-based stream derivation: the stream for sample `index` under a
/// master seed is mix64(master ^ mix64(index)). Streams are independent of
/// worker scheduling, so parallel generation is reproducible.
inline std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(master_seed ^ mix64(index));
}

/// Deterministic random stream. All draws are built from mt19937_64 output
/// with fixed arithmetic, so identical seeds give identical sequences on
/// every platform with IEEE doubles.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double uniform_pm1() { return 2.0 * uniform() - 1.0; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two 64-bit draws.
    double gaussian() {
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform index in [0, count). Uses modulo reduction; the bias is
    /// below 1e-15 for any count this library draws from.
    std::size_t index(std::size_t count) { return std::size_t(gen_() % count); }

private:
    std::mt19937_64 gen_;
};

} // namespace hopss
