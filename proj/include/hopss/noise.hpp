#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hopss/grid.hpp"
#include "hopss/rng.hpp"

// Synthetic perturbation noise. A relative level epsilon is mapped to the
// absolute amplitude A = epsilon * max|reference| (fallback A = 1e-8 when
// the reference is identically zero). Gaussian noise is drawn directly
// with standard deviation A; the structured kinds build a 1D pattern,
// rescale it so max|pattern| == A exactly, and broadcast it along the last
// spatial axis of 2D grids. Gaussian noise also supports an absolute-scale
// mode where the standard deviation is given directly and the reference is
// ignored.

namespace hopss {

enum class NoiseKind { gaussian, multi_sine, perlin, random_walk, zero };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double epsilon = 0.0;                 // relative amplitude
    std::optional<double> sigma_abs;      // gaussian only: absolute std dev
    int k_modes = 8;                      // multi_sine: sinusoid count
    int cells = 32;                       // perlin: lattice cell count
};

inline const char* to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::multi_sine: return "multi_sine";
        case NoiseKind::perlin: return "perlin";
        case NoiseKind::random_walk: return "random_walk";
        case NoiseKind::zero: return "zero";
    }
    return "?";
}

inline NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseKind::gaussian;
    if (s == "multi_sine") return NoiseKind::multi_sine;
    if (s == "perlin") return NoiseKind::perlin;
    if (s == "random_walk") return NoiseKind::random_walk;
    if (s == "zero") return NoiseKind::zero;
    throw InvalidArgument("unknown noise kind: " + s);
}

inline void validate(const NoiseSpec& s) {
    require(s.epsilon >= 0.0, "noise: epsilon must be non-negative");
    require(s.k_modes >= 1, "noise: k_modes must be at least 1");
    require(s.cells >= 1, "noise: cells must be at least 1");
    if (s.sigma_abs) {
        require(s.kind == NoiseKind::gaussian || s.kind == NoiseKind::zero,
                "noise: absolute sigma applies to gaussian noise only");
        require(*s.sigma_abs >= 0.0, "noise: absolute sigma must be non-negative");
    }
}

/// Absolute amplitude for a relative level against a reference field.
inline double noise_amplitude(double epsilon, const Field& reference) {
    require(epsilon >= 0.0, "noise_amplitude: epsilon must be non-negative");
    if (epsilon == 0.0) return 0.0;
    double m = max_abs(reference);
    return m == 0.0 ? 1e-8 : epsilon * m;
}

namespace detail {

/// 1D pattern along an L-point axis, before rescaling. The normalized
/// coordinate is s = i/L, so s stays below 1 and the C+1 perlin gradient
/// anchors (C = min(cells, L-1)) are never indexed out of range.
inline std::vector<double> raw_pattern(const NoiseSpec& spec, int length, Rng& rng) {
    std::vector<double> p(std::size_t(length), 0.0);
    switch (spec.kind) {
        case NoiseKind::multi_sine: {
            for (int k = 1; k <= spec.k_modes; ++k) {
                double a = rng.uniform_pm1();
                double b = rng.uniform_pm1();
                double phase = rng.uniform(0.0, 2.0 * M_PI); // one phase per mode
                for (int i = 0; i < length; ++i) {
                    double s = double(i) / double(length);
                    p[i] += a * std::sin(2.0 * M_PI * k * s + phase)
                            + b * std::cos(2.0 * M_PI * k * s + phase);
                }
            }
            break;
        }
        case NoiseKind::perlin: {
            int cells = std::min(spec.cells, length - 1);
            std::vector<double> grad(std::size_t(cells) + 1);
            for (auto& g : grad) g = rng.uniform_pm1();
            for (int i = 0; i < length; ++i) {
                // i*C/L is exact whenever the true value is an integer, so
                // lattice samples come out identically zero
                double t = double(std::int64_t(i) * cells) / double(length);
                int cell = std::min(int(t), cells - 1);
                double u = t - double(cell);
                double fade = u * u * u * (u * (6.0 * u - 15.0) + 10.0);
                double v0 = grad[cell] * u;
                double v1 = grad[cell + 1] * (u - 1.0);
                p[i] = v0 + (v1 - v0) * fade;
            }
            break;
        }
        case NoiseKind::random_walk: {
            double sum = 0.0;
            for (int i = 0; i < length; ++i) {
                sum += rng.uniform_pm1();
                p[i] = sum;
            }
            double avg = 0.0;
            for (double v : p) avg += v;
            avg /= double(length);
            for (double& v : p) v -= avg;
            break;
        }
        default:
            break; // gaussian / zero never reach here
    }
    return p;
}

} // namespace detail

/// Synthesize one noise field on the reference's grid. Structured kinds
/// satisfy max|eta| == A exactly after rescaling; an all-zero raw pattern
/// (probability zero) degrades to the zero field.
inline Field synthesize_noise(const NoiseSpec& spec, const Field& reference, Rng& rng) {
    validate(spec);
    Field out(reference.grid);
    if (spec.kind == NoiseKind::zero) return out;

    if (spec.kind == NoiseKind::gaussian) {
        double stddev = spec.sigma_abs ? *spec.sigma_abs
                                       : noise_amplitude(spec.epsilon, reference);
        if (stddev == 0.0) return out;
        for (double& v : out.values) v = stddev * rng.gaussian();
        return out;
    }

    double amp = noise_amplitude(spec.epsilon, reference);
    if (amp == 0.0) return out;
    std::vector<double> pattern = detail::raw_pattern(spec, reference.grid.n, rng);
    double m = 0.0;
    for (double v : pattern) m = std::max(m, std::abs(v));
    if (m == 0.0) return out;
    double scale = amp / m;
    for (double& v : pattern) v *= scale;

    if (reference.grid.dims == 1) {
        out.values.assign(pattern.begin(), pattern.end());
    } else {
        for (int ix = 0; ix < reference.grid.n; ++ix)
            for (int iy = 0; iy < reference.grid.n; ++iy) out(ix, iy) = pattern[iy];
    }
    return out;
}

} // namespace hopss
