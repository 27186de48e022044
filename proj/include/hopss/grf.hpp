#pragma once

#include <cmath>

#include "hopss/rng.hpp"
#include "hopss/spectral.hpp"

// Gaussian random fields on periodic grids with covariance operator
//
//     C = sigma^2 * (-lap + tau^2 I)^(-alpha)
//
// built mode-wise: the coefficient of integer mode j has standard deviation
// sigma * (|2*pi*j/length|^2 + tau^2)^(-alpha/2) under the forward()
// normalization of spectral.hpp. The zero mode is dropped, so every draw has
// zero spatial mean, and the Nyquist bins are excluded so draws live in the
// band where odd spectral derivatives are well defined. alpha > dims/2 is
// required for finite pointwise variance.

namespace hopss {

struct GrfParams {
    double tau = 1.0;   // inverse length scale
    double alpha = 2.5; // spectral decay exponent
    double sigma = 1.0; // amplitude scale
};

/// Conventional amplitude tau^(0.5*(2*alpha - dims)); gives order-one
/// fields across the usual (tau, alpha) ranges.
inline double default_grf_sigma(double tau, double alpha, int dims) {
    return std::pow(tau, 0.5 * (2.0 * alpha - double(dims)));
}

inline void validate(const GrfParams& p, int dims) {
    require(p.tau > 0.0, "grf: tau must be positive");
    require(p.sigma > 0.0, "grf: sigma must be positive");
    require(p.alpha > 0.5 * dims, "grf: alpha must exceed dims/2 for finite variance");
}

namespace detail {

inline double grf_mode_std(const GrfParams& p, double k2) {
    return p.sigma * std::pow(k2 + p.tau * p.tau, -0.5 * p.alpha);
}

} // namespace detail

/// One draw from the Gaussian measure above. Deterministic given
/// (grid, params, rng state); real-valued by construction (conjugate
/// symmetry is enforced on the self-conjugate spectral columns).
inline Field sample_grf(const SpatialGrid& grid, const GrfParams& params, Rng& rng) {
    validate(params, grid.dims);
    const int n = grid.n;
    const int half = n / 2;
    const double two_pi_over_l = 2.0 * M_PI / grid.length;
    auto k2_of = [&](int jx, int jy) {
        double kx = two_pi_over_l * jx, ky = two_pi_over_l * jy;
        return kx * kx + ky * ky;
    };
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    Spectrum c(grid);
    if (grid.dims == 1) {
        // Bin 0 (mean) and the Nyquist bin stay zero; the rest are free.
        for (int j = 1; j < half; ++j) {
            double s = detail::grf_mode_std(params, k2_of(j, 0)) * inv_sqrt2;
            c.coeff[j] = cplx(s * rng.gaussian(), s * rng.gaussian());
        }
    } else {
        // Column ky = 0 contains both (kx, 0) and its conjugate partner
        // (n-kx, 0); fill it pairwise. Columns 0 < ky < n/2 are free.
        for (int kx = 1; kx < half; ++kx) {
            double s = detail::grf_mode_std(params, k2_of(kx, 0)) * inv_sqrt2;
            cplx z(s * rng.gaussian(), s * rng.gaussian());
            c.at(kx, 0) = z;
            c.at(n - kx, 0) = std::conj(z);
        }
        for (int kx = 0; kx < n; ++kx) {
            int jx = detail::signed_mode(kx, n);
            if (std::abs(jx) == half) continue;
            for (int ky = 1; ky < half; ++ky) {
                double s = detail::grf_mode_std(params, k2_of(jx, ky)) * inv_sqrt2;
                c.at(kx, ky) = cplx(s * rng.gaussian(), s * rng.gaussian());
            }
        }
    }
    return inverse(c);
}

} // namespace hopss
