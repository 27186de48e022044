#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "hopss/grid.hpp"

// Spectral operators on uniform periodic grids, backed by FFTW real
// transforms (half-spectrum storage).
//
// Conventions:
//   * forward() scales by 1/N so coefficients are mode amplitudes:
//     a constant field c transforms to coefficient c at the zero mode.
//   * inverse() is the unscaled c2r transform; inverse(forward(f)) == f
//     up to roundoff.
//   * 1D spectra hold n/2+1 bins (k = 0..n/2). 2D spectra hold
//     n x (n/2+1) bins, row-major [kx][ky], kx in FFT wrap-around order.
//   * Physical wavenumber of integer mode j is 2*pi*j/length.
//   * Odd-order derivatives zero the Nyquist mode (its sign is ambiguous
//     on an even grid); even orders keep it.
//
// Plans are created once per grid shape with FFTW_ESTIMATE (deterministic)
// and executed through the new-array interface, so concurrent callers on
// distinct fields are safe. Plan creation is serialized internally.

namespace hopss {

using cplx = std::complex<double>;

using CplxArray = std::vector<cplx, AlignedAllocator<cplx>>;

struct Spectrum {
    SpatialGrid grid;
    CplxArray coeff; // half-spectrum, see layout above

    Spectrum() = default;
    explicit Spectrum(const SpatialGrid& g)
        : grid(g), coeff(spectral_size(g), cplx(0.0, 0.0)) {}

    static std::size_t spectral_size(const SpatialGrid& g) {
        std::size_t half = std::size_t(g.n) / 2 + 1;
        return g.dims == 1 ? half : std::size_t(g.n) * half;
    }

    cplx& at(int kx, int ky) { return coeff[std::size_t(kx) * (grid.n / 2 + 1) + ky]; }
    const cplx& at(int kx, int ky) const {
        return coeff[std::size_t(kx) * (grid.n / 2 + 1) + ky];
    }
};

namespace detail {

struct PlanSet {
    fftw_plan fwd = nullptr; // r2c, input preserved
    fftw_plan inv = nullptr; // c2r, input destroyed (we pass scratch)
};

inline std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

inline const PlanSet& plans_for(const SpatialGrid& g) {
    static std::map<std::pair<int, int>, PlanSet> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_pair(g.dims, g.n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    // All library arrays come from the 64-byte-aligned allocator, so plans
    // built on these buffers are valid for every array we later pass to
    // the new-array execute calls.
    std::vector<double, AlignedAllocator<double>> real_buf(g.point_count());
    std::vector<cplx, AlignedAllocator<cplx>> cplx_buf(Spectrum::spectral_size(g));
    auto* rb = real_buf.data();
    auto* cb = reinterpret_cast<fftw_complex*>(cplx_buf.data());
    const unsigned flags = FFTW_ESTIMATE;

    PlanSet ps;
    if (g.dims == 1) {
        ps.fwd = fftw_plan_dft_r2c_1d(g.n, rb, cb, flags | FFTW_PRESERVE_INPUT);
        ps.inv = fftw_plan_dft_c2r_1d(g.n, cb, rb, flags);
    } else {
        ps.fwd = fftw_plan_dft_r2c_2d(g.n, g.n, rb, cb, flags | FFTW_PRESERVE_INPUT);
        ps.inv = fftw_plan_dft_c2r_2d(g.n, g.n, cb, rb, flags);
    }
    return cache.emplace(key, ps).first->second;
}

/// Signed integer mode for a wrap-around index along a full axis.
inline int signed_mode(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

/// Multiplier (i*kappa)^order for one axis, kappa = 2*pi*j/length.
/// Odd orders vanish at the Nyquist mode.
inline cplx derivative_multiplier(int j, int n, double length, int order) {
    if (order % 2 == 1 && 2 * std::abs(j) == n) return cplx(0.0, 0.0);
    double kappa = 2.0 * M_PI * double(j) / length;
    switch (order) {
        case 1: return cplx(0.0, kappa);
        case 2: return cplx(-kappa * kappa, 0.0);
        case 3: return cplx(0.0, -kappa * kappa * kappa);
        default: throw InvalidArgument("derivative order must be 1, 2 or 3");
    }
}

/// Visit every stored bin with its signed integer modes (jy = 0 in 1D).
template <typename F>
inline void for_each_bin(const SpatialGrid& g, F&& fn) {
    int half = g.n / 2 + 1;
    if (g.dims == 1) {
        for (int k = 0; k < half; ++k) fn(std::size_t(k), k, 0);
    } else {
        for (int kx = 0; kx < g.n; ++kx) {
            int jx = signed_mode(kx, g.n);
            for (int ky = 0; ky < half; ++ky)
                fn(std::size_t(kx) * half + ky, jx, ky);
        }
    }
}

} // namespace detail

inline Spectrum forward(const Field& f) {
    const auto& plans = detail::plans_for(f.grid);
    Spectrum out(f.grid);
    fftw_execute_dft_r2c(plans.fwd, const_cast<double*>(f.values.data()),
                         reinterpret_cast<fftw_complex*>(out.coeff.data()));
    double inv_n = 1.0 / double(f.grid.point_count());
    for (auto& c : out.coeff) c *= inv_n;
    return out;
}

inline Field inverse(const Spectrum& s) {
    const auto& plans = detail::plans_for(s.grid);
    CplxArray scratch = s.coeff; // c2r destroys its input
    Field out(s.grid);
    fftw_execute_dft_c2r(plans.inv, reinterpret_cast<fftw_complex*>(scratch.data()),
                         out.values.data());
    return out;
}

/// Exact spectral derivative of the given order (1..3) along `axis`.
inline Spectrum derivative(const Spectrum& s, int order, int axis) {
    require(order >= 1 && order <= 3, "derivative: order must be 1, 2 or 3");
    require(axis >= 0 && axis < s.grid.dims, "derivative: axis out of range for grid dims");
    Spectrum out(s.grid);
    const int n = s.grid.n;
    const double len = s.grid.length;
    detail::for_each_bin(s.grid, [&](std::size_t idx, int jx, int jy) {
        int j = axis == 0 ? jx : jy;
        out.coeff[idx] = s.coeff[idx] * detail::derivative_multiplier(j, n, len, order);
    });
    return out;
}

inline Field spectral_derivative(const Field& f, int order, int axis) {
    return inverse(derivative(forward(f), order, axis));
}

/// 2/3-rule truncation: zero every bin whose integer mode exceeds 2/3 of
/// the Nyquist mode on any axis; retained bins pass through unchanged.
inline Spectrum dealias(const Spectrum& s) {
    Spectrum out = s;
    const int n = s.grid.n;
    detail::for_each_bin(s.grid, [&](std::size_t idx, int jx, int jy) {
        if (3 * std::abs(jx) > n || 3 * std::abs(jy) > n)
            out.coeff[idx] = cplx(0.0, 0.0);
    });
    return out;
}

/// Recover the incompressible velocity (vx, vy) whose curl is the given
/// vorticity, via the streamfunction: lap(psi) = -w, vx = d(psi)/dy,
/// vy = -d(psi)/dx. The zero mode of psi is set to zero, so the mean of w
/// does not contribute.
inline std::pair<Field, Field> velocity_from_vorticity(const Field& w) {
    require(w.grid.dims == 2, "velocity_from_vorticity: vorticity must be 2D");
    Spectrum w_hat = forward(w);
    Spectrum vx_hat(w.grid), vy_hat(w.grid);
    const int n = w.grid.n;
    const double len = w.grid.length;
    detail::for_each_bin(w.grid, [&](std::size_t idx, int jx, int jy) {
        double kx = 2.0 * M_PI * jx / len;
        double ky = 2.0 * M_PI * jy / len;
        double k2 = kx * kx + ky * ky;
        if (k2 == 0.0) return;
        cplx psi = w_hat.coeff[idx] / k2;
        vx_hat.coeff[idx] = psi * detail::derivative_multiplier(jy, n, len, 1);
        vy_hat.coeff[idx] = -psi * detail::derivative_multiplier(jx, n, len, 1);
    });
    return {inverse(vx_hat), inverse(vy_hat)};
}

} // namespace hopss
