#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <thread>

#include "hopss/noise.hpp"
#include "hopss/solver.hpp"

// Solution-space perturbation and right-hand-side reconstruction.
//
// New samples are built from a set of base pairs by
//
//     u_new = u_i + mu * u_j + xi
//
// with a small scalar mu and time-invariant noise xi, and the forcing is
// corrected so the perturbed trajectory satisfies the same discrete
// relation as its primary:
//
//     f_new = f_i + R(u_new) - R(u_i)
//
// where R is the per-interval residual of the semi-implicit scheme at the
// trajectory's own resolution. R inverts one solver step, so
// R(u) - f is invariant under this construction up to roundoff.

namespace hopss {

struct Provenance {
    enum class Kind { base, hopss, mixup };
    Kind kind = Kind::base;
    int i = -1;             // primary base index (hopss)
    int j = -1;             // perturbation base index (hopss)
    std::uint64_t seed = 0; // per-sample stream seed (hopss / mixup)
};

/// One training sample: a trajectory plus the forcing that closes the
/// discrete equation. The forcing holds either one time-invariant field or
/// one field per frame interval (frame_count - 1).
struct SolutionPair {
    Trajectory u;
    std::vector<Field> f;
    Provenance provenance;

    bool forcing_per_interval() const { return f.size() == u.frames.size() - 1; }
};

inline void validate(const SolutionPair& p) {
    require(p.u.frames.size() >= 2, "solution pair: trajectory needs at least 2 frames");
    require(p.f.size() == 1 || p.forcing_per_interval(),
            "solution pair: forcing must be one field or one per frame interval");
    for (const Field& f : p.f)
        require(f.grid == p.u.grid(), "solution pair: forcing grid differs from trajectory");
}

/// Frame-wise u_i + mu * u_j + xi. xi is time-invariant.
inline Trajectory homologous_perturb(const Trajectory& u_i, const Trajectory& u_j, double mu,
                                     const Field& xi) {
    require_same_shape(u_i, u_j, "homologous_perturb");
    require(xi.grid == u_i.grid(), "homologous_perturb: noise grid differs from trajectory");
    require(std::isfinite(mu) && std::abs(mu) < 1.0,
            "homologous_perturb: |mu| must be below 1");
    Trajectory out;
    out.t0 = u_i.t0;
    out.dt = u_i.dt;
    out.frames.reserve(u_i.frames.size());
    for (std::size_t m = 0; m < u_i.frames.size(); ++m) {
        Field frame(u_i.grid());
        const auto& a = u_i.frames[m].values;
        const auto& b = u_j.frames[m].values;
        for (std::size_t p = 0; p < frame.size(); ++p)
            frame.values[p] = a[p] + mu * b[p] + xi.values[p];
        out.frames.push_back(std::move(frame));
    }
    return out;
}

/// Per-interval forcing implied by a trajectory under the semi-implicit
/// relation at its own (dt, grid) resolution:
///
///     R(u)[m] = (u[m+1] - u[m]) / dt - 1/2 L (u[m+1] + u[m]) - N0(u[m])
///
/// evaluated spectrally. If u was produced by cn_step with forcing f,
/// R(u)[m] recovers f to roundoff.
inline std::vector<Field> discrete_residual(const Trajectory& u, const PdeSpec& spec,
                                            const StepOptions& opt = {}) {
    require(u.frames.size() >= 2, "discrete_residual: trajectory needs at least 2 frames");
    require(u.grid().dims == pde_dims(spec),
            "discrete_residual: trajectory dims do not match the equation");
    const double dt = u.dt;
    require(dt > 0.0, "discrete_residual: trajectory dt must be positive");

    std::vector<cplx> sym = linear_symbol(spec, u.grid());
    std::vector<Field> out;
    out.reserve(u.frames.size() - 1);
    Spectrum cur = forward(u.frames[0]);
    for (std::size_t m = 0; m + 1 < u.frames.size(); ++m) {
        Spectrum next = forward(u.frames[m + 1]);
        Spectrum n_hat = nonlinear_hat(spec, u.frames[m], cur, opt);
        Spectrum r_hat(u.grid());
        for (std::size_t k = 0; k < r_hat.coeff.size(); ++k) {
            r_hat.coeff[k] = (next.coeff[k] - cur.coeff[k]) / dt
                             - 0.5 * sym[k] * (next.coeff[k] + cur.coeff[k])
                             - n_hat.coeff[k];
        }
        out.push_back(inverse(r_hat));
        cur = std::move(next);
    }
    return out;
}

/// New forcing for a perturbed trajectory: f_i + R(u_new) - R(u_i),
/// per interval. A single time-invariant f_i broadcasts over intervals.
inline std::vector<Field> rhs_variation(const Trajectory& u_new, const Trajectory& u_i,
                                        const std::vector<Field>& f_i, const PdeSpec& spec,
                                        const StepOptions& opt = {}) {
    require_same_shape(u_new, u_i, "rhs_variation");
    std::size_t intervals = u_i.frames.size() - 1;
    require(f_i.size() == 1 || f_i.size() == intervals,
            "rhs_variation: forcing must be one field or one per interval");
    std::vector<Field> r_new = discrete_residual(u_new, spec, opt);
    std::vector<Field> r_old = discrete_residual(u_i, spec, opt);
    std::vector<Field> out;
    out.reserve(intervals);
    for (std::size_t m = 0; m < intervals; ++m) {
        const Field& base = f_i.size() == 1 ? f_i[0] : f_i[m];
        require(base.grid == u_i.grid(), "rhs_variation: forcing grid differs");
        Field f(base.grid);
        for (std::size_t p = 0; p < f.size(); ++p)
            f.values[p] = base.values[p] + r_new[m].values[p] - r_old[m].values[p];
        out.push_back(std::move(f));
    }
    return out;
}

struct HopssConfig {
    double mu = 1e-3;
    NoiseSpec noise{NoiseKind::gaussian, 0.0, 1e-4, 8, 32};
    std::size_t count = 1;
};

inline void validate_base_set(const std::vector<SolutionPair>& base) {
    require(!base.empty(), "base set must not be empty");
    for (const auto& p : base) {
        validate(p);
        require(p.u.frames.size() == base.front().u.frames.size()
                    && p.u.grid() == base.front().u.grid()
                    && p.u.dt == base.front().u.dt,
                "base set must be homogeneous in grid, dt and frame count");
    }
}

namespace detail {

/// Run make(0..count-1) across `threads` workers and hand results to
/// `sink` in index order. Work is chunked so memory stays bounded; the
/// output is identical for any thread count.
template <typename T>
inline void parallel_ordered(std::size_t count, int threads,
                             const std::function<T(std::size_t)>& make,
                             const std::function<void(std::size_t, T&&)>& sink) {
    if (threads < 1) threads = 1;
    std::size_t chunk = std::max<std::size_t>(1, std::size_t(threads) * 4);
    std::vector<std::optional<T>> slots(chunk);
    for (std::size_t begin = 0; begin < count; begin += chunk) {
        std::size_t end = std::min(count, begin + chunk);
        if (threads == 1 || end - begin == 1) {
            for (std::size_t i = begin; i < end; ++i) sink(i, make(i));
            continue;
        }
        std::atomic<std::size_t> cursor{begin};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&]() {
            for (;;) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= end) return;
                try {
                    slots[i - begin] = make(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
        for (std::size_t i = begin; i < end; ++i) {
            sink(i, std::move(*slots[i - begin]));
            slots[i - begin].reset();
        }
    }
}

} // namespace detail

/// Draw an ordered (i, j) pair with i != j, uniform over ordered pairs.
inline std::pair<int, int> draw_pair_indices(std::size_t base_count, Rng& rng) {
    std::size_t i = rng.index(base_count);
    std::size_t j = rng.index(base_count - 1);
    if (j >= i) ++j;
    return {int(i), int(j)};
}

/// The (i, j) a given per-sample stream will select; the first draws of
/// the stream, so generation and manifests agree by construction.
inline std::pair<int, int> hopss_pair_indices(std::size_t base_count,
                                              std::uint64_t stream_seed) {
    Rng rng(stream_seed);
    return draw_pair_indices(base_count, rng);
}

/// Build one perturbed sample from its per-sample stream. Draw order:
/// primary index i, perturbation index j (shifted past i), then the noise
/// pattern. The amplitude reference is the primary's first frame.
/// `base_residuals`, when given, holds precomputed discrete_residual values
/// per base pair; reusing them is bit-identical to recomputing.
inline SolutionPair make_hopss_sample(const std::vector<SolutionPair>& base,
                                      const HopssConfig& cfg, const PdeSpec& spec,
                                      std::uint64_t stream_seed,
                                      const std::vector<std::vector<Field>>* base_residuals
                                      = nullptr) {
    Rng rng(stream_seed);
    auto [i, j] = draw_pair_indices(base.size(), rng);
    Field xi = synthesize_noise(cfg.noise, base[i].u.frames[0], rng);
    SolutionPair out;
    out.u = homologous_perturb(base[i].u, base[j].u, cfg.mu, xi);
    std::vector<Field> r_new = discrete_residual(out.u, spec);
    std::vector<Field> r_old_local;
    const std::vector<Field>& r_old =
        base_residuals ? (*base_residuals)[i]
                       : (r_old_local = discrete_residual(base[i].u, spec));
    const std::vector<Field>& f_i = base[i].f;
    out.f.reserve(r_new.size());
    for (std::size_t m = 0; m < r_new.size(); ++m) {
        const Field& fb = f_i.size() == 1 ? f_i[0] : f_i[m];
        Field f(fb.grid);
        for (std::size_t p = 0; p < f.size(); ++p)
            f.values[p] = fb.values[p] + r_new[m].values[p] - r_old[m].values[p];
        out.f.push_back(std::move(f));
    }
    out.provenance = Provenance{Provenance::Kind::hopss, i, j, stream_seed};
    return out;
}

/// Stream `cfg.count` perturbed samples to `sink` in index order.
/// Deterministic for a given (base, cfg, seed) regardless of threads.
inline void generate_hopss_stream(const std::vector<SolutionPair>& base,
                                  const HopssConfig& cfg, const PdeSpec& spec,
                                  std::uint64_t seed, int threads,
                                  const std::function<void(std::size_t, SolutionPair&&)>& sink) {
    validate_base_set(base);
    require(base.size() >= 2, "hopss generation needs at least 2 base pairs (i != j)");
    require(cfg.count >= 1, "hopss generation: count must be at least 1");
    validate(cfg.noise);
    std::vector<std::vector<Field>> base_residuals(base.size());
    detail::parallel_ordered<std::vector<Field>>(
        base.size(), threads,
        [&](std::size_t b) { return discrete_residual(base[b].u, spec); },
        [&](std::size_t b, std::vector<Field>&& r) { base_residuals[b] = std::move(r); });
    detail::parallel_ordered<SolutionPair>(
        cfg.count, threads,
        [&](std::size_t idx) {
            return make_hopss_sample(base, cfg, spec, derive_stream(seed, idx),
                                     &base_residuals);
        },
        sink);
}

inline std::vector<SolutionPair> generate_hopss_dataset(const std::vector<SolutionPair>& base,
                                                        const HopssConfig& cfg,
                                                        const PdeSpec& spec, std::uint64_t seed,
                                                        int threads = 1) {
    std::vector<SolutionPair> out(cfg.count);
    generate_hopss_stream(base, cfg, spec, seed, threads,
                          [&](std::size_t idx, SolutionPair&& p) { out[idx] = std::move(p); });
    return out;
}

/// Gaussian weights normalized to sum 1 (they may be negative). A raw sum
/// below 1e-12 in magnitude is redrawn.
inline std::vector<double> mixup_weights(std::size_t count, Rng& rng) {
    std::vector<double> w(count);
    for (;;) {
        double sum = 0.0;
        for (auto& v : w) {
            v = rng.gaussian();
            sum += v;
        }
        if (std::abs(sum) >= 1e-12) {
            for (auto& v : w) v /= sum;
            return w;
        }
    }
}

/// Normalized random combination of all base trajectories.
inline Trajectory mixup_sample(const std::vector<SolutionPair>& base, Rng& rng,
                               std::vector<double>* weights_out = nullptr) {
    validate_base_set(base);
    std::vector<double> w = mixup_weights(base.size(), rng);
    Trajectory out;
    out.t0 = base[0].u.t0;
    out.dt = base[0].u.dt;
    std::size_t frames = base[0].u.frames.size();
    out.frames.assign(frames, Field(base[0].u.grid()));
    for (std::size_t b = 0; b < base.size(); ++b)
        for (std::size_t m = 0; m < frames; ++m) {
            const auto& src = base[b].u.frames[m].values;
            auto& dst = out.frames[m].values;
            for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += w[b] * src[p];
        }
    if (weights_out) *weights_out = std::move(w);
    return out;
}

/// Mixup pairs carry the identically weighted combination of the base
/// forcings; the combination does not close the nonlinear equation, which
/// is what the ablation measures.
inline SolutionPair make_mixup_sample(const std::vector<SolutionPair>& base,
                                      std::uint64_t stream_seed) {
    Rng rng(stream_seed);
    std::vector<double> w;
    SolutionPair out;
    out.u = mixup_sample(base, rng, &w);
    std::size_t f_count = base[0].f.size();
    out.f.assign(f_count, Field(base[0].u.grid()));
    for (std::size_t b = 0; b < base.size(); ++b) {
        require(base[b].f.size() == f_count, "mixup: base forcing layouts differ");
        for (std::size_t m = 0; m < f_count; ++m) {
            const auto& src = base[b].f[m].values;
            auto& dst = out.f[m].values;
            for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += w[b] * src[p];
        }
    }
    out.provenance = Provenance{Provenance::Kind::mixup, -1, -1, stream_seed};
    return out;
}

inline void generate_mixup_stream(const std::vector<SolutionPair>& base, std::size_t count,
                                  std::uint64_t seed, int threads,
                                  const std::function<void(std::size_t, SolutionPair&&)>& sink) {
    validate_base_set(base);
    require(count >= 1, "mixup generation: count must be at least 1");
    detail::parallel_ordered<SolutionPair>(
        count, threads,
        [&](std::size_t idx) { return make_mixup_sample(base, derive_stream(seed, idx)); },
        sink);
}

inline std::vector<SolutionPair> generate_mixup_dataset(const std::vector<SolutionPair>& base,
                                                        std::size_t count, std::uint64_t seed,
                                                        int threads = 1) {
    std::vector<SolutionPair> out(count);
    generate_mixup_stream(base, count, seed, threads,
                          [&](std::size_t idx, SolutionPair&& p) { out[idx] = std::move(p); });
    return out;
}

} // namespace hopss
