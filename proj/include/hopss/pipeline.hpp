#pragma once

#include "hopss/grf.hpp"
#include "hopss/perturb.hpp"
#include "hopss/resample.hpp"

// End-to-end base-solution generation: sample an initial condition and a
// time-invariant forcing from Gaussian random fields, integrate at fine
// resolution, record at the training stride, coarsen in space, and attach
// the forcing that closes the coarse discrete relation.
//
// By default the stored forcing is the coarse-grid residual of the
// downsampled trajectory, so base pairs satisfy the training-resolution
// relation exactly. Setting store_raw_forcing keeps the subsampled fine
// forcing instead (one time-invariant field); the gap between the two is
// the coarse discretization error.

namespace hopss {

struct BaseRecipe {
    PdeSpec pde;
    int fine_n = 64;
    double length = 1.0;
    double dt = 1e-3;
    long steps = 1000;
    long record_stride = 50;
    int coarsen = 1;
    GrfParams forcing_grf{};
    GrfParams ic_grf{};
    bool store_raw_forcing = false;
    StepOptions step{};
};

inline void validate(const BaseRecipe& r) {
    validate(r.pde);
    require(r.fine_n >= 4 && r.fine_n % 2 == 0, "recipe: fine_n must be even and >= 4");
    require(r.coarsen >= 1 && r.fine_n % r.coarsen == 0,
            "recipe: coarsen must divide fine_n");
    require(r.steps > 0 && r.record_stride > 0 && r.steps % r.record_stride == 0,
            "recipe: record_stride must divide steps");
    validate(r.forcing_grf, pde_dims(r.pde));
    validate(r.ic_grf, pde_dims(r.pde));
}

/// One base pair from its per-sample stream. Draw order: initial
/// condition first, then forcing.
inline SolutionPair make_base_pair(const BaseRecipe& recipe, std::uint64_t stream_seed,
                                   SolveStats* stats = nullptr) {
    SpatialGrid fine = make_grid(pde_dims(recipe.pde), recipe.fine_n, recipe.length);
    Rng rng(stream_seed);
    Field ic = sample_grf(fine, recipe.ic_grf, rng);
    Field forcing = sample_grf(fine, recipe.forcing_grf, rng);
    Trajectory traj = solve_trajectory(recipe.pde, ic, forcing, recipe.steps, recipe.dt,
                                       recipe.record_stride, recipe.step, stats);
    SolutionPair out;
    out.u = downsample_space(traj, recipe.coarsen);
    if (recipe.store_raw_forcing) {
        out.f = {downsample_space(forcing, recipe.coarsen)};
    } else {
        out.f = discrete_residual(out.u, recipe.pde);
    }
    out.provenance = Provenance{Provenance::Kind::base, -1, -1, stream_seed};
    return out;
}

inline void generate_base_stream(const BaseRecipe& recipe, std::size_t count,
                                 std::uint64_t seed, int threads,
                                 const std::function<void(std::size_t, SolutionPair&&)>& sink,
                                 SolveStats* stats = nullptr) {
    validate(recipe);
    require(count >= 1, "base generation: count must be at least 1");
    std::mutex stats_mutex;
    detail::parallel_ordered<SolutionPair>(
        count, threads,
        [&](std::size_t idx) {
            SolveStats local;
            SolutionPair p =
                make_base_pair(recipe, derive_stream(seed, idx), stats ? &local : nullptr);
            if (stats) {
                std::lock_guard<std::mutex> lk(stats_mutex);
                stats->step_seconds += local.step_seconds;
                stats->steps += local.steps;
            }
            return p;
        },
        sink);
}

inline std::vector<SolutionPair> generate_base_dataset(const BaseRecipe& recipe,
                                                       std::size_t count, std::uint64_t seed,
                                                       int threads = 1,
                                                       SolveStats* stats = nullptr) {
    std::vector<SolutionPair> out(count);
    generate_base_stream(recipe, count, seed, threads,
                         [&](std::size_t idx, SolutionPair&& p) { out[idx] = std::move(p); },
                         stats);
    return out;
}

} // namespace hopss
