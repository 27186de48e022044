#pragma once

#include "hopss/solver.hpp"

// Stride resampling from solver resolution to training resolution.
// Both directions are pure subsampling: kept values are bit-identical to
// the fine-grid values, no interpolation or filtering.

namespace hopss {

/// Keep frames 0, stride, 2*stride, ...; dt scales by the stride.
inline Trajectory downsample_time(const Trajectory& traj, long stride) {
    require(stride > 0, "downsample_time: stride must be positive");
    long intervals = long(traj.frames.size()) - 1;
    require(intervals >= 1, "downsample_time: trajectory needs at least 2 frames");
    require(intervals % stride == 0,
            "downsample_time: stride must divide the frame interval count");
    Trajectory out;
    out.t0 = traj.t0;
    out.dt = traj.dt * double(stride);
    out.frames.reserve(std::size_t(intervals / stride) + 1);
    for (long j = 0; j <= intervals; j += stride) out.frames.push_back(traj.frames[j]);
    return out;
}

/// Keep every factor-th grid point per dimension, anchored at index 0.
inline Field downsample_space(const Field& f, int factor) {
    require(factor > 0, "downsample_space: factor must be positive");
    if (factor == 1) return f;
    require(f.grid.n % factor == 0, "downsample_space: factor must divide n");
    SpatialGrid coarse = make_grid(f.grid.dims, f.grid.n / factor, f.grid.length);
    Field out(coarse);
    if (f.grid.dims == 1) {
        for (int i = 0; i < coarse.n; ++i) out(i) = f(i * factor);
    } else {
        for (int i = 0; i < coarse.n; ++i)
            for (int j = 0; j < coarse.n; ++j) out(i, j) = f(i * factor, j * factor);
    }
    return out;
}

inline Trajectory downsample_space(const Trajectory& traj, int factor) {
    Trajectory out;
    out.t0 = traj.t0;
    out.dt = traj.dt;
    out.frames.reserve(traj.frames.size());
    for (const Field& f : traj.frames) out.frames.push_back(downsample_space(f, factor));
    return out;
}

} // namespace hopss
