#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hopss/common.hpp"

namespace hopss {

/// Uniform periodic grid in 1 or 2 dimensions. The domain is [0, length)
/// per dimension with n equally spaced points; point i sits at i*spacing().
struct SpatialGrid {
    int dims = 1;
    int n = 0;
    double length = 1.0;

    double spacing() const { return length / n; }
    std::size_t point_count() const {
        return dims == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n);
    }
    friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;
};

inline SpatialGrid make_grid(int dims, int n, double length = 1.0) {
    require(dims == 1 || dims == 2, "make_grid: dims must be 1 or 2");
    require(n >= 4, "make_grid: n must be at least 4");
    require(n % 2 == 0, "make_grid: n must be even");
    require(length > 0.0 && std::isfinite(length), "make_grid: length must be positive");
    return SpatialGrid{dims, n, length};
}

using RealArray = std::vector<double, AlignedAllocator<double>>;

/// Real scalar field sampled on a SpatialGrid. 2D storage is row-major
/// [x][y], so the y index varies fastest.
struct Field {
    SpatialGrid grid;
    RealArray values;

    Field() = default;
    explicit Field(const SpatialGrid& g, double fill = 0.0)
        : grid(g), values(g.point_count(), fill) {}

    double& operator()(int ix) { return values[std::size_t(ix)]; }
    const double& operator()(int ix) const { return values[std::size_t(ix)]; }
    double& operator()(int ix, int iy) {
        return values[std::size_t(ix) * grid.n + iy];
    }
    const double& operator()(int ix, int iy) const {
        return values[std::size_t(ix) * grid.n + iy];
    }

    std::size_t size() const { return values.size(); }
};

inline double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline double mean(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s / double(f.values.size());
}

inline bool all_finite(const Field& f) {
    for (double v : f.values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

inline void require_same_grid(const Field& a, const Field& b, const char* where) {
    require(a.grid == b.grid, std::string(where) + ": fields live on different grids");
}

/// c = a + s*b, elementwise.
inline Field axpy(const Field& a, double s, const Field& b) {
    require_same_grid(a, b, "axpy");
    Field out(a.grid);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = a.values[i] + s * b.values[i];
    return out;
}

inline Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b, "operator-");
    Field out(a.grid);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = a.values[i] - b.values[i];
    return out;
}

inline Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b, "operator+");
    Field out(a.grid);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = a.values[i] + b.values[i];
    return out;
}

} // namespace hopss
