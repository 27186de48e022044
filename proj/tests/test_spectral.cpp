#include <catch2/catch_amalgamated.hpp>

#include "hopss/grf.hpp"
#include "hopss/spectral.hpp"

using namespace hopss;

namespace {

Field field_1d(const SpatialGrid& g, double (*fn)(double)) {
    Field f(g);
    for (int i = 0; i < g.n; ++i) f(i) = fn(double(i) * g.spacing());
    return f;
}

Field random_field(const SpatialGrid& g, std::uint64_t seed) {
    Field f(g);
    Rng rng(seed);
    for (auto& v : f.values) v = rng.uniform_pm1();
    return f;
}

double max_err(const Field& a, const Field& b) { return max_abs(a - b); }

} // namespace

TEST_CASE("make_grid basics") {
    SpatialGrid g1 = make_grid(1, 1024, 1.0);
    CHECK(g1.spacing() == 1.0 / 1024.0);
    CHECK(g1.spacing() * g1.n == g1.length);

    SpatialGrid g2 = make_grid(2, 128, 1.0);
    CHECK(g2.point_count() == 128u * 128u);

    CHECK(make_grid(1, 4, 2.0).spacing() == 0.5);

    CHECK_THROWS_AS(make_grid(1, 5, 1.0), InvalidArgument);  // odd
    CHECK_THROWS_AS(make_grid(1, 2, 1.0), InvalidArgument);  // tiny
    CHECK_THROWS_AS(make_grid(1, 64, 0.0), InvalidArgument); // bad length
    CHECK_THROWS_AS(make_grid(3, 64, 1.0), InvalidArgument); // dims
}

TEST_CASE("spectral derivative of resolved modes") {
    auto g = make_grid(1, 64);
    Field u = field_1d(g, [](double x) { return std::sin(2.0 * M_PI * x); });
    Field du = spectral_derivative(u, 1, 0);
    Field expect = field_1d(g, [](double x) { return 2.0 * M_PI * std::cos(2.0 * M_PI * x); });
    CHECK(max_err(du, expect) <= 1e-10);

    Field c(g, 3.0);
    CHECK(max_abs(spectral_derivative(c, 2, 0)) <= 1e-12);

    // third derivative of sin(4*pi*x), compared pointwise with the analytic formula
    Field u3 = field_1d(g, [](double x) { return std::sin(4.0 * M_PI * x); });
    Field d3 = spectral_derivative(u3, 3, 0);
    double k = 4.0 * M_PI;
    Field expect3(g);
    for (int i = 0; i < g.n; ++i)
        expect3(i) = -k * k * k * std::cos(k * double(i) * g.spacing());
    CHECK(max_err(d3, expect3) <= 1e-8);
}

TEST_CASE("spectral derivative argument checks") {
    auto g1 = make_grid(1, 16);
    Field f(g1, 1.0);
    CHECK_THROWS_AS(spectral_derivative(f, 1, 1), InvalidArgument); // axis for 1D
    CHECK_THROWS_AS(spectral_derivative(f, 4, 0), InvalidArgument);
    CHECK_THROWS_AS(spectral_derivative(f, 0, 0), InvalidArgument);

    auto g2 = make_grid(2, 16);
    Field f2(g2, 1.0);
    CHECK_NOTHROW(spectral_derivative(f2, 1, 1));
    CHECK_THROWS_AS(spectral_derivative(f2, 1, 2), InvalidArgument);
}

TEST_CASE("derivative linearity") {
    auto g = make_grid(1, 128);
    for (std::uint64_t s = 0; s < 5; ++s) {
        Field f = random_field(g, 10 + s), h = random_field(g, 20 + s);
        double a = 1.7, b = -0.3;
        Field lhs = spectral_derivative(axpy(axpy(Field(g), a, f), b, h), 1, 0);
        Field rhs = axpy(axpy(Field(g), a, spectral_derivative(f, 1, 0)), b,
                         spectral_derivative(h, 1, 0));
        CHECK(max_err(lhs, rhs) <= 1e-12 * std::max(1.0, max_abs(lhs)));
    }
}

TEST_CASE("transform round trip across grid sizes") {
    for (int n = 4; n <= 1024; n *= 2) {
        auto g = make_grid(1, n);
        Field f = random_field(g, std::uint64_t(n));
        CHECK(max_err(inverse(forward(f)), f) <= 1e-12);
    }
    for (int n = 4; n <= 256; n *= 2) {
        auto g = make_grid(2, n);
        Field f = random_field(g, std::uint64_t(1000 + n));
        CHECK(max_err(inverse(forward(f)), f) <= 1e-12);
    }
}

TEST_CASE("dealias keeps low modes and kills the upper third") {
    auto g = make_grid(1, 64);
    Spectrum s(g);
    s.coeff[1] = cplx(0.3, -0.1);
    Spectrum sd = dealias(s);
    CHECK(sd.coeff[1] == s.coeff[1]); // mode j=1 untouched

    Spectrum nyq(g);
    nyq.coeff[32] = cplx(1.0, 0.0);
    Spectrum nyq_d = dealias(nyq);
    for (const auto& c : nyq_d.coeff) CHECK(c == cplx(0.0, 0.0));
}

TEST_CASE("dealias preserves retained-band energy") {
    auto g = make_grid(1, 32);
    Field f = random_field(g, 99);
    Spectrum s = forward(f);
    Spectrum sd = dealias(s);
    double kept_before = 0.0, kept_after = 0.0, cut_after = 0.0;
    for (int j = 0; j <= 16; ++j) {
        double e = std::norm(s.coeff[j]);
        if (3 * j > 32) {
            cut_after += std::norm(sd.coeff[j]);
        } else {
            kept_before += e;
            kept_after += std::norm(sd.coeff[j]);
        }
    }
    CHECK(cut_after == 0.0);
    CHECK(std::abs(kept_before - kept_after) <= 1e-12 * kept_before);
}

TEST_CASE("dealias commutes with differentiation on band-limited fields") {
    auto g = make_grid(1, 96);
    // modes strictly below a third of the Nyquist mode (48/3 = 16)
    Field f(g);
    Rng rng(4);
    for (int j = 1; j < 16; ++j) {
        double a = rng.uniform_pm1(), b = rng.uniform_pm1();
        for (int i = 0; i < g.n; ++i) {
            double x = double(i) * g.spacing();
            f(i) += a * std::sin(2.0 * M_PI * j * x) + b * std::cos(2.0 * M_PI * j * x);
        }
    }
    Spectrum d = derivative(forward(f), 1, 0);
    Field plain = inverse(d);
    Field truncated = inverse(dealias(d));
    CHECK(max_err(plain, truncated) <= 1e-12 * std::max(1.0, max_abs(plain)));
}

TEST_CASE("velocity recovery from vorticity") {
    auto g = make_grid(2, 64);

    Field zero(g);
    auto [zx, zy] = velocity_from_vorticity(zero);
    CHECK(max_abs(zx) == 0.0);
    CHECK(max_abs(zy) == 0.0);

    // single mode: w = sin(2 pi x) sin(2 pi y) has psi = w / (8 pi^2)
    Field w(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            double x = i * g.spacing(), y = j * g.spacing();
            w(i, j) = std::sin(2 * M_PI * x) * std::sin(2 * M_PI * y);
        }
    auto [vx, vy] = velocity_from_vorticity(w);
    Field vx_expect(g), vy_expect(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            double x = i * g.spacing(), y = j * g.spacing();
            vx_expect(i, j) = std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y) / (4 * M_PI);
            vy_expect(i, j) = -std::cos(2 * M_PI * x) * std::sin(2 * M_PI * y) / (4 * M_PI);
        }
    CHECK(max_err(vx, vx_expect) <= 1e-10);
    CHECK(max_err(vy, vy_expect) <= 1e-10);

    CHECK_THROWS_AS(velocity_from_vorticity(Field(make_grid(1, 64))), InvalidArgument);
}

TEST_CASE("recovered velocity is divergence-free and curls back") {
    auto g = make_grid(2, 64);
    Rng rng(17);
    Field w = sample_grf(g, GrfParams{2.0, 2.5, 2.0}, rng);
    auto [vx, vy] = velocity_from_vorticity(w);

    // divergence by independent spectral differentiation
    Field div = spectral_derivative(vx, 1, 0) + spectral_derivative(vy, 1, 1);
    CHECK(max_abs(div) <= 1e-10);

    // curl(v) equals the zero-mean part of w (and w is mean-free here)
    Field curl = spectral_derivative(vy, 1, 0) - spectral_derivative(vx, 1, 1);
    CHECK(max_err(curl, w) <= 1e-10);
}
