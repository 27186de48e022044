#include <catch2/catch_amalgamated.hpp>

#include "hopss/grf.hpp"

using namespace hopss;

TEST_CASE("grf draws are zero-mean, finite and deterministic") {
    auto g = make_grid(2, 128);
    GrfParams p{2.0, 2.5, 1.0};
    Rng rng(1);
    Field f = sample_grf(g, p, rng);
    CHECK(all_finite(f));
    CHECK(std::abs(mean(f)) <= 1e-12);

    Rng rng2(1);
    Field f2 = sample_grf(g, p, rng2);
    CHECK(f.values == f2.values); // bit-identical under the same seed

    Rng rng3(2);
    Field f3 = sample_grf(g, p, rng3);
    CHECK(max_abs(f - f3) > 0.0);
}

TEST_CASE("grf parameter validation") {
    auto g1 = make_grid(1, 64);
    auto g2 = make_grid(2, 64);
    Rng rng(1);
    CHECK_THROWS_AS(sample_grf(g1, GrfParams{7.0, 0.5, 1.0}, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_grf(g2, GrfParams{7.0, 1.0, 1.0}, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_grf(g1, GrfParams{-1.0, 2.5, 1.0}, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_grf(g1, GrfParams{1.0, 2.5, 0.0}, rng), InvalidArgument);
    CHECK_NOTHROW(sample_grf(g1, GrfParams{7.0, 0.6, 1.0}, rng));
}

TEST_CASE("grf draw lives exactly in the representable band") {
    // forward/inverse round-trips reproduce the draw, so the enforced
    // conjugate symmetry was consistent
    for (int dims : {1, 2}) {
        auto g = make_grid(dims, 64);
        Rng rng(42);
        Field f = sample_grf(g, GrfParams{3.0, 2.5, 5.0}, rng);
        Field back = inverse(forward(f));
        CHECK(max_abs(f - back) <= 1e-12 * std::max(1.0, max_abs(f)));
    }
}

TEST_CASE("mode variance follows the covariance power law") {
    // ensemble spectrum regression against log(|k|^2 + tau^2); the fitted
    // slope must recover -alpha within 10%
    auto g = make_grid(1, 256);
    GrfParams p{7.0, 2.5, 49.0};
    const int draws = 200;
    std::vector<double> var(g.n / 2 + 1, 0.0);
    Rng rng(1234);
    for (int d = 0; d < draws; ++d) {
        Field f = sample_grf(g, p, rng);
        Spectrum s = forward(f);
        for (std::size_t j = 0; j < var.size(); ++j) var[j] += std::norm(s.coeff[j]);
    }
    for (auto& v : var) v /= double(draws);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int j = 4; j <= 40; ++j) { // resolved mid-band
        double kappa2 = std::pow(2.0 * M_PI * j / g.length, 2);
        double x = std::log(kappa2 + p.tau * p.tau);
        double y = std::log(var[j]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    CHECK(slope == Catch::Approx(-p.alpha).margin(0.1 * p.alpha));
}

TEST_CASE("pointwise marginals look gaussian") {
    auto g = make_grid(1, 64);
    GrfParams p{5.0, 2.5, 1.0};
    const int draws = 2000;
    const int probes[] = {0, 13, 31, 50};
    std::vector<std::vector<double>> samples(4);
    Rng rng(777);
    for (int d = 0; d < draws; ++d) {
        Field f = sample_grf(g, p, rng);
        for (int q = 0; q < 4; ++q) samples[q].push_back(f(probes[q]));
    }
    for (const auto& s : samples) {
        double m = 0, m2 = 0, m3 = 0, m4 = 0;
        for (double v : s) m += v;
        m /= draws;
        for (double v : s) {
            double d = v - m;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= draws;
        m3 /= draws;
        m4 /= draws;
        double skew = m3 / std::pow(m2, 1.5);
        double ex_kurt = m4 / (m2 * m2) - 3.0;
        CHECK(std::abs(skew) < 0.2);
        CHECK(std::abs(ex_kurt) < 0.5);
    }
}

TEST_CASE("conventional sigma matches the documented normalization") {
    CHECK(default_grf_sigma(7.0, 2.5, 1) == Catch::Approx(49.0)); // tau^2 in 1D
    CHECK(default_grf_sigma(7.0, 2.5, 2) == Catch::Approx(std::pow(7.0, 1.5)));
}

TEST_CASE("burgers-style forcing draw is sane") {
    auto g = make_grid(1, 1024);
    Rng rng(5);
    Field f = sample_grf(g, GrfParams{7.0, 2.5, 49.0}, rng);
    CHECK(all_finite(f));
    CHECK(std::abs(mean(f)) <= 1e-12);
    CHECK(max_abs(f) > 0.01);
    CHECK(max_abs(f) < 10.0);
}
