#include <catch2/catch_amalgamated.hpp>

#include "hopss/grf.hpp"
#include "hopss/solver.hpp"

using namespace hopss;

namespace {

const double kTwoPi = 2.0 * M_PI;

GrfParams grf_for(int dims) {
    double tau = dims == 2 ? 2.0 : 7.0;
    return {tau, 2.5, default_grf_sigma(tau, 2.5, dims)};
}

SpatialGrid grid_for(const PdeSpec& spec, int n) {
    // dispersive 1D problems live on a 2*pi domain by convention
    double len = std::holds_alternative<Kdv>(spec) ? kTwoPi : 1.0;
    return make_grid(pde_dims(spec), n, len);
}

} // namespace

TEST_CASE("zero is a fixed point of every equation") {
    for (PdeSpec spec : {PdeSpec(Ns2d{1e-4}), PdeSpec(Burgers{1000.0}), PdeSpec(Kdv{})}) {
        auto g = grid_for(spec, 32);
        Field zero(g);
        Field out = cn_step(zero, zero, spec, 0.1);
        CHECK(max_abs(out) == 0.0);
    }
}

TEST_CASE("constant states are invariant without forcing") {
    auto g = make_grid(1, 64);
    Field c(g, 2.5);
    Field out = cn_step(c, Field(g), Burgers{1000.0}, 1e-2);
    CHECK(max_abs(out - c) <= 1e-14);
}

TEST_CASE("linear part matches the scalar mode recurrence") {
    // with the nonlinearity disabled, each mode obeys
    // u' = (1 + dt/2 L) / (1 - dt/2 L) * u; compare against that formula
    // computed independently per wavenumber
    StepOptions opt;
    opt.disable_nonlinear = true;
    for (PdeSpec spec : {PdeSpec(Ns2d{1e-2}), PdeSpec(Burgers{100.0}), PdeSpec(Kdv{})}) {
        auto g = grid_for(spec, 32);
        Rng rng(3);
        Field u0 = sample_grf(g, grf_for(g.dims), rng);
        double dt = 0.05;
        Field u1 = cn_step(u0, Field(g), spec, dt, opt);

        Spectrum before = forward(u0);
        Spectrum after = forward(u1);
        std::vector<cplx> sym = linear_symbol(spec, g);
        double worst = 0.0;
        for (std::size_t k = 0; k < sym.size(); ++k) {
            cplx expected =
                before.coeff[k] * (1.0 + 0.5 * dt * sym[k]) / (1.0 - 0.5 * dt * sym[k]);
            worst = std::max(worst, std::abs(after.coeff[k] - expected));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("solve_trajectory composes cn_step") {
    auto g = make_grid(1, 64);
    Rng rng(9);
    Field ic = sample_grf(g, grf_for(1), rng);
    PdeSpec spec = Burgers{1000.0};

    Trajectory t = solve_trajectory(spec, ic, Field(g), 1, 1e-3);
    REQUIRE(t.frame_count() == 2);
    CHECK(t.frames[0].values == ic.values);
    CHECK(t.frames[1].values == cn_step(ic, Field(g), spec, 1e-3).values);

    // stride bookkeeping: frame j equals the state after j*stride steps
    Trajectory strided = solve_trajectory(spec, ic, Field(g), 6, 1e-3, 2);
    REQUIRE(strided.frame_count() == 4);
    CHECK(strided.dt == 2e-3);
    Field state = ic;
    for (int s = 1; s <= 6; ++s) {
        state = cn_step(state, Field(g), spec, 1e-3);
        if (s % 2 == 0) CHECK(strided.frames[s / 2].values == state.values);
    }

    CHECK_THROWS_AS(solve_trajectory(spec, ic, Field(g), 5, 1e-3, 2), InvalidArgument);
}

TEST_CASE("trajectories are deterministic") {
    auto g = make_grid(2, 32);
    Rng rng(11);
    Field ic = sample_grf(g, grf_for(2), rng);
    Field f = sample_grf(g, grf_for(2), rng);
    Trajectory a = solve_trajectory(Ns2d{1e-4}, ic, f, 50, 1e-2, 10);
    Trajectory b = solve_trajectory(Ns2d{1e-4}, ic, f, 50, 1e-2, 10);
    REQUIRE(a.frame_count() == b.frame_count());
    for (int m = 0; m < a.frame_count(); ++m) CHECK(a.frames[m].values == b.frames[m].values);
}

TEST_CASE("self-convergence is at least first order") {
    // halving dt should shrink the self-difference by >= 1.8 on smooth data
    auto check_convergence = [](const PdeSpec& spec, const SpatialGrid& g, const Field& ic,
                                const Field& f, double dt, long steps) {
        Trajectory c1 = solve_trajectory(spec, ic, f, steps, dt);
        Trajectory c2 = solve_trajectory(spec, ic, f, steps * 2, dt / 2);
        Trajectory c3 = solve_trajectory(spec, ic, f, steps * 4, dt / 4);
        double e1 = max_abs(c1.frames.back() - c2.frames.back());
        double e2 = max_abs(c2.frames.back() - c3.frames.back());
        return e1 / e2;
    };

    auto g1 = make_grid(1, 64);
    Field smooth(g1);
    for (int i = 0; i < g1.n; ++i) {
        double x = i * g1.spacing();
        smooth(i) = std::sin(kTwoPi * x) + 0.5 * std::cos(2 * kTwoPi * x);
    }
    CHECK(check_convergence(Burgers{1000.0}, g1, smooth, Field(g1), 5e-3, 40) >= 1.8);

    auto gk = make_grid(1, 64, kTwoPi);
    Field smooth_k(gk);
    for (int i = 0; i < gk.n; ++i) smooth_k(i) = 0.5 * std::cos(i * gk.spacing());
    CHECK(check_convergence(Kdv{}, gk, smooth_k, Field(gk), 1e-2, 40) >= 1.8);

    auto g2 = make_grid(2, 32);
    Rng rng(21);
    Field w0 = sample_grf(g2, GrfParams{7.0, 3.5, 10.0}, rng); // smooth draw
    CHECK(check_convergence(Ns2d{1e-2}, g2, w0, Field(g2), 1e-2, 20) >= 1.8);
}

TEST_CASE("kdv conserves the spatial mean") {
    auto g = make_grid(1, 128, kTwoPi);
    Rng rng(31);
    Field ic = sample_grf(g, GrfParams{5.0, 2.5, 1.0}, rng);
    for (auto& v : ic.values) v += 0.25; // non-zero mean
    Trajectory t = solve_trajectory(Kdv{0.0, -0.5, -1.0}, ic, Field(g), 1000, 1e-3, 1000);
    CHECK(std::abs(mean(t.frames.back()) - mean(ic)) <= 1e-10);
}

TEST_CASE("blow-up aborts with the failing step index") {
    auto g = make_grid(1, 64);
    Rng rng(41);
    Field ic = sample_grf(g, grf_for(1), rng);
    StepOptions opt;
    opt.blowup_cap = max_abs(ic) * 0.5; // force an immediate trip
    try {
        solve_trajectory(Burgers{1000.0}, ic, Field(g), 10, 1e-3, 1, opt);
        FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
        CHECK(e.step == 1);
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
}

TEST_CASE("conservative and convective advection converge to each other") {
    auto g = make_grid(2, 32);
    Rng rng(51);
    Field w0 = sample_grf(g, GrfParams{7.0, 3.5, 10.0}, rng);
    PdeSpec spec = Ns2d{1e-2};
    StepOptions conv, cons;
    cons.conservative_advection = true;
    double dt = 2e-3;
    long steps = 50;
    Trajectory a = solve_trajectory(spec, w0, Field(g), steps, dt, steps, conv);
    Trajectory b = solve_trajectory(spec, w0, Field(g), steps, dt, steps, cons);
    Trajectory a2 = solve_trajectory(spec, w0, Field(g), steps * 2, dt / 2, steps * 2, conv);
    Trajectory b2 = solve_trajectory(spec, w0, Field(g), steps * 2, dt / 2, steps * 2, cons);
    double gap1 = max_abs(a.frames.back() - b.frames.back());
    double gap2 = max_abs(a2.frames.back() - b2.frames.back());
    CHECK(gap2 < gap1); // the two forms agree in the dt -> 0 limit
}

TEST_CASE("argument validation") {
    auto g = make_grid(1, 64);
    Field u(g);
    CHECK_THROWS_AS(cn_step(u, u, Ns2d{1e-4}, 1e-3), InvalidArgument); // dims mismatch
    CHECK_THROWS_AS(cn_step(u, u, Burgers{-1.0}, 1e-3), InvalidArgument);
    CHECK_THROWS_AS(cn_step(u, u, Burgers{1000.0}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(cn_step(u, Field(make_grid(1, 32)), Burgers{1000.0}, 1e-3),
                    InvalidArgument);
}
