#pragma once

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "hopss/pipeline.hpp"

// Wall-clock comparison of the two generation routes and the scaling study
// against the fine step count. Absolute seconds are hardware-bound; the
// meaningful outputs are the speedup ratio at matched sample counts and
// the fitted scaling behaviour, and the emitted report says so.

namespace hopss {

struct TimingReport {
    std::string method; // "tradition" | "hopss" | "mixup"
    std::size_t sample_count = 0;
    long fine_steps = 0;
    int coarse_frames = 0;
    int grid_n = 0;
    int grid_n_coarse = 0;
    double wall_seconds_total = 0.0;
    double wall_seconds_base = 0.0;
    double wall_seconds_generation = 0.0;
    double per_sample_seconds = 0.0;
};

inline nlohmann::json to_json(const TimingReport& r) {
    return {{"method", r.method},
            {"sample_count", r.sample_count},
            {"fine_steps", r.fine_steps},
            {"coarse_frames", r.coarse_frames},
            {"grid_n", r.grid_n},
            {"grid_n_coarse", r.grid_n_coarse},
            {"wall_seconds_total", r.wall_seconds_total},
            {"wall_seconds_base", r.wall_seconds_base},
            {"wall_seconds_generation", r.wall_seconds_generation},
            {"per_sample_seconds", r.per_sample_seconds}};
}

struct BenchConfig {
    BaseRecipe recipe;
    std::size_t n_base = 100;      // base pairs feeding the perturbation route
    std::size_t n_new = 1000;      // perturbed samples to generate
    std::size_t n_tradition = 1000; // full fine solves for the reference route
    // Full-solve samples to actually time (0 = all of n_tradition). The
    // samples are independent, so the total scales exactly linearly; the
    // report records how many were measured.
    std::size_t tradition_measure_cap = 0;
    HopssConfig hopss;
    std::uint64_t seed = 0;
    int threads = 1;
    bool warmup = true;
};

struct BenchResult {
    TimingReport tradition;
    TimingReport hopss;
    std::size_t tradition_measured = 0; // solves actually timed
    double speedup = 0.0;               // tradition total / hopss total
};

namespace detail {

inline double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

/// Touch FFTW planning and code paths once so timed runs start warm.
inline void bench_warmup(const BaseRecipe& recipe) {
    BaseRecipe r = recipe;
    r.steps = r.record_stride;
    make_base_pair(r, 0);
}

} // namespace detail

inline BenchResult run_benchmark(const BenchConfig& cfg) {
    validate(cfg.recipe);
    require(cfg.n_base >= 2 && cfg.n_new >= 1 && cfg.n_tradition >= 1,
            "bench: sample counts must be positive (n_base >= 2)");
    if (cfg.warmup) detail::bench_warmup(cfg.recipe);

    int frames = int(cfg.recipe.steps / cfg.recipe.record_stride) + 1;
    auto shape = [&](TimingReport& r) {
        r.fine_steps = cfg.recipe.steps;
        r.coarse_frames = frames;
        r.grid_n = cfg.recipe.fine_n;
        r.grid_n_coarse = cfg.recipe.fine_n / cfg.recipe.coarsen;
    };
    auto discard = [](std::size_t, SolutionPair&&) {};

    BenchResult out;
    out.tradition.method = "tradition";
    out.tradition.sample_count = cfg.n_tradition;
    shape(out.tradition);
    out.tradition_measured = cfg.tradition_measure_cap == 0
                                 ? cfg.n_tradition
                                 : std::min(cfg.tradition_measure_cap, cfg.n_tradition);
    double t0 = detail::now_seconds();
    generate_base_stream(cfg.recipe, out.tradition_measured, cfg.seed, cfg.threads, discard);
    double measured = detail::now_seconds() - t0;
    out.tradition.per_sample_seconds = measured / double(out.tradition_measured);
    out.tradition.wall_seconds_total =
        out.tradition.per_sample_seconds * double(cfg.n_tradition);
    out.tradition.wall_seconds_generation = out.tradition.wall_seconds_total;

    out.hopss.method = "hopss";
    out.hopss.sample_count = cfg.n_new;
    shape(out.hopss);
    std::uint64_t gen_seed = cfg.seed ^ 0x9E3779B97F4A7C15ull;
    double h0 = detail::now_seconds();
    std::vector<SolutionPair> base =
        generate_base_dataset(cfg.recipe, cfg.n_base, cfg.seed, cfg.threads);
    double h1 = detail::now_seconds();
    HopssConfig hcfg = cfg.hopss;
    hcfg.count = cfg.n_new;
    generate_hopss_stream(base, hcfg, cfg.recipe.pde, gen_seed, cfg.threads, discard);
    double h2 = detail::now_seconds();
    out.hopss.wall_seconds_base = h1 - h0;
    out.hopss.wall_seconds_generation = h2 - h1;
    out.hopss.wall_seconds_total = h2 - h0;
    out.hopss.per_sample_seconds = out.hopss.wall_seconds_total / double(cfg.n_new);

    out.speedup = out.tradition.wall_seconds_total / out.hopss.wall_seconds_total;
    return out;
}

inline nlohmann::json to_json(const BenchResult& r) {
    return {{"note", "absolute seconds are hardware-bound; compare ratios and scaling"},
            {"runs", nlohmann::json::array({to_json(r.tradition), to_json(r.hopss)})},
            {"tradition_measured_samples", r.tradition_measured},
            {"speedup", r.speedup}};
}

// ---------------------------------------------------------------------------
// Scaling study: per-sample cost against the fine step count T, holding the
// training-resolution shape fixed. The perturbation stage never touches the
// fine grid, so its per-sample cost should be flat in T while the full-solve
// cost grows linearly.
// ---------------------------------------------------------------------------

struct ScalingConfig {
    BaseRecipe recipe;             // steps/record_stride define the frame count
    std::vector<long> fine_steps;  // T values to sweep
    std::size_t bases_per_point = 6;
    std::size_t samples_per_point = 200;
    int reps = 3;                  // median-of-reps per measurement
    std::uint64_t seed = 0;
    int threads = 1;
};

struct ScalingPoint {
    long fine_steps = 0;
    double tradition_per_sample = 0.0;
    double hopss_gen_per_sample = 0.0;
};

struct ScalingResult {
    std::vector<ScalingPoint> points;
    // |slope| of hopss per-sample time vs T/mean(T), relative to mean time.
    double hopss_rel_slope = 0.0;
    // max relative deviation of tradition per-sample time / T from its mean.
    double tradition_linearity_dev = 0.0;
};

namespace detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

inline ScalingResult run_scaling(const ScalingConfig& cfg) {
    require(cfg.fine_steps.size() >= 2, "scaling: need at least two step counts");
    require(cfg.reps >= 1, "scaling: reps must be positive");
    long intervals = cfg.recipe.steps / cfg.recipe.record_stride;
    if (cfg.recipe.step.blowup_cap <= 0)
        throw InvalidArgument("scaling: bad blow-up cap");
    detail::bench_warmup(cfg.recipe);

    // Reps are interleaved across the step counts so slow drift in machine
    // throughput lands on every sweep point instead of tilting the fit.
    std::vector<std::vector<double>> trad_times(cfg.fine_steps.size());
    std::vector<std::vector<double>> gen_times(cfg.fine_steps.size());
    for (long T : cfg.fine_steps)
        require(T % intervals == 0,
                "scaling: every step count must be divisible by the frame interval count");
    for (int rep = 0; rep < cfg.reps; ++rep) {
        for (std::size_t pt = 0; pt < cfg.fine_steps.size(); ++pt) {
            BaseRecipe r = cfg.recipe;
            r.steps = cfg.fine_steps[pt];
            r.record_stride = r.steps / intervals;

            double t0 = detail::now_seconds();
            std::vector<SolutionPair> base =
                generate_base_dataset(r, cfg.bases_per_point, cfg.seed, cfg.threads);
            trad_times[pt].push_back((detail::now_seconds() - t0)
                                     / double(cfg.bases_per_point));

            HopssConfig hcfg;
            hcfg.count = cfg.samples_per_point;
            double g0 = detail::now_seconds();
            generate_hopss_stream(base, hcfg, r.pde, cfg.seed ^ 0x5851F42D4C957F2Dull,
                                  cfg.threads, [](std::size_t, SolutionPair&&) {});
            gen_times[pt].push_back((detail::now_seconds() - g0)
                                    / double(cfg.samples_per_point));
        }
    }
    ScalingResult out;
    for (std::size_t pt = 0; pt < cfg.fine_steps.size(); ++pt)
        out.points.push_back({cfg.fine_steps[pt], detail::median(trad_times[pt]),
                              detail::median(gen_times[pt])});

    // Normalized least-squares slope for the perturbation stage.
    double mean_t = 0.0, mean_y = 0.0;
    for (const auto& p : out.points) {
        mean_t += double(p.fine_steps);
        mean_y += p.hopss_gen_per_sample;
    }
    mean_t /= double(out.points.size());
    mean_y /= double(out.points.size());
    double num = 0.0, den = 0.0;
    for (const auto& p : out.points) {
        double x = double(p.fine_steps) / mean_t - 1.0;
        num += x * (p.hopss_gen_per_sample - mean_y);
        den += x * x;
    }
    out.hopss_rel_slope = std::abs(num / den) / mean_y;

    double mean_ratio = 0.0;
    for (const auto& p : out.points)
        mean_ratio += p.tradition_per_sample / double(p.fine_steps);
    mean_ratio /= double(out.points.size());
    for (const auto& p : out.points) {
        double dev = std::abs(p.tradition_per_sample / double(p.fine_steps) - mean_ratio)
                     / mean_ratio;
        out.tradition_linearity_dev = std::max(out.tradition_linearity_dev, dev);
    }
    return out;
}

inline nlohmann::json to_json(const ScalingResult& r) {
    auto pts = nlohmann::json::array();
    for (const auto& p : r.points)
        pts.push_back({{"fine_steps", p.fine_steps},
                       {"tradition_per_sample_seconds", p.tradition_per_sample},
                       {"hopss_gen_per_sample_seconds", p.hopss_gen_per_sample}});
    return {{"points", pts},
            {"hopss_rel_slope", r.hopss_rel_slope},
            {"tradition_linearity_dev", r.tradition_linearity_dev}};
}

} // namespace hopss
