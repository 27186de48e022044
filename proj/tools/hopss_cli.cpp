// Command-line front end: dataset generation (traditional solves,
// solution-space perturbation, mixup), verification, benchmarking and
// export around the HOPSSDS1 container.
//
// Exit codes: 0 success, 1 usage or file error, 2 numerical blow-up,
// 3 verification failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hopss/hopss.hpp"

namespace {

using hopss::json;

json load_config_json(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw hopss::IoError("cannot open config file: " + path);
    try {
        return json::parse(std::string((std::istreambuf_iterator<char>(is)),
                                       std::istreambuf_iterator<char>()));
    } catch (const std::exception& e) {
        throw hopss::InvalidArgument("config file is not valid JSON: " + std::string(e.what()));
    }
}

/// Value lookup with precedence: explicit flag > config file > default.
/// Config paths use '.' to descend into nested objects.
template <typename T>
T resolve(const CLI::Option* opt, const T& cli_value, const json& cfg, const std::string& path,
          const T& fallback) {
    if (opt && opt->count() > 0) return cli_value;
    const json* cur = &cfg;
    std::stringstream ss(path);
    std::string key;
    while (std::getline(ss, key, '.')) {
        if (!cur->is_object() || !cur->contains(key)) return fallback;
        cur = &cur->at(key);
    }
    return cur->get<T>();
}

int default_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

struct PdeDefaults {
    hopss::PdeSpec pde;
    int n;
    double length;
    double dt;
    long steps;
    long stride;
    int coarsen;
    hopss::GrfParams forcing;
    hopss::GrfParams ic;
};

/// Built-in generation recipes per equation. The 2D vorticity and 1D
/// viscous advection problems live on the unit interval/torus; the
/// dispersive-wave problem defaults to a 2*pi domain so its wavenumbers
/// are integers and the third-derivative symbol stays well conditioned.
PdeDefaults pde_defaults(const std::string& kind) {
    using namespace hopss;
    if (kind == "ns2d") {
        double fs = default_grf_sigma(2.0, 2.5, 2);
        double is = default_grf_sigma(7.0, 2.5, 2);
        return {Ns2d{1e-4}, 128, 1.0, 1e-3, 10000, 500, 2,
                GrfParams{2.0, 2.5, fs}, GrfParams{7.0, 2.5, is}};
    }
    if (kind == "burgers") {
        // initial amplitude kept a quarter of the forcing amplitude: the
        // explicit quadratic term is conditionally stable at dt = 5e-3 and
        // order-one initial states can cross the threshold
        return {Burgers{1000.0}, 1024, 1.0, 5e-3, 200, 10, 16,
                GrfParams{7.0, 2.5, 49.0}, GrfParams{7.0, 2.5, 12.25}};
    }
    if (kind == "kdv") {
        return {Kdv{0.0, -0.5, -1.0}, 512, 2.0 * M_PI, 1e-3, 10000, 500, 8,
                GrfParams{5.0, 2.5, 1.0}, GrfParams{5.0, 2.5, 1.0}};
    }
    throw hopss::InvalidArgument("unknown pde kind: " + kind + " (ns2d|burgers|kdv)");
}

struct RecipeFlags {
    std::string pde = "ns2d";
    int n = 0;
    double length = 0, dt = 0, nu = 0, reynolds = 0, lambda = 0, alpha = 0, beta = 0;
    long steps = 0, stride = 0;
    int coarsen = 0;
    double f_tau = 0, f_alpha = 0, f_sigma = 0, ic_tau = 0, ic_alpha = 0, ic_sigma = 0;
    std::string forcing_storage;
    double blowup_cap = 0;

    CLI::Option *o_pde{}, *o_n{}, *o_length{}, *o_dt{}, *o_nu{}, *o_reynolds{}, *o_lambda{},
        *o_alpha{}, *o_beta{}, *o_steps{}, *o_stride{}, *o_coarsen{}, *o_f_tau{}, *o_f_alpha{},
        *o_f_sigma{}, *o_ic_tau{}, *o_ic_alpha{}, *o_ic_sigma{}, *o_storage{}, *o_cap{};

    void attach(CLI::App* cmd) {
        o_pde = cmd->add_option("--pde", pde, "equation: ns2d | burgers | kdv");
        o_n = cmd->add_option("--n", n, "fine grid points per dimension");
        o_length = cmd->add_option("--length", length, "domain extent per dimension");
        o_dt = cmd->add_option("--dt", dt, "fine time step");
        o_nu = cmd->add_option("--nu", nu, "viscosity (ns2d)");
        o_reynolds = cmd->add_option("--reynolds", reynolds, "Reynolds number (burgers)");
        o_lambda = cmd->add_option("--lambda", lambda, "linear advection coefficient (kdv)");
        o_alpha = cmd->add_option("--alpha", alpha, "nonlinear coefficient (kdv)");
        o_beta = cmd->add_option("--beta", beta, "dispersion coefficient (kdv)");
        o_steps = cmd->add_option("--steps", steps, "fine steps to integrate");
        o_stride = cmd->add_option("--stride", stride, "record every this many steps");
        o_coarsen = cmd->add_option("--coarsen", coarsen, "spatial subsampling factor");
        o_f_tau = cmd->add_option("--f-tau", f_tau, "forcing GRF tau");
        o_f_alpha = cmd->add_option("--f-alpha", f_alpha, "forcing GRF alpha");
        o_f_sigma = cmd->add_option("--f-sigma", f_sigma, "forcing GRF sigma");
        o_ic_tau = cmd->add_option("--ic-tau", ic_tau, "initial-condition GRF tau");
        o_ic_alpha = cmd->add_option("--ic-alpha", ic_alpha, "initial-condition GRF alpha");
        o_ic_sigma = cmd->add_option("--ic-sigma", ic_sigma, "initial-condition GRF sigma");
        o_storage = cmd->add_option("--forcing-storage", forcing_storage,
                                    "stored forcing: residual (training-exact) | raw");
        o_cap = cmd->add_option("--blowup-cap", blowup_cap, "abort threshold on |u|");
    }

    hopss::BaseRecipe build(const json& cfg) const {
        using namespace hopss;
        std::string kind = resolve(o_pde, pde, cfg, "pde.kind", std::string("ns2d"));
        PdeDefaults d = pde_defaults(kind);
        BaseRecipe r;
        if (kind == "ns2d") {
            r.pde = Ns2d{resolve(o_nu, nu, cfg, "pde.nu", std::get<Ns2d>(d.pde).nu)};
        } else if (kind == "burgers") {
            r.pde = Burgers{resolve(o_reynolds, reynolds, cfg, "pde.reynolds",
                                    std::get<Burgers>(d.pde).reynolds)};
        } else {
            const auto& kd = std::get<Kdv>(d.pde);
            r.pde = Kdv{resolve(o_lambda, lambda, cfg, "pde.lambda", kd.lambda_adv),
                        resolve(o_alpha, alpha, cfg, "pde.alpha", kd.alpha_nl),
                        resolve(o_beta, beta, cfg, "pde.beta", kd.beta_disp)};
        }
        r.fine_n = resolve(o_n, n, cfg, "fine.n", d.n);
        r.length = resolve(o_length, length, cfg, "fine.length", d.length);
        r.dt = resolve(o_dt, dt, cfg, "fine.dt", d.dt);
        r.steps = resolve(o_steps, steps, cfg, "fine.steps", d.steps);
        r.record_stride = resolve(o_stride, stride, cfg, "fine.record_stride", d.stride);
        r.coarsen = resolve(o_coarsen, coarsen, cfg, "fine.coarsen", d.coarsen);
        r.forcing_grf.tau = resolve(o_f_tau, f_tau, cfg, "grf_forcing.tau", d.forcing.tau);
        r.forcing_grf.alpha =
            resolve(o_f_alpha, f_alpha, cfg, "grf_forcing.alpha", d.forcing.alpha);
        r.forcing_grf.sigma =
            resolve(o_f_sigma, f_sigma, cfg, "grf_forcing.sigma", d.forcing.sigma);
        r.ic_grf.tau = resolve(o_ic_tau, ic_tau, cfg, "grf_ic.tau", d.ic.tau);
        r.ic_grf.alpha = resolve(o_ic_alpha, ic_alpha, cfg, "grf_ic.alpha", d.ic.alpha);
        r.ic_grf.sigma = resolve(o_ic_sigma, ic_sigma, cfg, "grf_ic.sigma", d.ic.sigma);
        std::string storage = resolve(o_storage, forcing_storage, cfg, "forcing_storage",
                                      std::string("residual"));
        require(storage == "residual" || storage == "raw",
                "--forcing-storage must be residual or raw");
        r.store_raw_forcing = storage == "raw";
        r.step.blowup_cap = resolve(o_cap, blowup_cap, cfg, "blowup_cap", 1e8);
        return r;
    }
};

hopss::DatasetManifest base_manifest(const hopss::BaseRecipe& recipe, std::size_t count,
                                     std::uint64_t seed, const std::string& stamp) {
    using namespace hopss;
    DatasetManifest m;
    m.pde = recipe.pde;
    m.grid = make_grid(pde_dims(recipe.pde), recipe.fine_n / recipe.coarsen, recipe.length);
    m.dt_coarse = recipe.dt * double(recipe.record_stride);
    m.frames = int(recipe.steps / recipe.record_stride) + 1;
    m.forcing_frames = recipe.store_raw_forcing ? 1 : m.frames - 1;
    m.sample_count = count;
    m.created_utc = stamp.empty() ? utc_timestamp_now() : stamp;
    m.generation = to_json(recipe, seed);
    for (std::size_t s = 0; s < count; ++s)
        m.samples.push_back({Provenance::Kind::base, -1, -1, derive_stream(seed, s)});
    return m;
}

void progress(std::size_t done, std::size_t total) {
    if (total < 20 || done % (total / 10) == 0 || done == total)
        std::cerr << "  " << done << "/" << total << " samples\r" << std::flush;
}

// ---------------------------------------------------------------------------

int cmd_gen_base(const RecipeFlags& rf, const json& cfg, std::size_t count,
                 std::uint64_t seed, int threads, const std::string& out,
                 const std::string& stamp) {
    using namespace hopss;
    BaseRecipe recipe = rf.build(cfg);
    validate(recipe);
    require(!out.empty(), "gen-base: --out is required");
    DatasetManifest m = base_manifest(recipe, count, seed, stamp);
    DatasetWriter writer(out, m);
    generate_base_stream(recipe, count, seed, threads,
                         [&](std::size_t idx, SolutionPair&& p) {
                             writer.write_sample(p);
                             progress(idx + 1, count);
                         });
    writer.close();
    std::cerr << "\n";
    std::cout << "gen-base: wrote " << count << " samples (" << m.frames << " frames, grid "
              << m.grid.n << (m.grid.dims == 2 ? "^2" : "") << ", dt " << m.dt_coarse
              << ") to " << out << "\n";
    return 0;
}

int cmd_hopss(const std::string& base_path, const json& cfg, std::size_t count,
              const CLI::Option* o_mu, double mu_flag, const CLI::Option* o_noise,
              const std::string& noise_flag, const CLI::Option* o_eps, double eps_flag,
              const CLI::Option* o_sigma, double sigma_flag, const CLI::Option* o_kmodes,
              int kmodes_flag, const CLI::Option* o_cells, int cells_flag, std::uint64_t seed,
              int threads, const std::string& out, const std::string& stamp) {
    using namespace hopss;
    require(!base_path.empty(), "hopss: --base is required");
    require(!out.empty(), "hopss: --out is required");
    Dataset base = read_dataset(base_path);

    HopssConfig hc;
    hc.count = count;
    hc.mu = resolve(o_mu, mu_flag, cfg, "mu", 1e-3);
    hc.noise.kind = noise_kind_from_string(
        resolve(o_noise, noise_flag, cfg, "noise.kind", std::string("gaussian")));
    hc.noise.epsilon = resolve(o_eps, eps_flag, cfg, "noise.epsilon", 0.0);
    hc.noise.k_modes = resolve(o_kmodes, kmodes_flag, cfg, "noise.k_modes", 8);
    hc.noise.cells = resolve(o_cells, cells_flag, cfg, "noise.cells", 32);
    bool sigma_given = (o_sigma && o_sigma->count() > 0)
                       || (cfg.contains("noise") && cfg["noise"].contains("sigma_abs"));
    if (sigma_given) {
        hc.noise.sigma_abs = resolve(o_sigma, sigma_flag, cfg, "noise.sigma_abs", 1e-4);
    } else if (hc.noise.kind == NoiseKind::gaussian && hc.noise.epsilon == 0.0) {
        hc.noise.sigma_abs = 1e-4; // default gaussian scale when nothing is given
    }

    DatasetManifest m;
    m.pde = base.manifest.pde;
    m.grid = base.manifest.grid;
    m.dt_coarse = base.manifest.dt_coarse;
    m.frames = base.manifest.frames;
    m.forcing_frames = m.frames - 1; // rhs variation is per interval
    m.sample_count = count;
    m.created_utc = stamp.empty() ? utc_timestamp_now() : stamp;
    m.generation = {{"method", "hopss"},
                    {"seed", seed},
                    {"mu", hc.mu},
                    {"noise", to_json(hc.noise)},
                    {"base_count", base.pairs.size()},
                    {"base_generation", base.manifest.generation}};
    for (std::size_t s = 0; s < count; ++s) {
        std::uint64_t stream = derive_stream(seed, s);
        auto [i, j] = hopss_pair_indices(base.pairs.size(), stream);
        m.samples.push_back({Provenance::Kind::hopss, i, j, stream});
    }

    DatasetWriter writer(out, m);
    generate_hopss_stream(base.pairs, hc, m.pde, seed, threads,
                          [&](std::size_t idx, SolutionPair&& p) {
                              writer.write_sample(p);
                              progress(idx + 1, count);
                          });
    writer.close();
    std::cerr << "\n";
    std::cout << "hopss: wrote " << count << " samples (mu " << hc.mu << ", noise "
              << to_string(hc.noise.kind) << ") to " << out << "\n";
    return 0;
}

int cmd_mixup(const std::string& base_path, std::size_t count, std::uint64_t seed, int threads,
              const std::string& out, const std::string& stamp) {
    using namespace hopss;
    require(!base_path.empty(), "mixup: --base is required");
    require(!out.empty(), "mixup: --out is required");
    Dataset base = read_dataset(base_path);

    DatasetManifest m;
    m.pde = base.manifest.pde;
    m.grid = base.manifest.grid;
    m.dt_coarse = base.manifest.dt_coarse;
    m.frames = base.manifest.frames;
    m.forcing_frames = base.manifest.forcing_frames;
    m.sample_count = count;
    m.created_utc = stamp.empty() ? utc_timestamp_now() : stamp;
    m.generation = {{"method", "mixup"},
                    {"seed", seed},
                    {"base_count", base.pairs.size()},
                    {"base_generation", base.manifest.generation}};
    for (std::size_t s = 0; s < count; ++s)
        m.samples.push_back({Provenance::Kind::mixup, -1, -1, derive_stream(seed, s)});

    DatasetWriter writer(out, m);
    generate_mixup_stream(base.pairs, count, seed, threads,
                          [&](std::size_t idx, SolutionPair&& p) {
                              writer.write_sample(p);
                              progress(idx + 1, count);
                          });
    writer.close();
    std::cerr << "\n";
    std::cout << "mixup: wrote " << count << " samples to " << out << "\n";
    return 0;
}

int cmd_verify(const std::string& dataset_path, double tol, const std::string& base_path,
               const std::string& report_path, int threads) {
    using namespace hopss;
    require(!dataset_path.empty(), "verify: --dataset is required");
    Dataset ds = read_dataset(dataset_path);
    std::vector<SolutionPair> base_pairs;
    const std::vector<SolutionPair>* base = nullptr;
    if (!base_path.empty()) {
        Dataset b = read_dataset(base_path);
        if (ds.manifest.generation.contains("base_count"))
            require(b.pairs.size()
                        == ds.manifest.generation.at("base_count").get<std::size_t>(),
                    "verify: base file sample count does not match the dataset's base_count");
        base_pairs = std::move(b.pairs);
        base = &base_pairs;
    }
    VerifyReport rep = verify_dataset(ds.pairs, ds.manifest.pde, tol, base, threads);
    if (!report_path.empty()) {
        std::ofstream os(report_path);
        if (!os) throw IoError("verify: cannot open report file " + report_path);
        os << to_json(rep).dump() << "\n";
    }
    std::cout << "verify: " << rep.checked << " samples at tol " << tol << ", worst residual "
              << rep.worst_residual << ", worst relative " << rep.worst_rel_residual;
    if (rep.worst_consistency >= 0.0)
        std::cout << ", worst consistency delta " << rep.worst_consistency;
    std::cout << "\n";
    if (!rep.all_pass()) {
        std::cout << "verify: " << rep.failures << " of " << rep.checked
                  << " samples FAILED\n";
        return 3;
    }
    std::cout << "verify: all samples pass\n";
    return 0;
}

int cmd_bench(const RecipeFlags& rf, const json& cfg, std::size_t nb, std::size_t nnew,
              std::size_t ntrad, double mu, const std::string& sweep,
              std::size_t bases_per_point, std::size_t samples_per_point, int reps,
              std::uint64_t seed, int threads, const std::string& report_path) {
    using namespace hopss;
    BenchConfig bc;
    bc.recipe = rf.build(cfg);
    validate(bc.recipe);
    bc.n_base = nb;
    bc.n_new = nnew;
    bc.n_tradition = ntrad;
    bc.hopss.mu = mu;
    bc.seed = seed;
    bc.threads = threads;
    BenchResult res = run_benchmark(bc);
    std::cout << "bench: tradition " << res.tradition.sample_count << " samples in "
              << res.tradition.wall_seconds_total << " s ("
              << res.tradition.per_sample_seconds << " s/sample)\n";
    std::cout << "bench: hopss " << res.hopss.sample_count << " samples in "
              << res.hopss.wall_seconds_total << " s (base "
              << res.hopss.wall_seconds_base << " s + generation "
              << res.hopss.wall_seconds_generation << " s)\n";
    std::cout << "bench: speedup " << res.speedup
              << "x (hardware-bound; ratios are the meaningful output)\n";

    json out = to_json(res);
    if (!sweep.empty()) {
        ScalingConfig sc;
        sc.recipe = bc.recipe;
        std::stringstream ss(sweep);
        std::string tok;
        while (std::getline(ss, tok, ',')) sc.fine_steps.push_back(std::stol(tok));
        sc.bases_per_point = bases_per_point;
        sc.samples_per_point = samples_per_point;
        sc.reps = reps;
        sc.seed = seed;
        sc.threads = threads;
        ScalingResult sr = run_scaling(sc);
        std::cout << "bench: scaling over T {" << sweep << "}: perturbation-stage slope "
                  << sr.hopss_rel_slope * 100.0 << "% of mean, full-solve linearity dev "
                  << sr.tradition_linearity_dev * 100.0 << "%\n";
        out["scaling"] = to_json(sr);
    }
    if (!report_path.empty()) {
        std::ofstream os(report_path);
        if (!os) throw IoError("bench: cannot open report file " + report_path);
        os << out.dump() << "\n";
    }
    return 0;
}

int cmd_export(const std::string& dataset_path, const std::string& outdir,
               const std::string& format) {
    using namespace hopss;
    require(!dataset_path.empty(), "export: --dataset is required");
    require(!outdir.empty(), "export: --outdir is required");
    require(format == "csv", "export: csv is the only supported format");
    Dataset ds = read_dataset(dataset_path);
    export_csv(ds, outdir);
    std::cout << "export: wrote " << ds.pairs.size() << " csv files to " << outdir << "\n";
    return 0;
}

int cmd_regen(const std::string& manifest_path, const std::string& base_path,
              const std::string& out, int threads) {
    using namespace hopss;
    require(!manifest_path.empty(), "regen: --manifest is required");
    require(!out.empty(), "regen: --out is required");

    std::string text;
    {
        std::ifstream is(manifest_path, std::ios::binary);
        if (!is) throw IoError("regen: cannot open " + manifest_path);
        char head[8] = {};
        is.read(head, 8);
        is.seekg(0);
        if (is.gcount() == 8 && std::memcmp(head, "HOPSSDS1", 8) == 0) {
            text = read_dataset(manifest_path, /*load_payload=*/false).manifest_text;
        } else {
            text.assign((std::istreambuf_iterator<char>(is)),
                        std::istreambuf_iterator<char>());
        }
    }
    DatasetManifest m = DatasetManifest::from_json_text(text);
    std::string method = m.generation.at("method").get<std::string>();
    std::uint64_t seed = m.generation.at("seed").get<std::uint64_t>();
    DatasetWriter writer(out, m, text);
    auto sink = [&](std::size_t idx, SolutionPair&& p) {
        writer.write_sample(p);
        progress(idx + 1, m.sample_count);
    };
    if (method == "tradition") {
        BaseRecipe recipe = recipe_from_json(m.generation, m.pde);
        generate_base_stream(recipe, m.sample_count, seed, threads, sink);
    } else {
        require(!base_path.empty(), "regen: --base is required for " + method + " datasets");
        Dataset base = read_dataset(base_path);
        require(base.pairs.size() == m.generation.at("base_count").get<std::size_t>(),
                "regen: base file sample count does not match the manifest's base_count");
        if (method == "hopss") {
            HopssConfig hc;
            hc.mu = m.generation.at("mu").get<double>();
            hc.noise = noise_from_json(m.generation.at("noise"));
            hc.count = m.sample_count;
            generate_hopss_stream(base.pairs, hc, m.pde, seed, threads, sink);
        } else if (method == "mixup") {
            generate_mixup_stream(base.pairs, m.sample_count, seed, threads, sink);
        } else {
            throw FormatError("regen: unknown generation method " + method);
        }
    }
    writer.close();
    std::cerr << "\n";
    std::cout << "regen: wrote " << m.sample_count << " samples to " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-data synthesis for nonlinear temporal PDEs"};
    app.require_subcommand(1);

    // shared flags, attached per subcommand
    struct Common {
        std::uint64_t seed = 0;
        int threads = default_threads();
        std::string out, config, stamp;
    };
    auto add_common = [](CLI::App* cmd, Common& c, bool with_out = true) {
        cmd->add_option("--seed", c.seed, "master seed");
        cmd->add_option("--threads", c.threads,
                        "worker threads (output is identical for any value)");
        cmd->add_option("--config", c.config, "JSON config file (flags override it)");
        cmd->add_option("--stamp", c.stamp, "pin the manifest created_utc timestamp");
        if (with_out) cmd->add_option("--out", c.out, "output dataset file");
    };

    // gen-base
    auto* gen = app.add_subcommand("gen-base",
                                   "generate base/tradition pairs with the fine solver");
    Common gen_c;
    RecipeFlags gen_rf;
    std::size_t gen_count = 100;
    add_common(gen, gen_c);
    gen_rf.attach(gen);
    gen->add_option("--count", gen_count, "number of samples");

    // hopss
    auto* hop = app.add_subcommand("hopss", "generate perturbed pairs from a base dataset");
    Common hop_c;
    std::string hop_base;
    std::size_t hop_count = 1000;
    double hop_mu = 1e-3, hop_eps = 0.0, hop_sigma = 1e-4;
    std::string hop_noise = "gaussian";
    int hop_kmodes = 8, hop_cells = 32;
    add_common(hop, hop_c);
    hop->add_option("--base", hop_base, "base dataset file");
    hop->add_option("--count", hop_count, "number of samples");
    auto* o_mu = hop->add_option("--mu", hop_mu, "perturbation scalar");
    auto* o_noise = hop->add_option(
        "--noise", hop_noise, "noise kind: gaussian|multi_sine|perlin|random_walk|zero");
    auto* o_eps = hop->add_option("--epsilon", hop_eps, "relative noise amplitude");
    auto* o_sigma = hop->add_option(
        "--sigma", hop_sigma, "absolute gaussian noise standard deviation");
    auto* o_kmodes = hop->add_option("--k-modes", hop_kmodes, "multi_sine mode count");
    auto* o_cells = hop->add_option("--cells", hop_cells, "perlin lattice cells");

    // mixup
    auto* mix = app.add_subcommand("mixup", "generate mixup baseline pairs");
    Common mix_c;
    std::string mix_base;
    std::size_t mix_count = 1000;
    add_common(mix, mix_c);
    mix->add_option("--base", mix_base, "base dataset file");
    mix->add_option("--count", mix_count, "number of samples");

    // verify
    auto* ver = app.add_subcommand("verify", "check dataset physics consistency");
    Common ver_c;
    std::string ver_dataset, ver_base, ver_report;
    double ver_tol = 1e-8;
    add_common(ver, ver_c, false);
    ver->add_option("--dataset", ver_dataset, "dataset file to check");
    ver->add_option("--tol", ver_tol, "max-residual tolerance");
    ver->add_option("--base", ver_base, "base dataset (enables the consistency check)");
    ver->add_option("--report", ver_report, "write the per-sample JSON report here");

    // bench
    auto* ben = app.add_subcommand("bench", "time tradition vs perturbation generation");
    Common ben_c;
    RecipeFlags ben_rf;
    std::size_t ben_nb = 100, ben_nnew = 1000, ben_ntrad = 1000;
    std::size_t ben_bpp = 6, ben_spp = 200;
    int ben_reps = 3;
    double ben_mu = 1e-3;
    std::string ben_sweep, ben_report;
    add_common(ben, ben_c, false);
    ben_rf.attach(ben);
    ben->add_option("--nb", ben_nb, "base pairs for the perturbation route");
    ben->add_option("--nnew", ben_nnew, "perturbed samples");
    ben->add_option("--ntradition", ben_ntrad, "full-solve samples");
    ben->add_option("--mu", ben_mu, "perturbation scalar");
    ben->add_option("--t-sweep", ben_sweep,
                    "comma-separated fine step counts for the scaling study");
    ben->add_option("--bases-per-point", ben_bpp, "bases per sweep point");
    ben->add_option("--samples-per-point", ben_spp, "perturbed samples per sweep point");
    ben->add_option("--reps", ben_reps, "median-of-reps per measurement");
    ben->add_option("--report", ben_report, "write the JSON timing report here");

    // export
    auto* exp = app.add_subcommand("export", "dump 1D dataset samples as CSV");
    std::string exp_dataset, exp_outdir, exp_format = "csv";
    exp->add_option("--dataset", exp_dataset, "dataset file");
    exp->add_option("--outdir", exp_outdir, "directory for the CSV files");
    exp->add_option("--format", exp_format, "export format (csv)");

    // regen
    auto* reg = app.add_subcommand("regen", "rebuild a dataset from its manifest");
    Common reg_c;
    std::string reg_manifest, reg_base;
    add_common(reg, reg_c);
    reg->add_option("--manifest", reg_manifest, "dataset file or bare manifest JSON");
    reg->add_option("--base", reg_base, "base dataset (hopss/mixup manifests)");

    std::string stage = "parse";
    try {
        app.parse(argc, argv);
        if (gen->parsed()) {
            stage = "gen-base";
            return cmd_gen_base(gen_rf, load_config_json(gen_c.config), gen_count, gen_c.seed,
                                gen_c.threads, gen_c.out, gen_c.stamp);
        }
        if (hop->parsed()) {
            stage = "hopss";
            return cmd_hopss(hop_base, load_config_json(hop_c.config), hop_count, o_mu, hop_mu,
                             o_noise, hop_noise, o_eps, hop_eps, o_sigma, hop_sigma, o_kmodes,
                             hop_kmodes, o_cells, hop_cells, hop_c.seed, hop_c.threads,
                             hop_c.out, hop_c.stamp);
        }
        if (mix->parsed()) {
            stage = "mixup";
            return cmd_mixup(mix_base, mix_count, mix_c.seed, mix_c.threads, mix_c.out,
                             mix_c.stamp);
        }
        if (ver->parsed()) {
            stage = "verify";
            return cmd_verify(ver_dataset, ver_tol, ver_base, ver_report, ver_c.threads);
        }
        if (ben->parsed()) {
            stage = "bench";
            return cmd_bench(ben_rf, load_config_json(ben_c.config), ben_nb, ben_nnew,
                             ben_ntrad, ben_mu, ben_sweep, ben_bpp, ben_spp, ben_reps,
                             ben_c.seed, ben_c.threads, ben_report);
        }
        if (exp->parsed()) {
            stage = "export";
            return cmd_export(exp_dataset, exp_outdir, exp_format);
        }
        if (reg->parsed()) {
            stage = "regen";
            return cmd_regen(reg_manifest, reg_base, reg_c.out, reg_c.threads);
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage errors are exit 1, --help is 0
    } catch (const hopss::BlowUpError& e) {
        std::cerr << "error [" << stage << "]: " << e.what() << "\n";
        return 2;
    } catch (const hopss::Error& e) {
        std::cerr << "error [" << stage << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error [" << stage << "]: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
