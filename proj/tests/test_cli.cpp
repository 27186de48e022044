#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "hopss/dataset.hpp"

using namespace hopss;

namespace {

namespace fs = std::filesystem;

struct CliRunner {
    fs::path dir;
    CliRunner() {
        dir = fs::temp_directory_path() / ("hopss_cli_" + std::to_string(std::rand()));
        fs::create_directories(dir);
    }
    ~CliRunner() { fs::remove_all(dir); }

    std::string file(const std::string& name) const { return (dir / name).string(); }

    int run(const std::string& args) const {
        std::string cmd = std::string(HOPSS_CLI_PATH) + " " + args + " > "
                          + file("stdout.txt") + " 2> " + file("stderr.txt");
        int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    }

    std::string output() const {
        std::ifstream is(file("stdout.txt"));
        return std::string((std::istreambuf_iterator<char>(is)),
                           std::istreambuf_iterator<char>());
    }
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(is)),
                       std::istreambuf_iterator<char>());
}

const char* kBaseArgs = "gen-base --pde burgers --n 256 --steps 60 --stride 10 --coarsen 4 "
                        "--count 4 --seed 42 --stamp 2026-01-01T00:00:00Z";

} // namespace

TEST_CASE("generation, perturbation and verification round trip") {
    CliRunner cli;
    REQUIRE(cli.run(std::string(kBaseArgs) + " --out " + cli.file("base.hds")) == 0);

    Dataset base = read_dataset(cli.file("base.hds"));
    CHECK(base.manifest.grid.n == 64);
    CHECK(base.manifest.frames == 7);
    CHECK(base.manifest.generation.at("method") == "tradition");

    REQUIRE(cli.run("hopss --base " + cli.file("base.hds")
                    + " --count 9 --mu 1e-3 --noise gaussian --sigma 1e-4 --seed 7 "
                      "--stamp 2026-01-01T00:00:00Z --out "
                    + cli.file("train.hds"))
            == 0);
    Dataset train = read_dataset(cli.file("train.hds"));
    CHECK(train.pairs.size() == 9);
    CHECK(train.manifest.generation.at("noise").at("amplitude_mode") == "absolute");

    CHECK(cli.run("verify --dataset " + cli.file("train.hds") + " --tol 1e-8 --base "
                  + cli.file("base.hds"))
          == 0);
}

TEST_CASE("thread count does not change the output bytes") {
    CliRunner cli;
    REQUIRE(cli.run(std::string(kBaseArgs) + " --threads 1 --out " + cli.file("t1.hds"))
            == 0);
    REQUIRE(cli.run(std::string(kBaseArgs) + " --threads 8 --out " + cli.file("t8.hds"))
            == 0);
    CHECK(slurp(cli.file("t1.hds")) == slurp(cli.file("t8.hds")));

    REQUIRE(cli.run("hopss --base " + cli.file("t1.hds")
                    + " --count 6 --seed 3 --threads 1 --stamp 2026-01-01T00:00:00Z --out "
                    + cli.file("h1.hds"))
            == 0);
    REQUIRE(cli.run("hopss --base " + cli.file("t1.hds")
                    + " --count 6 --seed 3 --threads 8 --stamp 2026-01-01T00:00:00Z --out "
                    + cli.file("h8.hds"))
            == 0);
    CHECK(slurp(cli.file("h1.hds")) == slurp(cli.file("h8.hds")));
}

TEST_CASE("regen rebuilds files byte-identically") {
    CliRunner cli;
    REQUIRE(cli.run(std::string(kBaseArgs) + " --out " + cli.file("base.hds")) == 0);
    REQUIRE(cli.run("regen --manifest " + cli.file("base.hds") + " --out "
                    + cli.file("base2.hds"))
            == 0);
    CHECK(slurp(cli.file("base.hds")) == slurp(cli.file("base2.hds")));

    REQUIRE(cli.run("hopss --base " + cli.file("base.hds")
                    + " --count 5 --seed 11 --stamp 2026-01-01T00:00:00Z --out "
                    + cli.file("h.hds"))
            == 0);
    REQUIRE(cli.run("regen --manifest " + cli.file("h.hds") + " --base "
                    + cli.file("base.hds") + " --out " + cli.file("h2.hds"))
            == 0);
    CHECK(slurp(cli.file("h.hds")) == slurp(cli.file("h2.hds")));

    // regen of a perturbation dataset requires the base file
    CHECK(cli.run("regen --manifest " + cli.file("h.hds") + " --out "
                  + cli.file("h3.hds"))
          == 1);
}

TEST_CASE("mixup datasets fail verification while perturbed ones pass") {
    CliRunner cli;
    REQUIRE(cli.run("gen-base --pde ns2d --n 32 --dt 5e-3 --steps 100 --stride 20 "
                    "--coarsen 1 --count 4 --seed 5 --stamp 2026-01-01T00:00:00Z --out "
                    + cli.file("nsbase.hds"))
            == 0);
    REQUIRE(cli.run("mixup --base " + cli.file("nsbase.hds") + " --count 5 --seed 9 "
                    "--stamp 2026-01-01T00:00:00Z --out "
                    + cli.file("mix.hds"))
            == 0);
    CHECK(cli.run("verify --dataset " + cli.file("mix.hds") + " --tol 1e-8") == 3);

    REQUIRE(cli.run("hopss --base " + cli.file("nsbase.hds")
                    + " --count 5 --seed 13 --stamp 2026-01-01T00:00:00Z --out "
                    + cli.file("hp.hds"))
            == 0);
    CHECK(cli.run("verify --dataset " + cli.file("hp.hds") + " --tol 1e-8 --report "
                  + cli.file("report.json"))
          == 0);
    json rep = json::parse(slurp(cli.file("report.json")));
    CHECK(rep.at("all_pass") == true);
    CHECK(rep.at("checked") == 5);
}

TEST_CASE("config files provide defaults that flags override") {
    CliRunner cli;
    {
        std::ofstream cfg(cli.file("cfg.json"));
        cfg << R"({"pde":{"kind":"burgers","reynolds":1000.0},
                   "fine":{"n":256,"length":1.0,"dt":5e-3,"steps":60,
                           "record_stride":10,"coarsen":4}})";
    }
    REQUIRE(cli.run("gen-base --config " + cli.file("cfg.json")
                    + " --count 3 --seed 42 --stamp 2026-01-01T00:00:00Z --out "
                    + cli.file("a.hds"))
            == 0);
    Dataset a = read_dataset(cli.file("a.hds"), false);
    CHECK(a.manifest.grid.n == 64);
    CHECK(a.manifest.frames == 7);

    // flag overrides the config's coarsen
    REQUIRE(cli.run("gen-base --config " + cli.file("cfg.json")
                    + " --coarsen 2 --count 3 --seed 42 --stamp 2026-01-01T00:00:00Z --out "
                    + cli.file("b.hds"))
            == 0);
    Dataset b = read_dataset(cli.file("b.hds"), false);
    CHECK(b.manifest.grid.n == 128);
}

TEST_CASE("error paths use the documented exit codes") {
    CliRunner cli;
    CHECK(cli.run("gen-base --definitely-not-a-flag") == 1);
    CHECK(cli.run("verify --dataset " + cli.file("nope.hds")) == 1);

    // numerical blow-up surfaces as exit 2
    CHECK(cli.run("gen-base --pde burgers --n 64 --steps 10 --stride 1 --coarsen 1 "
                  "--count 1 --seed 1 --blowup-cap 1e-6 --out "
                  + cli.file("boom.hds"))
          == 2);

    // export is 1D-only
    REQUIRE(cli.run("gen-base --pde ns2d --n 16 --dt 1e-3 --steps 10 --stride 5 "
                    "--coarsen 1 --count 1 --seed 2 --out "
                    + cli.file("tiny2d.hds"))
            == 0);
    CHECK(cli.run("export --dataset " + cli.file("tiny2d.hds") + " --outdir "
                  + cli.dir.string())
          == 1);
}

TEST_CASE("export writes csv for 1D datasets") {
    CliRunner cli;
    REQUIRE(cli.run(std::string(kBaseArgs) + " --out " + cli.file("base.hds")) == 0);
    REQUIRE(cli.run("export --dataset " + cli.file("base.hds") + " --outdir "
                    + cli.dir.string())
            == 0);
    CHECK(fs::exists(cli.file("sample_00000.csv")));
    CHECK(fs::exists(cli.file("sample_00003.csv")));
}
