#pragma once

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "hopss/pipeline.hpp"

// Self-describing binary dataset container, format "HOPSSDS1".
//
// Layout (little-endian throughout):
//   bytes 0..7   magic "HOPSSDS1"
//   bytes 8..11  u32 manifest byte length
//   manifest     canonical JSON (sorted keys, no insignificant whitespace)
//   payload      per sample: `frames` trajectory fields then
//                `forcing_frames` forcing fields, each field as 64-bit
//                IEEE doubles in [frame, x(, y)] row-major order, no padding
//   trailer      u64 sample count (truncation sentinel)
//
// The manifest carries every parameter needed to regenerate the payload
// bit-exactly, including the master seed, the per-sample provenance and
// the full generation config.

namespace hopss {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON conversions
// ---------------------------------------------------------------------------

inline json to_json(const PdeSpec& spec) {
    if (auto* ns = std::get_if<Ns2d>(&spec)) return {{"kind", "ns2d"}, {"nu", ns->nu}};
    if (auto* bu = std::get_if<Burgers>(&spec))
        return {{"kind", "burgers"}, {"reynolds", bu->reynolds}};
    const auto& kdv = std::get<Kdv>(spec);
    return {{"kind", "kdv"},
            {"lambda", kdv.lambda_adv},
            {"alpha", kdv.alpha_nl},
            {"beta", kdv.beta_disp}};
}

inline PdeSpec pde_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "ns2d") return Ns2d{j.at("nu").get<double>()};
    if (kind == "burgers") return Burgers{j.at("reynolds").get<double>()};
    if (kind == "kdv")
        return Kdv{j.at("lambda").get<double>(), j.at("alpha").get<double>(),
                   j.at("beta").get<double>()};
    throw FormatError("unknown pde kind in manifest: " + kind);
}

inline json to_json(const SpatialGrid& g) {
    return {{"dims", g.dims}, {"n", g.n}, {"length", g.length}};
}

inline SpatialGrid grid_from_json(const json& j) {
    return make_grid(j.at("dims").get<int>(), j.at("n").get<int>(),
                     j.at("length").get<double>());
}

inline json to_json(const GrfParams& p) {
    return {{"tau", p.tau}, {"alpha", p.alpha}, {"sigma", p.sigma}};
}

inline GrfParams grf_from_json(const json& j) {
    return GrfParams{j.at("tau").get<double>(), j.at("alpha").get<double>(),
                     j.at("sigma").get<double>()};
}

inline json to_json(const NoiseSpec& s) {
    json j{{"kind", to_string(s.kind)},
           {"epsilon", s.epsilon},
           {"k_modes", s.k_modes},
           {"cells", s.cells},
           {"amplitude_mode", s.sigma_abs ? "absolute" : "relative"}};
    if (s.sigma_abs) j["sigma_abs"] = *s.sigma_abs;
    return j;
}

inline NoiseSpec noise_from_json(const json& j) {
    NoiseSpec s;
    s.kind = noise_kind_from_string(j.at("kind").get<std::string>());
    s.epsilon = j.at("epsilon").get<double>();
    s.k_modes = j.at("k_modes").get<int>();
    s.cells = j.at("cells").get<int>();
    if (j.contains("sigma_abs")) s.sigma_abs = j.at("sigma_abs").get<double>();
    return s;
}

inline json to_json(const Provenance& p) {
    switch (p.kind) {
        case Provenance::Kind::base:
            return {{"kind", "base"}, {"seed", p.seed}};
        case Provenance::Kind::hopss:
            return {{"kind", "hopss"}, {"i", p.i}, {"j", p.j}, {"seed", p.seed}};
        case Provenance::Kind::mixup:
            return {{"kind", "mixup"}, {"seed", p.seed}};
    }
    throw FormatError("bad provenance kind");
}

inline Provenance provenance_from_json(const json& j) {
    Provenance p;
    std::string kind = j.at("kind").get<std::string>();
    p.seed = j.at("seed").get<std::uint64_t>();
    if (kind == "base") {
        p.kind = Provenance::Kind::base;
    } else if (kind == "hopss") {
        p.kind = Provenance::Kind::hopss;
        p.i = j.at("i").get<int>();
        p.j = j.at("j").get<int>();
    } else if (kind == "mixup") {
        p.kind = Provenance::Kind::mixup;
    } else {
        throw FormatError("unknown provenance kind: " + kind);
    }
    return p;
}

inline json to_json(const BaseRecipe& r, std::uint64_t seed) {
    return {{"method", "tradition"},
            {"seed", seed},
            {"fine", {{"n", r.fine_n},
                      {"length", r.length},
                      {"dt", r.dt},
                      {"steps", r.steps},
                      {"record_stride", r.record_stride},
                      {"coarsen", r.coarsen}}},
            {"grf_forcing", to_json(r.forcing_grf)},
            {"grf_ic", to_json(r.ic_grf)},
            {"forcing_storage", r.store_raw_forcing ? "raw" : "residual"},
            {"blowup_cap", r.step.blowup_cap}};
}

inline BaseRecipe recipe_from_json(const json& gen, const PdeSpec& pde) {
    BaseRecipe r;
    r.pde = pde;
    const json& fine = gen.at("fine");
    r.fine_n = fine.at("n").get<int>();
    r.length = fine.at("length").get<double>();
    r.dt = fine.at("dt").get<double>();
    r.steps = fine.at("steps").get<long>();
    r.record_stride = fine.at("record_stride").get<long>();
    r.coarsen = fine.at("coarsen").get<int>();
    r.forcing_grf = grf_from_json(gen.at("grf_forcing"));
    r.ic_grf = grf_from_json(gen.at("grf_ic"));
    r.store_raw_forcing = gen.at("forcing_storage").get<std::string>() == "raw";
    r.step.blowup_cap = gen.at("blowup_cap").get<double>();
    return r;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

inline std::string utc_timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct DatasetManifest {
    int format_version = 1;
    PdeSpec pde;
    SpatialGrid grid;       // training grid
    double dt_coarse = 0.0; // training time step
    int frames = 0;         // trajectory frames per sample
    int forcing_frames = 0; // forcing fields per sample
    std::uint64_t sample_count = 0;
    std::string created_utc;
    json generation; // method plus its full config
    std::vector<Provenance> samples;

    /// Canonical serialization: sorted keys, no insignificant whitespace.
    std::string to_canonical_json() const {
        json j{{"format_version", format_version},
               {"pde", to_json(pde)},
               {"grid", to_json(grid)},
               {"dt_coarse", dt_coarse},
               {"frames", frames},
               {"forcing_frames", forcing_frames},
               {"sample_count", sample_count},
               {"created_utc", created_utc},
               {"generation", generation}};
        json samp = json::array();
        for (const auto& p : samples) samp.push_back(to_json(p));
        j["samples"] = std::move(samp);
        return j.dump();
    }

    static DatasetManifest from_json_text(const std::string& text) {
        json j;
        try {
            j = json::parse(text);
        } catch (const std::exception& e) {
            throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
        }
        DatasetManifest m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != 1)
            throw FormatError("unsupported format_version "
                              + std::to_string(m.format_version));
        m.pde = pde_from_json(j.at("pde"));
        m.grid = grid_from_json(j.at("grid"));
        m.dt_coarse = j.at("dt_coarse").get<double>();
        m.frames = j.at("frames").get<int>();
        m.forcing_frames = j.at("forcing_frames").get<int>();
        m.sample_count = j.at("sample_count").get<std::uint64_t>();
        m.created_utc = j.at("created_utc").get<std::string>();
        m.generation = j.at("generation");
        for (const auto& e : j.at("samples")) m.samples.push_back(provenance_from_json(e));
        if (m.samples.size() != m.sample_count)
            throw FormatError("manifest sample list does not match sample_count");
        return m;
    }

    std::size_t payload_bytes_per_sample() const {
        return std::size_t(frames + forcing_frames) * grid.point_count() * 8;
    }
};

/// Exact size in bytes of a dataset file with this manifest text.
inline std::size_t expected_file_size(const DatasetManifest& m,
                                      const std::string& manifest_text) {
    return 8 + 4 + manifest_text.size() + m.sample_count * m.payload_bytes_per_sample() + 8;
}

// ---------------------------------------------------------------------------
// Binary I/O
// ---------------------------------------------------------------------------

namespace detail {

constexpr char kMagic[8] = {'H', 'O', 'P', 'S', 'S', 'D', 'S', '1'};

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xFF;
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xFF;
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_doubles(std::ostream& os, const RealArray& v) {
    static_assert(sizeof(double) == 8);
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(v.data()),
                 std::streamsize(v.size() * 8));
    } else {
        for (double d : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &d, 8);
            put_u64(os, bits);
        }
    }
}

inline std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
    return v;
}

inline std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
}

} // namespace detail

/// Streaming writer; samples are appended in index order and the sentinel
/// is written on close(). Writers are exclusive per file.
class DatasetWriter {
public:
    DatasetWriter(const std::string& path, const DatasetManifest& manifest,
                  const std::string& manifest_text_override = "")
        : manifest_(manifest), os_(path, std::ios::binary | std::ios::trunc) {
        if (!os_) throw IoError("cannot open dataset file for writing: " + path);
        std::string text = manifest_text_override.empty() ? manifest.to_canonical_json()
                                                          : manifest_text_override;
        os_.write(detail::kMagic, 8);
        detail::put_u32(os_, std::uint32_t(text.size()));
        os_.write(text.data(), std::streamsize(text.size()));
        if (!os_) throw IoError("write failure while emitting manifest: " + path);
        path_ = path;
    }

    ~DatasetWriter() {
        if (!closed_) {
            try {
                close();
            } catch (...) {
            }
        }
    }

    void write_sample(const SolutionPair& pair) {
        require(pair.u.frames.size() == std::size_t(manifest_.frames),
                "dataset write: sample frame count differs from manifest");
        require(pair.f.size() == std::size_t(manifest_.forcing_frames),
                "dataset write: forcing frame count differs from manifest");
        for (const Field& f : pair.u.frames) {
            require(f.grid == manifest_.grid, "dataset write: sample grid differs");
            detail::put_doubles(os_, f.values);
        }
        for (const Field& f : pair.f) {
            require(f.grid == manifest_.grid, "dataset write: forcing grid differs");
            detail::put_doubles(os_, f.values);
        }
        if (!os_) throw IoError("write failure while emitting sample payload: " + path_);
        ++written_;
    }

    void close() {
        if (closed_) return;
        closed_ = true;
        if (written_ != manifest_.sample_count)
            throw IoError("dataset write: " + std::to_string(written_)
                          + " samples written but manifest declares "
                          + std::to_string(manifest_.sample_count));
        detail::put_u64(os_, written_);
        os_.flush();
        if (!os_) throw IoError("write failure while emitting sentinel: " + path_);
        os_.close();
    }

private:
    DatasetManifest manifest_;
    std::ofstream os_;
    std::string path_;
    std::uint64_t written_ = 0;
    bool closed_ = false;
};

inline void write_dataset(const std::vector<SolutionPair>& pairs,
                          const DatasetManifest& manifest, const std::string& path) {
    require(pairs.size() == manifest.sample_count,
            "write_dataset: pair count differs from manifest sample_count");
    DatasetWriter w(path, manifest);
    for (const auto& p : pairs) w.write_sample(p);
    w.close();
}

struct Dataset {
    DatasetManifest manifest;
    std::string manifest_text; // verbatim bytes from the file
    std::vector<SolutionPair> pairs;
};

/// Read and validate a dataset file. Errors name the failing check and
/// the byte offset where it tripped.
inline Dataset read_dataset(const std::string& path, bool load_payload = true) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open dataset file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12)
        throw FormatError("file too short for header (" + std::to_string(bytes.size())
                          + " bytes, need 12): " + path);
    if (std::memcmp(bytes.data(), detail::kMagic, 8) != 0)
        throw FormatError("bad magic at byte offset 0 (expected HOPSSDS1): " + path);
    std::uint32_t mlen = detail::get_u32(bytes.data() + 8);
    std::size_t payload_off = 12 + std::size_t(mlen);
    if (bytes.size() < payload_off)
        throw FormatError("truncated manifest: file ends at byte "
                          + std::to_string(bytes.size()) + ", manifest ends at "
                          + std::to_string(payload_off));

    Dataset ds;
    ds.manifest_text.assign(reinterpret_cast<const char*>(bytes.data() + 12), mlen);
    ds.manifest = DatasetManifest::from_json_text(ds.manifest_text);
    const DatasetManifest& m = ds.manifest;

    std::size_t per_sample = m.payload_bytes_per_sample();
    std::size_t expect = payload_off + m.sample_count * per_sample + 8;
    if (bytes.size() != expect)
        throw FormatError("truncated or oversized payload: file is "
                          + std::to_string(bytes.size()) + " bytes, expected "
                          + std::to_string(expect) + " (sentinel check at byte "
                          + std::to_string(expect - 8) + "): " + path);
    std::uint64_t sentinel = detail::get_u64(bytes.data() + bytes.size() - 8);
    if (sentinel != m.sample_count)
        throw FormatError("sentinel mismatch at byte " + std::to_string(bytes.size() - 8)
                          + ": trailer says " + std::to_string(sentinel)
                          + " samples, manifest says " + std::to_string(m.sample_count));
    if (!load_payload) return ds;

    std::size_t pts = m.grid.point_count();
    auto read_field = [&](std::size_t off) {
        Field f(m.grid);
        if constexpr (std::endian::native == std::endian::little) {
            std::memcpy(f.values.data(), bytes.data() + off, pts * 8);
        } else {
            for (std::size_t i = 0; i < pts; ++i) {
                std::uint64_t bits = detail::get_u64(bytes.data() + off + i * 8);
                std::memcpy(&f.values[i], &bits, 8);
            }
        }
        if (!all_finite(f))
            throw FormatError("non-finite value in payload at byte offset "
                              + std::to_string(off) + ": " + path);
        return f;
    };

    ds.pairs.reserve(m.sample_count);
    std::size_t off = payload_off;
    for (std::uint64_t s = 0; s < m.sample_count; ++s) {
        SolutionPair p;
        p.u.t0 = 0.0;
        p.u.dt = m.dt_coarse;
        for (int fr = 0; fr < m.frames; ++fr, off += pts * 8)
            p.u.frames.push_back(read_field(off));
        for (int fr = 0; fr < m.forcing_frames; ++fr, off += pts * 8)
            p.f.push_back(read_field(off));
        p.provenance = m.samples[s];
        ds.pairs.push_back(std::move(p));
    }
    return ds;
}

/// Debugging aid: one CSV per sample, 1D datasets only. Each row is one
/// field (trajectory frames first, then forcing fields).
inline void export_csv(const Dataset& ds, const std::string& out_dir) {
    require(ds.manifest.grid.dims == 1, "csv export supports 1D datasets only");
    for (std::size_t s = 0; s < ds.pairs.size(); ++s) {
        char name[64];
        std::snprintf(name, sizeof(name), "/sample_%05zu.csv", s);
        std::ofstream os(out_dir + name);
        if (!os) throw IoError("cannot open csv file in " + out_dir);
        os << "# n=" << ds.manifest.grid.n << " frames=" << ds.manifest.frames
           << " forcing_frames=" << ds.manifest.forcing_frames
           << " dt=" << ds.manifest.dt_coarse << "\n";
        os.precision(17);
        auto row = [&](const Field& f) {
            for (std::size_t i = 0; i < f.size(); ++i)
                os << (i ? "," : "") << f.values[i];
            os << "\n";
        };
        for (const Field& f : ds.pairs[s].u.frames) row(f);
        for (const Field& f : ds.pairs[s].f) row(f);
        if (!os) throw IoError("write failure during csv export in " + out_dir);
    }
}

} // namespace hopss
