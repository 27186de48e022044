#pragma once

#include <json.hpp>

#include "hopss/perturb.hpp"

// Physics-consistency check for datasets: recompute the discrete residual
// of every trajectory and compare it with the stored forcing. For
// perturbation-generated samples, the residual defect is expected to match
// the defect of the primary base pair to roundoff, so when the base set is
// available the difference of defects is checked as well.

namespace hopss {

struct SampleVerdict {
    std::size_t index = 0;
    double max_residual = 0.0;     // max |R(u) - f| over intervals and points
    double max_forcing = 0.0;      // max |f|
    double rel_residual = 0.0;     // max_residual / max(max_forcing, 1e-300)
    double consistency_delta = -1.0; // vs base defect; -1 when not checked
    bool pass = false;
};

struct VerifyReport {
    double tol = 0.0;
    std::size_t checked = 0;
    std::size_t failures = 0;
    double worst_residual = 0.0;
    double worst_rel_residual = 0.0;
    double worst_consistency = -1.0;
    std::vector<SampleVerdict> verdicts;

    bool all_pass() const { return failures == 0; }
};

/// Per-interval defect fields R(u)[m] - f[m].
inline std::vector<Field> residual_defect(const SolutionPair& pair, const PdeSpec& spec) {
    validate(pair);
    std::vector<Field> r = discrete_residual(pair.u, spec);
    for (std::size_t m = 0; m < r.size(); ++m) {
        const Field& f = pair.f.size() == 1 ? pair.f[0] : pair.f[m];
        for (std::size_t p = 0; p < r[m].size(); ++p) r[m].values[p] -= f.values[p];
    }
    return r;
}

inline SampleVerdict verify_sample(const SolutionPair& pair, const PdeSpec& spec, double tol,
                                   const std::vector<SolutionPair>* base = nullptr) {
    SampleVerdict v;
    std::vector<Field> defect = residual_defect(pair, spec);
    for (const Field& d : defect) v.max_residual = std::max(v.max_residual, max_abs(d));
    for (const Field& f : pair.f) v.max_forcing = std::max(v.max_forcing, max_abs(f));
    v.rel_residual = v.max_residual / std::max(v.max_forcing, 1e-300);
    v.pass = v.max_residual <= tol;

    if (base && pair.provenance.kind == Provenance::Kind::hopss) {
        int i = pair.provenance.i;
        require(i >= 0 && std::size_t(i) < base->size(),
                "verify: provenance index out of range for the supplied base set");
        std::vector<Field> base_defect = residual_defect((*base)[i], spec);
        require(base_defect.size() == defect.size(),
                "verify: base pair interval count differs");
        double delta = 0.0;
        for (std::size_t m = 0; m < defect.size(); ++m)
            delta = std::max(delta, max_abs(defect[m] - base_defect[m]));
        v.consistency_delta = delta;
        v.pass = v.pass && delta <= tol;
    }
    return v;
}

inline VerifyReport verify_dataset(const std::vector<SolutionPair>& pairs, const PdeSpec& spec,
                                   double tol, const std::vector<SolutionPair>* base = nullptr,
                                   int threads = 1) {
    require(tol > 0.0, "verify: tolerance must be positive");
    VerifyReport report;
    report.tol = tol;
    report.verdicts.resize(pairs.size());
    detail::parallel_ordered<SampleVerdict>(
        pairs.size(), threads,
        [&](std::size_t idx) {
            SampleVerdict v = verify_sample(pairs[idx], spec, tol, base);
            v.index = idx;
            return v;
        },
        [&](std::size_t idx, SampleVerdict&& v) { report.verdicts[idx] = std::move(v); });
    for (const auto& v : report.verdicts) {
        ++report.checked;
        if (!v.pass) ++report.failures;
        report.worst_residual = std::max(report.worst_residual, v.max_residual);
        report.worst_rel_residual = std::max(report.worst_rel_residual, v.rel_residual);
        report.worst_consistency = std::max(report.worst_consistency, v.consistency_delta);
    }
    return report;
}

inline nlohmann::json to_json(const VerifyReport& r, bool include_samples = true) {
    nlohmann::json j{{"tol", r.tol},
                     {"checked", r.checked},
                     {"failures", r.failures},
                     {"worst_residual", r.worst_residual},
                     {"worst_rel_residual", r.worst_rel_residual},
                     {"all_pass", r.all_pass()}};
    if (r.worst_consistency >= 0.0) j["worst_consistency"] = r.worst_consistency;
    if (include_samples) {
        auto arr = nlohmann::json::array();
        for (const auto& v : r.verdicts) {
            nlohmann::json e{{"index", v.index},
                             {"max_residual", v.max_residual},
                             {"rel_residual", v.rel_residual},
                             {"pass", v.pass}};
            if (v.consistency_delta >= 0.0) e["consistency_delta"] = v.consistency_delta;
            arr.push_back(std::move(e));
        }
        j["samples"] = std::move(arr);
    }
    return j;
}

} // namespace hopss
