#pragma once

// CSV and JSON encodings of the report types. CSV cells carry 17
// significant digits; JSON documents carry a top-level schema_version.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "kldiv/bounds.hpp"
#include "kldiv/conjectures.hpp"
#include "kldiv/core.hpp"
#include "kldiv/exact.hpp"
#include "kldiv/moments.hpp"
#include "kldiv/montecarlo.hpp"

namespace kldiv::io {

inline constexpr int kSchemaVersion = 1;

// %.17g, with inf/nan spelled as inf, -inf and nan.
inline std::string num17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Wraps a body object into a versioned document.
inline nlohmann::ordered_json document(const std::string& kind, nlohmann::ordered_json body) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = kind;
    for (auto& [key, value] : body.items()) doc[key] = value;
    return doc;
}

// Non-finite doubles become strings so that no information is lost to null.
inline nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return num17(v);
}

inline nlohmann::ordered_json to_json(const CategoricalDist& p) {
    return nlohmann::ordered_json(std::vector<double>(p.probs().begin(), p.probs().end()));
}

inline nlohmann::ordered_json to_json(const CountVector& x) {
    return nlohmann::ordered_json(std::vector<std::uint64_t>(x.counts().begin(), x.counts().end()));
}

inline CategoricalDist categorical_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw InvalidDistribution("distribution must be a JSON array of numbers");
    return CategoricalDist(j.get<std::vector<double>>());
}

inline CountVector counts_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw DimensionError("counts must be a JSON array of non-negative integers");
    for (const auto& v : j)
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw DomainError("counts must be non-negative integers");
    return CountVector(j.get<std::vector<std::uint64_t>>());
}

inline nlohmann::ordered_json to_json(const BoundReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["k"] = r.k;
    j["eps"] = r.eps;
    j["this_paper"] = r.this_paper;
    j["method_of_types"] = r.method_of_types;
    j["interpretable_mardia"] = r.interpretable_mardia ? nlohmann::ordered_json(*r.interpretable_mardia)
                                                       : nlohmann::ordered_json(nullptr);
    j["tightest"] = to_string(r.tightest);
    return j;
}

inline nlohmann::ordered_json to_json(const MomentReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["k"] = r.k;
    j["m"] = r.m;
    j["raw"] = json_number(r.raw_moment);
    j["central"] = json_number(r.central_moment);
    j["chi2_raw"] = json_number(r.chi2_target_raw);
    j["chi2_central"] = json_number(r.chi2_target_central);
    return j;
}

inline nlohmann::ordered_json to_json(const mc::McEstimate& e) {
    nlohmann::ordered_json j;
    j["point"] = e.point;
    j["ci_low"] = e.ci_low;
    j["ci_high"] = e.ci_high;
    j["samples"] = e.samples;
    j["seed"] = e.seed;
    return j;
}

inline nlohmann::ordered_json to_json(const ScanPoint& p) {
    nlohmann::ordered_json j;
    j["n"] = p.n;
    j["p"] = p.p;
    j["x"] = p.x;
    j["exact"] = json_number(p.exact);
    j["bound"] = json_number(p.bound);
    j["margin"] = json_number(p.margin);
    return j;
}

inline nlohmann::ordered_json to_json(const ScanResult& r) {
    nlohmann::ordered_json j;
    j["conjecture"] = r.conjecture;
    j["grid_spec"] = r.grid_spec;
    j["points"] = r.points;
    j["worst_margin"] = json_number(r.worst_margin);
    j["worst_point"] = to_json(r.worst_point);
    j["falsified"] = r.falsified();
    auto& ce = j["counterexamples"] = nlohmann::ordered_json::array();
    for (const auto& p : r.counterexamples) ce.push_back(to_json(p));
    j["tight_point_count"] = r.tight_points.size();
    auto& traj = j["worst_margin_by_n"] = nlohmann::ordered_json::array();
    for (const auto& [n, m] : r.worst_by_n) traj.push_back({{"n", n}, {"margin", json_number(m)}});
    return j;
}

inline void write_atoms_csv(std::ostream& os, const ExactDistribution& dist) {
    os << "value,prob\n";
    for (const Atom& a : dist.atoms) os << num17(a.value.nats) << ',' << num17(a.prob) << '\n';
}

inline constexpr const char* kMomentCsvHeader = "n,k,m,raw,central,chi2_raw,chi2_central";

inline void write_moment_row(std::ostream& os, const MomentReport& r) {
    os << r.n << ',' << r.k << ',' << r.m << ',' << num17(r.raw_moment) << ',' << num17(r.central_moment) << ','
       << num17(r.chi2_target_raw) << ',' << num17(r.chi2_target_central) << '\n';
}

inline constexpr const char* kMcCsvHeader = "n,k,eps_or_m,point,ci_low,ci_high,samples,seed";

inline void write_mc_row(std::ostream& os, std::uint64_t n, std::uint64_t k, double eps_or_m,
                         const mc::McEstimate& e) {
    os << n << ',' << k << ',' << num17(eps_or_m) << ',' << num17(e.point) << ',' << num17(e.ci_low) << ','
       << num17(e.ci_high) << ',' << e.samples << ',' << e.seed << '\n';
}

inline constexpr const char* kScanCsvHeader = "n,p,x,exact,bound,margin";

inline void write_scan_row(std::ostream& os, const ScanPoint& p) {
    os << p.n << ',' << num17(p.p) << ',' << num17(p.x) << ',' << num17(p.exact) << ',' << num17(p.bound) << ','
       << num17(p.margin) << '\n';
}

inline constexpr const char* kBoundCsvHeader = "n,k,eps,this_paper,method_of_types,interpretable_mardia,tightest";

inline void write_bound_row(std::ostream& os, const BoundReport& r) {
    os << r.n << ',' << r.k << ',' << num17(r.eps) << ',' << num17(r.this_paper) << ',' << num17(r.method_of_types)
       << ',' << (r.interpretable_mardia ? num17(*r.interpretable_mardia) : std::string()) << ','
       << to_string(r.tightest) << '\n';
}

}  // namespace kldiv::io
