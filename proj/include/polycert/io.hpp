#ifndef POLYCERT_IO_HPP
#define POLYCERT_IO_HPP

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polycert/bundle.hpp"
#include "polycert/concentration.hpp"
#include "polycert/fan.hpp"
#include "polycert/polytope.hpp"

namespace polycert {

using Json = nlohmann::json;

inline long long checked_ll(const Int& v) {
    if (v < std::numeric_limits<long long>::min() || v > std::numeric_limits<long long>::max())
        throw std::overflow_error("io: integer too large to serialize");
    return static_cast<long long>(v);
}

inline Json ivec_json(const IntVec& v) {
    Json a = Json::array();
    for (const Int& x : v) a.push_back(checked_ll(x));
    return a;
}

inline Json ivecs_json(const std::vector<IntVec>& vs) {
    Json a = Json::array();
    for (const IntVec& v : vs) a.push_back(ivec_json(v));
    return a;
}

inline Json rvec_json(const RatVec& v) {
    Json a = Json::array();
    for (const Rat& x : v) a.push_back(coord_string(x));
    return a;
}

// Parsed polytope file: {"dim": n, "vertices": [[int, ...], ...]}, plus an
// optional "name" and optional boolean "annotations" (reflexive, smooth,
// centered).  Exact integers only; anything float-shaped is rejected.
struct PolytopeDocument {
    LatticePolytope polytope;
    std::string name;  // empty when the file names none
    std::optional<bool> reflexive;
    std::optional<bool> smooth;
    std::optional<bool> centered;
};

inline Json polytope_json(const LatticePolytope& P, const std::string& name) {
    Json doc;
    doc["dim"] = P.dim();
    doc["vertices"] = ivecs_json(P.vertices());
    if (!name.empty()) doc["name"] = name;
    return doc;
}

inline PolytopeDocument parse_polytope(const Json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("polytope json: document is not an object");
    if (!doc.contains("dim") || !doc["dim"].is_number_integer())
        throw std::invalid_argument("polytope json: missing integer dim");
    long long n = doc["dim"].get<long long>();
    if (n < 1) throw std::invalid_argument("polytope json: dim must be positive");
    if (!doc.contains("vertices") || !doc["vertices"].is_array() || doc["vertices"].empty())
        throw std::invalid_argument("polytope json: missing vertex array");
    std::vector<IntVec> vs;
    for (const Json& row : doc["vertices"]) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("polytope json: vertex of wrong dimension");
        IntVec v;
        for (const Json& x : row) {
            if (!x.is_number_integer())
                throw std::invalid_argument(
                    "polytope json: vertex coordinates must be exact integers");
            v.push_back(Int(x.get<long long>()));
        }
        vs.push_back(v);
    }
    PolytopeDocument out{LatticePolytope(vs), "", std::nullopt, std::nullopt, std::nullopt};
    if (doc.contains("name")) {
        if (!doc["name"].is_string())
            throw std::invalid_argument("polytope json: name must be a string");
        out.name = doc["name"].get<std::string>();
    }
    if (doc.contains("annotations")) {
        const Json& a = doc["annotations"];
        if (!a.is_object())
            throw std::invalid_argument("polytope json: annotations must be an object");
        auto flag = [&](const char* key) -> std::optional<bool> {
            if (!a.contains(key)) return std::nullopt;
            if (!a[key].is_boolean())
                throw std::invalid_argument(std::string("polytope json: annotation ") + key +
                                            " must be a boolean");
            return a[key].get<bool>();
        };
        out.reflexive = flag("reflexive");
        out.smooth = flag("smooth");
        out.centered = flag("centered");
    }
    return out;
}

inline PolytopeDocument parse_polytope_text(const std::string& text) {
    return parse_polytope(Json::parse(text));
}

inline Json linear_subspace_json(const LinearSubspace& s) {
    Json j;
    j["dim"] = s.dim();
    j["basis"] = ivecs_json(s.rows());
    return j;
}

inline Json affine_subspace_json(const AffineSubspace& s) {
    Json j;
    j["dim"] = s.dim();
    j["base"] = rvec_json(s.base());
    j["dirs"] = ivecs_json(s.dirs().rows());
    return j;
}

inline Json report_json(const ConcentrationReport& r) {
    Json j;
    j["mode"] = to_string(r.mode);
    j["ambient_dim"] = r.ambient_dim;
    j["rhs"] = rat_string(r.rhs);
    j["hypotheses_met"] = r.hypotheses_met;
    j["overall"] = to_string(r.overall);
    Json recs = Json::array();
    for (const ConcentrationRecord& rec : r.records) {
        Json e;
        e["dim"] = rec.dim;
        if (rec.affine) e["subspace"] = affine_subspace_json(*rec.affine);
        if (rec.linear) e["subspace"] = linear_subspace_json(*rec.linear);
        e["incident"] = rec.incident;
        e["lhs"] = rat_string(rec.lhs);
        e["status"] = to_string(rec.status);
        recs.push_back(e);
    }
    j["records"] = recs;
    Json pairs = Json::array();
    for (const auto& [a, b] : r.equality_pairs) pairs.push_back(Json::array({a, b}));
    j["equality_pairs"] = pairs;
    j["unpaired_equalities"] = r.unpaired_equalities;
    return j;
}

inline Json fan_json(const Fan& f) {
    Json j;
    j["dim"] = f.dim();
    j["rays"] = ivecs_json(f.rays());
    j["maximal_cones"] = f.maximal_cones();
    return j;
}

inline Json stability_json(const StabilityReport& stab) {
    Json j;
    j["verdict"] = to_string(stab.verdict);
    j["mu_total"] = rat_string(stab.mu_total);
    Json recs = Json::array();
    for (const StabilityRecord& r : stab.records) {
        Json e;
        e["subspace"] = linear_subspace_json(r.subspace);
        e["mu"] = rat_string(r.mu);
        recs.push_back(e);
    }
    j["records"] = recs;
    j["witnesses"] = stab.witnesses;
    return j;
}

inline Json bundle_json(const Fan& fan, const KlyachkoBundleData& data,
                        const StabilityReport& stab, const CompatibilityReport& compat,
                        bool with_cone_fan) {
    Json j;
    j["rank"] = data.rank;
    j["fan"] = fan_json(fan);
    Json fils = Json::array();
    for (const RayFiltration& f : data.filtrations) {
        Json steps = Json::array();
        for (const FiltrationStep& s : f.steps) {
            Json e;
            e["level"] = checked_ll(s.level);
            e["dim"] = s.subspace.dim();
            e["basis"] = ivecs_json(s.subspace.rows());
            steps.push_back(e);
        }
        fils.push_back(steps);
    }
    j["filtrations"] = fils;
    j["stability"] = stability_json(stab);
    j["compatibility"]["compatible"] = compat.compatible;
    if (compat.failing_cone) j["compatibility"]["failing_cone"] = *compat.failing_cone;
    if (with_cone_fan) j["cone_fan"] = fan_json(cone_fan(fan, false));
    return j;
}

// Self-contained analysis: the echoed input re-analyzes to the identical
// document.  The bundle section exists only for smooth inputs, where the
// canonical extension is defined.
inline Json analysis_json(const LatticePolytope& P, const std::string& name) {
    Json doc;
    doc["input"] = polytope_json(P, name);
    doc["reflexive"] = P.is_reflexive().reflexive;
    bool smooth = P.is_smooth().smooth;
    doc["smooth"] = smooth;
    doc["centered"] = P.is_centered();
    doc["normalized_volume"] = checked_ll(P.normalized_volume());
    doc["barycenter"] = rvec_json(P.barycenter());
    Json facets = Json::array();
    for (const Facet& f : P.facets()) {
        Json e;
        e["normal"] = ivec_json(f.normal);
        e["offset"] = checked_ll(f.offset);
        e["volume"] = checked_ll(f.lattice_volume);
        e["vertices"] = f.vertices;
        facets.push_back(e);
    }
    doc["facets"] = facets;
    doc["reports"]["affine"] = report_json(check_affine(P));
    doc["reports"]["linear"] = report_json(check_linear(P));
    doc["reports"]["lifted"] = report_json(check_lifted(P));
    if (smooth) {
        Fan fan = Fan::normal_fan(P);
        KlyachkoBundleData data = canonical_extension(fan);
        std::vector<Int> vols;
        for (const Facet& f : P.facets()) vols.push_back(f.lattice_volume);
        doc["bundle"] = stability_json(stability_verdict(data, vols));
    }
    return doc;
}

}  // namespace polycert

#endif
