#include <catch2/catch_amalgamated.hpp>

#include "polycert/bundle.hpp"
#include "polycert/concentration.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

using namespace polycert;
using Catch::Matchers::ContainsSubstring;

namespace {

IntVec iv(std::initializer_list<long long> xs) {
    IntVec v;
    for (long long x : xs) v.push_back(Int(x));
    return v;
}

LatticePolytope make(std::initializer_list<std::initializer_list<long long>> pts) {
    std::vector<IntVec> vs;
    for (const auto& p : pts) vs.push_back(iv(p));
    return LatticePolytope(vs);
}

LatticePolytope fig1a() { return make({{-1, 2}, {2, -1}, {-1, -1}}); }
LatticePolytope fig1b() { return make({{0, 1}, {1, -1}, {-1, -1}}); }
LatticePolytope fig1c() { return make({{0, 1}, {1, 0}, {-1, -1}}); }
LatticePolytope square2() { return make({{-1, -1}, {1, -1}, {-1, 1}, {1, 1}}); }
LatticePolytope dp1() { return make({{-1, 0}, {0, -1}, {2, -1}, {-1, 2}}); }
LatticePolytope dp2() { return make({{-1, 0}, {0, -1}, {2, -1}, {0, 1}, {-1, 1}}); }
LatticePolytope hexagon() {
    return make({{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}});
}
LatticePolytope cube3() {
    return make({{-1, -1, -1},
                 {1, -1, -1},
                 {-1, 1, -1},
                 {1, 1, -1},
                 {-1, -1, 1},
                 {1, -1, 1},
                 {-1, 1, 1},
                 {1, 1, 1}});
}

std::vector<Int> facet_volumes(const LatticePolytope& P) {
    std::vector<Int> vols;
    for (const Facet& f : P.facets()) vols.push_back(f.lattice_volume);
    return vols;
}

IntVec lift(const IntVec& v) {
    IntVec w = v;
    w.push_back(-1);
    return w;
}

LinearSubspace line(std::size_t ambient, const IntVec& gen) {
    return LinearSubspace(ambient, std::vector<IntVec>{gen});
}

Rat rq(long long p, long long q) { return Rat(Int(p)) / Rat(Int(q)); }

// Filtration data produced by the canonical-extension formula on any complete
// fan, bypassing the smoothness guard of the guarded operation.
KlyachkoBundleData lifted_line_data(const Fan& fan) {
    std::vector<RayFiltration> fs;
    for (const IntVec& r : fan.rays()) {
        RayFiltration f;
        f.steps.push_back({Int(1), line(fan.dim() + 1, lift(r))});
        fs.push_back(f);
    }
    return KlyachkoBundleData(fan.dim() + 1, std::move(fs));
}

KlyachkoBundleData rank1_data(std::size_t ray_count, std::vector<long long> levels) {
    std::vector<RayFiltration> fs;
    for (std::size_t k = 0; k < ray_count; ++k) {
        RayFiltration f;
        f.steps.push_back({Int(levels[k]), full_space(1)});
        fs.push_back(f);
    }
    return KlyachkoBundleData(1, std::move(fs));
}

// Independent re-check of the classification condition: recover a character
// for every basis vector from the cone's rays alone, recompute its levels from
// that character, and compare the spans of the level-selected vectors against
// every filtration value.
void require_valid_decomposition(const Fan& fan, const KlyachkoBundleData& data,
                                 const ConeDecomposition& d) {
    const std::vector<std::size_t>& cone = fan.maximal_cones()[d.cone_index];
    std::size_t r = data.rank;
    REQUIRE(d.basis.size() == r);
    REQUIRE(d.levels.size() == r);
    IntMat B(r, r);
    for (std::size_t t = 0; t < r; ++t)
        for (std::size_t j = 0; j < r; ++j) B(t, j) = d.basis[t][j];
    REQUIRE(rank(B) == r);
    IntMat rays(cone.size(), fan.dim());
    for (std::size_t t = 0; t < cone.size(); ++t)
        for (std::size_t j = 0; j < fan.dim(); ++j) rays(t, j) = fan.rays()[cone[t]][j];
    for (std::size_t t = 0; t < r; ++t) {
        REQUIRE(d.levels[t].size() == cone.size());
        IntVec target(d.levels[t].begin(), d.levels[t].end());
        std::optional<IntVec> u = integer_solve(rays, target);
        REQUIRE(u.has_value());
        for (std::size_t j = 0; j < cone.size(); ++j) {
            Int pairing = dot(fan.rays()[cone[j]], *u);
            REQUIRE(pairing == d.levels[t][j]);
            const RayFiltration& f = data.filtrations[cone[j]];
            REQUIRE(filtration_at(f, pairing, r).contains(d.basis[t]));
            REQUIRE_FALSE(filtration_at(f, pairing + 1, r).contains(d.basis[t]));
        }
    }
    Int smin = data.filtrations[cone[0]].steps.front().level;
    Int smax = data.filtrations[cone[0]].steps.back().level;
    for (std::size_t j : cone) {
        smin = std::min(smin, data.filtrations[j].steps.front().level);
        smax = std::max(smax, data.filtrations[j].steps.back().level);
    }
    for (std::size_t j = 0; j < cone.size(); ++j) {
        const RayFiltration& f = data.filtrations[cone[j]];
        for (Int i = smin - 1; i <= smax + 1; ++i) {
            std::vector<IntVec> selected;
            for (std::size_t t = 0; t < r; ++t)
                if (d.levels[t][j] >= i) selected.push_back(d.basis[t]);
            LinearSubspace span(r, selected);
            LinearSubspace expected = filtration_at(f, i, r);
            REQUIRE(span == expected);
        }
    }
}

}  // namespace

TEST_CASE("normal fan pairs rays by facet incidence") {
    Fan fan = Fan::normal_fan(fig1a());
    REQUIRE(fan.dim() == 2);
    REQUIRE(fan.rays() ==
            std::vector<IntVec>{iv({-1, -1}), iv({0, 1}), iv({1, 0})});
    REQUIRE(fan.maximal_cones() ==
            std::vector<std::vector<std::size_t>>{{0, 2}, {0, 1}, {1, 2}});
    REQUIRE(fan.is_complete());
    REQUIRE(fan.smooth().smooth);

    Fan sq = Fan::normal_fan(square2());
    REQUIRE(sq.rays().size() == 4);
    REQUIRE(sq.maximal_cones().size() == 4);
    for (const auto& cone : sq.maximal_cones()) REQUIRE(cone.size() == 2);

    Fan cb = Fan::normal_fan(cube3());
    REQUIRE(cb.rays().size() == 6);
    REQUIRE(cb.maximal_cones().size() == 8);
    REQUIRE(cb.is_complete());
    REQUIRE(cb.smooth().smooth);
}

TEST_CASE("normal fan agrees with direct support evaluation on the corpus") {
    std::vector<LatticePolytope> shapes;
    shapes.push_back(fig1a());
    shapes.push_back(fig1b());
    shapes.push_back(fig1c());
    shapes.push_back(square2());
    shapes.push_back(dp1());
    shapes.push_back(dp2());
    shapes.push_back(hexagon());
    shapes.push_back(cube3());
    for (const LatticePolytope& P : shapes) {
        Fan fan = Fan::normal_fan(P);
        REQUIRE(fan.rays().size() == P.facets().size());
        for (std::size_t k = 0; k < P.facets().size(); ++k)
            REQUIRE(fan.rays()[k] == P.facets()[k].normal);
        REQUIRE(fan.maximal_cones().size() == P.vertices().size());
        for (std::size_t v = 0; v < P.vertices().size(); ++v) {
            std::vector<std::size_t> expected;
            for (std::size_t k = 0; k < P.facets().size(); ++k)
                if (dot(P.facets()[k].normal, P.vertices()[v]) == -P.facets()[k].offset)
                    expected.push_back(k);
            REQUIRE(fan.maximal_cones()[v] == expected);
        }
        REQUIRE(fan.is_complete());
        REQUIRE(fan.smooth().smooth == P.is_smooth().smooth);
    }
    REQUIRE(Fan::normal_fan(fig1b()).smooth().witness_cone == 0);
    REQUIRE(Fan::normal_fan(fig1c()).smooth().witness_cone == 0);
}

TEST_CASE("fan constructor rejects malformed input") {
    std::vector<IntVec> rays = {iv({1, 0}), iv({0, 1})};
    REQUIRE_THROWS_WITH(Fan(2, {iv({2, 0}), iv({0, 1})}, {{0, 1}}),
                        ContainsSubstring("not primitive"));
    REQUIRE_THROWS_WITH(Fan(2, {iv({1, 0}), iv({1, 0})}, {{0, 1}}),
                        ContainsSubstring("duplicate ray"));
    REQUIRE_THROWS_WITH(Fan(2, {iv({1, 0}), iv({-1, 0})}, {{0, 1}}),
                        ContainsSubstring("dependent"));
    REQUIRE_THROWS_WITH(Fan(2, rays, {{0, 1}, {0}}),
                        ContainsSubstring("contained in another"));
    REQUIRE_THROWS_WITH(Fan(2, rays, {{0}}), ContainsSubstring("unused ray"));
    REQUIRE_THROWS_WITH(Fan(2, rays, {{0, 2}}), ContainsSubstring("out of range"));
    REQUIRE_THROWS_WITH(Fan(2, rays, {{1, 0}}),
                        ContainsSubstring("not strictly increasing"));
    REQUIRE_THROWS_WITH(Fan(2, rays, {}), ContainsSubstring("no maximal cones"));
    REQUIRE_THROWS_WITH(Fan(2, {iv({1, 0}), iv({0, 1}), iv({0, -1})}, {{0, 1}, {0, 2}, {}}),
                        ContainsSubstring("empty cone"));
}

TEST_CASE("wall criterion detects incompleteness") {
    REQUIRE_FALSE(Fan(2, {iv({1, 0}), iv({0, 1})}, {{0, 1}}).is_complete());
    Fan three_quadrants(2, {iv({1, 0}), iv({0, 1}), iv({-1, 0}), iv({0, -1})},
                        {{0, 1}, {1, 2}, {2, 3}});
    REQUIRE_FALSE(three_quadrants.is_complete());
    Fan four_quadrants(2, {iv({1, 0}), iv({0, 1}), iv({-1, 0}), iv({0, -1})},
                       {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    REQUIRE(four_quadrants.is_complete());
    REQUIRE_FALSE(Fan(1, {iv({1})}, {{0}}).is_complete());
    REQUIRE(Fan(1, {iv({1}), iv({-1})}, {{0}, {1}}).is_complete());
}

TEST_CASE("cone fan lifts a complete base fan") {
    Fan base = Fan::normal_fan(fig1a());
    Fan yprime = cone_fan(base, false);
    REQUIRE(yprime.dim() == 3);
    REQUIRE(yprime.rays() == std::vector<IntVec>{iv({-1, -1, -1}), iv({0, 1, -1}),
                                                 iv({1, 0, -1}), iv({0, 0, 1})});
    REQUIRE(yprime.maximal_cones() ==
            std::vector<std::vector<std::size_t>>{{0, 2, 3}, {0, 1, 3}, {1, 2, 3}});
    REQUIRE(yprime.smooth().smooth);
    REQUIRE_FALSE(yprime.is_complete());

    auto census = cone_census(yprime);
    REQUIRE(census[0].size() == 1);
    REQUIRE(census[1].size() == 4);
    REQUIRE(census[2].size() == 6);
    REQUIRE(census[3].size() == 3);
    REQUIRE(census[1].count({3}) == 1);
    REQUIRE(census[2].count({0, 1}) == 1);
    REQUIRE(census[2].count({0, 2}) == 1);
    REQUIRE(census[2].count({1, 2}) == 1);

    Fan y = cone_fan(base, true);
    REQUIRE(y.maximal_cones().size() == 4);
    REQUIRE(y.maximal_cones().back() == std::vector<std::size_t>{0, 1, 2});
    REQUIRE(y.is_complete());
    SmoothFanReport ys = y.smooth();
    REQUIRE_FALSE(ys.smooth);
    REQUIRE(ys.witness_cone == 3);
    auto ycensus = cone_census(y);
    REQUIRE(ycensus[3].size() == 4);
    REQUIRE(ycensus[2].size() == 6);
    REQUIRE(ycensus[1].size() == 4);
    REQUIRE(ycensus[3].count({0, 1, 2}) == 1);
}

TEST_CASE("cone fan in the smallest dimension") {
    Fan base(1, {iv({1}), iv({-1})}, {{0}, {1}});
    Fan yprime = cone_fan(base, false);
    REQUIRE(yprime.rays() ==
            std::vector<IntVec>{iv({1, -1}), iv({-1, -1}), iv({0, 1})});
    REQUIRE(yprime.maximal_cones() ==
            std::vector<std::vector<std::size_t>>{{0, 2}, {1, 2}});
    REQUIRE(yprime.smooth().smooth);
    Fan y = cone_fan(base, true);
    REQUIRE(y.is_complete());
    REQUIRE_FALSE(y.smooth().smooth);
    REQUIRE(y.smooth().witness_cone == 2);
}

TEST_CASE("cone fan requires a complete base") {
    Fan incomplete(2, {iv({1, 0}), iv({0, 1})}, {{0, 1}});
    REQUIRE_THROWS_WITH(cone_fan(incomplete, false),
                        ContainsSubstring("cone fan requires complete fan"));
}

TEST_CASE("cone fan of a smooth complete base is smooth") {
    for (const LatticePolytope& P : {fig1a(), square2(), hexagon(), cube3()}) {
        Fan yprime = cone_fan(Fan::normal_fan(P), false);
        REQUIRE(yprime.smooth().smooth);
    }
    Fan yprime_b = cone_fan(Fan::normal_fan(fig1b()), false);
    REQUIRE_FALSE(yprime_b.smooth().smooth);
}

TEST_CASE("canonical extension builds one line filtration per ray") {
    Fan fan = Fan::normal_fan(fig1a());
    KlyachkoBundleData data = canonical_extension(fan);
    REQUIRE(data.rank == 3);
    REQUIRE(data.filtrations.size() == 3);
    std::vector<IntVec> expected_lines = {iv({-1, -1, -1}), iv({0, 1, -1}), iv({1, 0, -1})};
    for (std::size_t k = 0; k < 3; ++k) {
        const RayFiltration& f = data.filtrations[k];
        REQUIRE(f.steps.size() == 1);
        REQUIRE(f.steps[0].level == 1);
        REQUIRE(f.steps[0].subspace == line(3, expected_lines[k]));
        REQUIRE(filtration_at(f, -5, 3).dim() == 3);
        REQUIRE(filtration_at(f, 0, 3).dim() == 3);
        REQUIRE(filtration_at(f, 1, 3).dim() == 1);
        REQUIRE(filtration_at(f, 2, 3).dim() == 0);
        REQUIRE(filtration_at(f, 100, 3).dim() == 0);
    }
    auto profile = subspace_profile(data, full_space(3));
    for (std::size_t k = 0; k < 3; ++k) {
        REQUIRE(profile[k] == std::map<Int, std::size_t>{{Int(0), 2}, {Int(1), 1}});
    }
}

TEST_CASE("canonical extension refuses unsuitable fans") {
    REQUIRE_THROWS_WITH(canonical_extension(Fan::normal_fan(fig1b())),
                        ContainsSubstring("canonical extension requires smooth fan"));
    Fan incomplete(2, {iv({1, 0}), iv({0, 1})}, {{0, 1}});
    REQUIRE_THROWS_WITH(canonical_extension(incomplete),
                        ContainsSubstring("canonical extension requires complete fan"));
}

TEST_CASE("weighted degree evaluates level-weighted jumps") {
    Fan fan = Fan::normal_fan(fig1a());
    KlyachkoBundleData data = canonical_extension(fan);
    std::vector<Int> vols = facet_volumes(fig1a());
    REQUIRE(vols == std::vector<Int>{Int(3), Int(3), Int(3)});
    REQUIRE(weighted_degree(data, vols, full_space(3)) == Rat(3));
    REQUIRE(weighted_degree(data, vols, line(3, iv({1, 0, -1}))) == Rat(3));
    REQUIRE(weighted_degree(data, vols, line(3, iv({0, 0, 1}))) == Rat(0));
    REQUIRE_THROWS_WITH(weighted_degree(data, vols, LinearSubspace(3)),
                        ContainsSubstring("zero subspace"));
    REQUIRE_THROWS_WITH(weighted_degree(data, {Int(1)}, full_space(3)),
                        ContainsSubstring("volume count mismatch"));
    REQUIRE_THROWS_WITH(weighted_degree(data, {Int(3), Int(0), Int(3)}, full_space(3)),
                        ContainsSubstring("nonpositive volume"));
}

TEST_CASE("total slope equals total volume over rank for canonical data") {
    for (const LatticePolytope& P : {fig1a(), square2(), dp1(), dp2(), hexagon()}) {
        KlyachkoBundleData data = canonical_extension(Fan::normal_fan(P));
        std::vector<Int> vols = facet_volumes(P);
        Rat total = 0;
        for (const Int& v : vols) total += Rat(v);
        REQUIRE(weighted_degree(data, vols, full_space(P.dim() + 1)) ==
                total / Rat(Int(P.dim() + 1)));
    }
    KlyachkoBundleData data = canonical_extension(Fan::normal_fan(cube3()));
    REQUIRE(weighted_degree(data, facet_volumes(cube3()), full_space(4)) == Rat(12));
}

TEST_CASE("profile counts sum to the subspace dimension") {
    KlyachkoBundleData data = canonical_extension(Fan::normal_fan(cube3()));
    std::vector<LinearSubspace> subspaces = {
        full_space(4),
        line(4, iv({1, 0, 0, -1})),
        line(4, iv({0, 0, 0, 1})),
        LinearSubspace(4, std::vector<IntVec>{iv({1, 0, 0, -1}), iv({0, 1, 0, -1})}),
        LinearSubspace(4, std::vector<IntVec>{iv({1, 0, 0, -1}), iv({-1, 0, 0, -1}),
                                              iv({0, 1, 0, -1})}),
    };
    for (const LinearSubspace& F : subspaces) {
        auto profile = subspace_profile(data, F);
        for (const auto& jumps : profile) {
            std::size_t total = 0;
            for (const auto& [level, count] : jumps) total += count;
            REQUIRE(total == F.dim());
        }
    }
}

TEST_CASE("candidate slopes reduce to incident volume averages") {
    for (const LatticePolytope& P : {fig1a(), square2(), cube3()}) {
        KlyachkoBundleData data = canonical_extension(Fan::normal_fan(P));
        std::vector<Int> vols = facet_volumes(P);
        std::size_t m = P.facets().size();
        std::size_t rank = P.dim() + 1;
        std::vector<IntVec> lines;
        for (const Facet& f : P.facets()) lines.push_back(lift(f.normal));
        for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
            std::vector<IntVec> chosen;
            for (std::size_t t = 0; t < m; ++t)
                if (mask & (std::size_t(1) << t)) chosen.push_back(lines[t]);
            LinearSubspace F(rank, chosen);
            if (F.dim() >= rank) continue;
            Rat incident_total = 0;
            for (std::size_t t = 0; t < m; ++t)
                if (F.contains(lines[t])) incident_total += Rat(vols[t]);
            REQUIRE(weighted_degree(data, vols, F) == incident_total / Rat(Int(F.dim())));
        }
    }
}

TEST_CASE("the centered triangle extension is strictly semistable") {
    KlyachkoBundleData data = canonical_extension(Fan::normal_fan(fig1a()));
    StabilityReport r = stability_verdict(data, facet_volumes(fig1a()));
    REQUIRE(r.verdict == StabilityVerdict::strictly_semistable);
    REQUIRE(r.mu_total == Rat(3));
    REQUIRE(r.records.size() == 6);
    REQUIRE(r.records[1].subspace == line(3, iv({1, 0, -1})));
    REQUIRE(r.records[1].mu == Rat(3));
    REQUIRE(r.witnesses == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("the uncentered triangle data is unstable at the heavy line") {
    Fan fan = Fan::normal_fan(fig1b());
    KlyachkoBundleData data = lifted_line_data(fan);
    std::vector<Int> vols = facet_volumes(fig1b());
    REQUIRE(vols == std::vector<Int>{Int(1), Int(2), Int(1)});
    StabilityReport r = stability_verdict(data, vols);
    REQUIRE(r.verdict == StabilityVerdict::unstable);
    REQUIRE(r.mu_total == rq(4, 3));
    REQUIRE(r.witnesses == std::vector<std::size_t>{0});
    REQUIRE(r.records[0].subspace == line(3, iv({0, 1, -1})));
    REQUIRE(r.records[0].mu == Rat(2));
}

TEST_CASE("stability verdicts across the smooth corpus shapes") {
    StabilityReport cube = stability_verdict(canonical_extension(Fan::normal_fan(cube3())),
                                             facet_volumes(cube3()));
    REQUIRE(cube.verdict == StabilityVerdict::stable);
    REQUIRE(cube.mu_total == Rat(12));
    REQUIRE(cube.witnesses.empty());
    for (const StabilityRecord& rec : cube.records) REQUIRE(rec.mu < Rat(12));

    StabilityReport sq = stability_verdict(canonical_extension(Fan::normal_fan(square2())),
                                           facet_volumes(square2()));
    REQUIRE(sq.verdict == StabilityVerdict::stable);
    REQUIRE(sq.mu_total == rq(8, 3));
    REQUIRE(sq.witnesses.empty());

    StabilityReport hex = stability_verdict(canonical_extension(Fan::normal_fan(hexagon())),
                                            facet_volumes(hexagon()));
    REQUIRE(hex.verdict == StabilityVerdict::stable);
    REQUIRE(hex.mu_total == Rat(2));
}

TEST_CASE("rank one data is vacuously stable") {
    KlyachkoBundleData data = rank1_data(3, {2, -1, 3});
    StabilityReport r = stability_verdict(data, {Int(1), Int(1), Int(1)});
    REQUIRE(r.verdict == StabilityVerdict::stable);
    REQUIRE(r.records.empty());
    REQUIRE(r.witnesses.empty());
    REQUIRE(r.mu_total == Rat(4));
}

TEST_CASE("stability refuses filtrations with higher-dimensional proper steps") {
    std::vector<RayFiltration> fs;
    RayFiltration plane_step;
    plane_step.steps.push_back(
        {Int(1), LinearSubspace(3, std::vector<IntVec>{iv({1, 0, 0}), iv({0, 1, 0})})});
    fs.push_back(plane_step);
    RayFiltration line_step;
    line_step.steps.push_back({Int(1), line(3, iv({0, 0, 1}))});
    fs.push_back(line_step);
    KlyachkoBundleData data(3, fs);
    REQUIRE_THROWS_WITH(stability_verdict(data, {Int(1), Int(1)}),
                        ContainsSubstring("general filtration shapes unsupported"));
}

TEST_CASE("equalized volumes push the uncentered data to the semistable wall") {
    KlyachkoBundleData data = lifted_line_data(Fan::normal_fan(fig1b()));
    StabilityReport r = stability_verdict(data, {Int(1), Int(1), Int(1)});
    REQUIRE(r.verdict == StabilityVerdict::strictly_semistable);
    REQUIRE(r.mu_total == Rat(1));
}

TEST_CASE("stability verdict bridges to the affine concentration verdict") {
    for (const LatticePolytope& P :
         {fig1a(), square2(), dp1(), dp2(), hexagon(), cube3()}) {
        REQUIRE(P.is_smooth().smooth);
        ConcentrationReport affine = check_affine(P);
        StabilityReport stab = stability_verdict(canonical_extension(Fan::normal_fan(P)),
                                                 facet_volumes(P));
        REQUIRE(stab.mu_total == affine.rhs);
        REQUIRE((stab.verdict == StabilityVerdict::unstable) ==
                (affine.overall == ConcentrationOverall::violated));
        REQUIRE((stab.verdict == StabilityVerdict::strictly_semistable) ==
                (affine.overall == ConcentrationOverall::holds_with_equality));
        REQUIRE((stab.verdict == StabilityVerdict::stable) ==
                (affine.overall == ConcentrationOverall::holds_strictly));
    }
}

TEST_CASE("canonical data is compatible on every maximal cone") {
    for (const LatticePolytope& P : {fig1a(), cube3()}) {
        Fan fan = Fan::normal_fan(P);
        KlyachkoBundleData data = canonical_extension(fan);
        CompatibilityReport r = compatibility_check(fan, data);
        REQUIRE(r.compatible);
        REQUIRE_FALSE(r.failing_cone.has_value());
        REQUIRE(r.decompositions.size() == fan.maximal_cones().size());
        for (std::size_t c = 0; c < r.decompositions.size(); ++c) {
            REQUIRE(r.decompositions[c].cone_index == c);
            require_valid_decomposition(fan, data, r.decompositions[c]);
            // Each ray's step line is spanned by exactly one basis vector.
            const auto& cone = fan.maximal_cones()[c];
            for (std::size_t j = 0; j < cone.size(); ++j) {
                std::size_t hits = 0;
                for (std::size_t t = 0; t < data.rank; ++t)
                    if (r.decompositions[c].levels[t][j] == 1) {
                        ++hits;
                        REQUIRE(data.filtrations[cone[j]].steps[0].subspace.contains(
                            r.decompositions[c].basis[t]));
                    }
                REQUIRE(hits == 1);
            }
        }
    }
}

TEST_CASE("a corrupted step line breaks compatibility on one octant") {
    Fan fan = Fan::normal_fan(cube3());
    REQUIRE(fan.rays()[0] == iv({-1, 0, 0}));
    KlyachkoBundleData data = canonical_extension(fan);
    std::vector<RayFiltration> fs = data.filtrations;
    // Replace the line over ray (-1,0,0) by a line inside the span of the
    // neighbouring two: in the octant cone {0,1,2} the three step lines then
    // span only a plane, so no basis can hit all three.
    fs[0].steps[0].subspace = line(4, iv({0, -2, 1, -1}));
    KlyachkoBundleData corrupted(4, fs);
    CompatibilityReport r = compatibility_check(fan, corrupted);
    REQUIRE_FALSE(r.compatible);
    REQUIRE(r.failing_cone.has_value());
    REQUIRE(fan.maximal_cones()[*r.failing_cone] == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("lifted line data on the non-smooth fan has no equivariant structure") {
    Fan fan = Fan::normal_fan(fig1b());
    KlyachkoBundleData data = lifted_line_data(fan);
    CompatibilityReport r = compatibility_check(fan, data);
    REQUIRE_FALSE(r.compatible);
    REQUIRE(r.failing_cone == 0);
}

TEST_CASE("rank one levels must pair integrally against the cone rays") {
    Fan fan = Fan::normal_fan(fig1b());
    CompatibilityReport ok = compatibility_check(fan, rank1_data(3, {4, 0, 0}));
    REQUIRE(ok.compatible);
    for (const ConeDecomposition& d : ok.decompositions)
        require_valid_decomposition(fan, rank1_data(3, {4, 0, 0}), d);
    CompatibilityReport odd = compatibility_check(fan, rank1_data(3, {1, 0, 0}));
    REQUIRE_FALSE(odd.compatible);
    REQUIRE(odd.failing_cone == 0);
    CompatibilityReport half = compatibility_check(fan, rank1_data(3, {2, 0, 0}));
    REQUIRE_FALSE(half.compatible);
    REQUIRE(half.failing_cone == 0);

    Fan smooth_fan = Fan::normal_fan(fig1a());
    CompatibilityReport smooth_ok = compatibility_check(smooth_fan, rank1_data(3, {2, -1, 3}));
    REQUIRE(smooth_ok.compatible);
    for (const ConeDecomposition& d : smooth_ok.decompositions)
        require_valid_decomposition(smooth_fan, rank1_data(3, {2, -1, 3}), d);
}

TEST_CASE("compatibility requires one filtration per ray") {
    Fan fan = Fan::normal_fan(fig1a());
    REQUIRE_THROWS_WITH(compatibility_check(fan, rank1_data(2, {0, 0})),
                        ContainsSubstring("filtration count differs from ray count"));
}

TEST_CASE("bundle data validation rejects malformed filtrations") {
    REQUIRE_THROWS_WITH(KlyachkoBundleData(0, {}), ContainsSubstring("rank is zero"));
    REQUIRE_THROWS_WITH(KlyachkoBundleData(2, {}), ContainsSubstring("no filtrations"));
    RayFiltration empty;
    REQUIRE_THROWS_WITH(KlyachkoBundleData(2, {empty}),
                        ContainsSubstring("filtration has no steps"));
    RayFiltration wrong;
    wrong.steps.push_back({Int(1), line(3, iv({1, 0, 0}))});
    REQUIRE_THROWS_WITH(KlyachkoBundleData(2, {wrong}),
                        ContainsSubstring("wrong ambient dimension"));
    RayFiltration zero;
    zero.steps.push_back({Int(1), LinearSubspace(2)});
    REQUIRE_THROWS_WITH(KlyachkoBundleData(2, {zero}),
                        ContainsSubstring("lists the zero subspace"));
    RayFiltration levels;
    levels.steps.push_back({Int(1), LinearSubspace(2, std::vector<IntVec>{iv({1, 0}), iv({0, 1})})});
    levels.steps.push_back({Int(1), line(2, iv({1, 0}))});
    REQUIRE_THROWS_WITH(KlyachkoBundleData(2, {levels}),
                        ContainsSubstring("levels not strictly increasing"));
    RayFiltration dims;
    dims.steps.push_back({Int(0), line(2, iv({1, 0}))});
    dims.steps.push_back({Int(1), line(2, iv({0, 1}))});
    REQUIRE_THROWS_WITH(KlyachkoBundleData(2, {dims}),
                        ContainsSubstring("dimensions not strictly decreasing"));
    RayFiltration nested;
    nested.steps.push_back(
        {Int(0), LinearSubspace(3, std::vector<IntVec>{iv({1, 0, 0}), iv({0, 1, 0})})});
    nested.steps.push_back({Int(1), line(3, iv({0, 0, 1}))});
    REQUIRE_THROWS_WITH(KlyachkoBundleData(3, {nested}),
                        ContainsSubstring("steps are not nested"));
}
