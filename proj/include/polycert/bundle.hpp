#ifndef POLYCERT_BUNDLE_HPP
#define POLYCERT_BUNDLE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "polycert/fan.hpp"
#include "polycert/linalg.hpp"
#include "polycert/subspace.hpp"

namespace polycert {

// One jump of a decreasing filtration: the subspace that holds from `level`
// until the next listed level (exclusive).  Before the first listed level the
// filtration is the full space; after the last listed level it is zero.
struct FiltrationStep {
    Int level;
    LinearSubspace subspace;
};

struct RayFiltration {
    std::vector<FiltrationStep> steps;
};

inline LinearSubspace full_space(std::size_t ambient) {
    std::vector<IntVec> gens;
    for (std::size_t i = 0; i < ambient; ++i) {
        IntVec e(ambient, 0);
        e[i] = 1;
        gens.push_back(e);
    }
    return LinearSubspace(ambient, gens);
}

// Equivariant bundle data: a rank and one decreasing filtration per ray of
// the fan it will be paired with.  The pairing itself (filtration count ==
// ray count) is checked at the operations that take both.
struct KlyachkoBundleData {
    std::size_t rank;
    std::vector<RayFiltration> filtrations;

    KlyachkoBundleData(std::size_t rank_, std::vector<RayFiltration> filtrations_)
        : rank(rank_), filtrations(std::move(filtrations_)) {
        if (rank == 0) throw std::invalid_argument("bundle: rank is zero");
        if (filtrations.empty()) throw std::invalid_argument("bundle: no filtrations");
        for (const RayFiltration& f : filtrations) {
            if (f.steps.empty()) throw std::invalid_argument("bundle: filtration has no steps");
            for (std::size_t j = 0; j < f.steps.size(); ++j) {
                const FiltrationStep& s = f.steps[j];
                if (s.subspace.ambient() != rank)
                    throw std::invalid_argument("bundle: filtration step has wrong ambient dimension");
                if (s.subspace.dim() == 0)
                    throw std::invalid_argument("bundle: filtration lists the zero subspace");
                if (j > 0) {
                    if (f.steps[j - 1].level >= s.level)
                        throw std::invalid_argument("bundle: filtration levels not strictly increasing");
                    if (f.steps[j - 1].subspace.dim() <= s.subspace.dim())
                        throw std::invalid_argument("bundle: filtration dimensions not strictly decreasing");
                    if (!f.steps[j - 1].subspace.contains(s.subspace))
                        throw std::invalid_argument("bundle: filtration steps are not nested");
                }
            }
        }
    }
};

// E^rho(i) for one ray's filtration.
inline LinearSubspace filtration_at(const RayFiltration& f, const Int& i, std::size_t rank) {
    if (i < f.steps.front().level) return full_space(rank);
    if (i > f.steps.back().level) return LinearSubspace(rank);
    for (std::size_t j = f.steps.size(); j-- > 0;)
        if (f.steps[j].level <= i) return f.steps[j].subspace;
    throw std::logic_error("bundle: unreachable filtration lookup");
}

// Filtrations of the canonical rank-(n+1) extension over a base fan: one step
// per ray, the line through (ray, -1) at level 1.  The construction lives on
// smooth complete base fans only.
inline KlyachkoBundleData canonical_extension(const Fan& base) {
    if (!base.is_complete())
        throw std::invalid_argument("canonical extension requires complete fan");
    if (!base.smooth().smooth)
        throw std::invalid_argument("canonical extension requires smooth fan");
    std::size_t rank = base.dim() + 1;
    std::vector<RayFiltration> filtrations;
    for (const IntVec& r : base.rays()) {
        IntVec lifted = r;
        lifted.push_back(-1);
        RayFiltration f;
        f.steps.push_back({Int(1), LinearSubspace(rank, std::vector<IntVec>{lifted})});
        filtrations.push_back(std::move(f));
    }
    return KlyachkoBundleData(rank, std::move(filtrations));
}

namespace detail {

inline void check_volumes(const KlyachkoBundleData& data, const std::vector<Int>& volumes) {
    if (volumes.size() != data.filtrations.size())
        throw std::invalid_argument("bundle: volume count mismatch");
    for (const Int& v : volumes)
        if (v <= 0) throw std::invalid_argument("bundle: nonpositive volume");
}

}  // namespace detail

// Per-ray jump counts of F against the filtrations: for each ray, the map
// i -> dim(F cap E(i)) - dim(F cap E(i+1)) restricted to nonzero entries.
// The counts at each ray sum to dim F.
inline std::vector<std::map<Int, std::size_t>> subspace_profile(const KlyachkoBundleData& data,
                                                                const LinearSubspace& F) {
    if (F.ambient() != data.rank)
        throw std::invalid_argument("bundle: subspace of wrong ambient dimension");
    std::vector<std::map<Int, std::size_t>> profile;
    for (const RayFiltration& f : data.filtrations) {
        std::map<Int, std::size_t> jumps;
        Int lo = f.steps.front().level - 1;
        Int hi = f.steps.back().level;
        std::size_t prev = intersect_dim(F, filtration_at(f, lo, data.rank));
        for (Int i = lo; i <= hi; ++i) {
            std::size_t next = intersect_dim(F, filtration_at(f, i + 1, data.rank));
            if (prev != next) jumps[i] = prev - next;
            prev = next;
        }
        profile.push_back(std::move(jumps));
    }
    return profile;
}

// (1/dim F) * sum over rays and levels of i * jump * volume.
inline Rat weighted_degree(const KlyachkoBundleData& data, const std::vector<Int>& volumes,
                           const LinearSubspace& F) {
    detail::check_volumes(data, volumes);
    if (F.ambient() != data.rank)
        throw std::invalid_argument("bundle: subspace of wrong ambient dimension");
    if (F.dim() == 0) throw std::invalid_argument("bundle: weighted degree of zero subspace");
    std::vector<std::map<Int, std::size_t>> profile = subspace_profile(data, F);
    Rat total = 0;
    for (std::size_t k = 0; k < profile.size(); ++k)
        for (const auto& [level, count] : profile[k])
            total += Rat(level) * Rat(Int(count)) * Rat(volumes[k]);
    return total / Rat(Int(F.dim()));
}

enum class StabilityVerdict { stable, strictly_semistable, unstable };

inline std::string to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::stable: return "stable";
        case StabilityVerdict::strictly_semistable: return "strictly-semistable";
        case StabilityVerdict::unstable: return "unstable";
    }
    throw std::logic_error("unknown stability verdict");
}

struct StabilityRecord {
    LinearSubspace subspace;
    Rat mu;
};

struct StabilityReport {
    StabilityVerdict verdict = StabilityVerdict::stable;
    Rat mu_total;
    std::vector<StabilityRecord> records;
    std::vector<std::size_t> witnesses;
};

// Slope comparison of every candidate subspace against the whole space.  The
// candidate set is exhaustive (spans of step-generator subsets) only when all
// proper filtration steps are lines, which the operation enforces; shrinking
// any F to the span of its incident step lines preserves the numerator and
// weakly shrinks dim F, so the maximal slope is attained on a candidate.
inline StabilityReport stability_verdict(const KlyachkoBundleData& data,
                                         const std::vector<Int>& volumes) {
    detail::check_volumes(data, volumes);
    StabilityReport report;
    report.mu_total = weighted_degree(data, volumes, full_space(data.rank));
    std::set<IntVec> generators;
    for (const RayFiltration& f : data.filtrations)
        for (const FiltrationStep& s : f.steps) {
            if (s.subspace.dim() == data.rank) continue;
            if (s.subspace.dim() != 1)
                throw std::invalid_argument("general filtration shapes unsupported");
            generators.insert(s.subspace.rows()[0]);
        }
    std::vector<IntVec> gens(generators.begin(), generators.end());
    if (gens.size() > 20)
        throw std::invalid_argument("bundle: too many step generators for exhaustive candidates");
    std::set<LinearSubspace> candidates;
    for (std::size_t mask = 1; mask < (std::size_t(1) << gens.size()); ++mask) {
        std::vector<IntVec> chosen;
        for (std::size_t t = 0; t < gens.size(); ++t)
            if (mask & (std::size_t(1) << t)) chosen.push_back(gens[t]);
        LinearSubspace span(data.rank, chosen);
        if (span.dim() < data.rank) candidates.insert(span);
    }
    for (const LinearSubspace& F : candidates)
        report.records.push_back({F, weighted_degree(data, volumes, F)});
    if (report.records.empty()) {
        report.verdict = StabilityVerdict::stable;
        return report;
    }
    Rat max_mu = report.records[0].mu;
    for (const StabilityRecord& r : report.records) max_mu = std::max(max_mu, r.mu);
    if (max_mu >= report.mu_total)
        for (std::size_t i = 0; i < report.records.size(); ++i)
            if (report.records[i].mu == max_mu) report.witnesses.push_back(i);
    if (max_mu > report.mu_total)
        report.verdict = StabilityVerdict::unstable;
    else if (max_mu == report.mu_total)
        report.verdict = StabilityVerdict::strictly_semistable;
    else
        report.verdict = StabilityVerdict::stable;
    return report;
}

struct ConeDecomposition {
    std::size_t cone_index;
    std::vector<IntVec> basis;
    // levels[b][j] = forced level of basis vector b at the cone's j-th ray.
    std::vector<std::vector<Int>> levels;
};

struct CompatibilityReport {
    bool compatible = true;
    std::vector<ConeDecomposition> decompositions;
    std::optional<std::size_t> failing_cone;
};

namespace detail {

// Largest i with b in E^rho(i); by nestedness this is the level right before
// the first step that drops b, the last level if the last step keeps b, and
// first level - 1 if no step contains b.
inline Int forced_level(const RayFiltration& f, const IntVec& b) {
    std::optional<std::size_t> largest;
    for (std::size_t j = 0; j < f.steps.size(); ++j)
        if (f.steps[j].subspace.contains(b)) largest = j;
    if (!largest) return f.steps.front().level - 1;
    if (*largest + 1 == f.steps.size()) return f.steps.back().level;
    return f.steps[*largest + 1].level - 1;
}

}  // namespace detail

// Searches, for each maximal cone, a basis of eigenvectors with realizable
// weight tuples reproducing every filtration level set.  Candidates are the
// standard basis (generators of the full space, the level-0 value of every
// filtration) plus the rows of each listed step subspace of the cone's rays.
// For a candidate basis, each vector's per-ray level is forced to be the
// largest level whose subspace contains it, and its weight tuple must be
// realized by an integral character u with <u, ray_j> = level_j.  Since every
// selected vector with level >= i lies in E(i) by nestedness, a rank match
// against dim E(i) makes the spans equal.
inline CompatibilityReport compatibility_check(const Fan& fan, const KlyachkoBundleData& data) {
    if (fan.rays().size() != data.filtrations.size())
        throw std::invalid_argument("compatibility: filtration count differs from ray count");
    CompatibilityReport report;
    std::size_t r = data.rank;
    for (std::size_t c = 0; c < fan.maximal_cones().size(); ++c) {
        const std::vector<std::size_t>& cone = fan.maximal_cones()[c];
        std::vector<IntVec> candidates;
        auto add_candidate = [&](const IntVec& v) {
            IntVec p = primitive(v);
            if (std::find(candidates.begin(), candidates.end(), p) == candidates.end())
                candidates.push_back(p);
        };
        for (std::size_t i = 0; i < r; ++i) {
            IntVec e(r, 0);
            e[i] = 1;
            add_candidate(e);
        }
        for (std::size_t j : cone)
            for (const FiltrationStep& s : data.filtrations[j].steps)
                for (const IntVec& row : s.subspace.rows()) add_candidate(row);
        IntMat rays(cone.size(), fan.dim());
        for (std::size_t t = 0; t < cone.size(); ++t)
            for (std::size_t j = 0; j < fan.dim(); ++j) rays(t, j) = fan.rays()[cone[t]][j];
        std::vector<IntVec> usable;
        std::vector<std::vector<Int>> usable_levels;
        for (const IntVec& b : candidates) {
            std::vector<Int> levels;
            for (std::size_t j : cone) levels.push_back(detail::forced_level(data.filtrations[j], b));
            IntVec target(levels.begin(), levels.end());
            if (integer_solve(rays, target)) {
                usable.push_back(b);
                usable_levels.push_back(levels);
            }
        }
        Int smin = data.filtrations[cone[0]].steps.front().level;
        Int smax = data.filtrations[cone[0]].steps.back().level;
        for (std::size_t j : cone) {
            smin = std::min(smin, data.filtrations[j].steps.front().level);
            smax = std::max(smax, data.filtrations[j].steps.back().level);
        }
        std::optional<ConeDecomposition> found;
        if (usable.size() >= r) {
            detail::for_each_subset(usable.size(), r, [&](const std::vector<std::size_t>& pick) {
                if (found) return;
                IntMat B(r, r);
                for (std::size_t t = 0; t < r; ++t)
                    for (std::size_t j = 0; j < r; ++j) B(t, j) = usable[pick[t]][j];
                if (rank(B) != r) return;
                for (std::size_t jt = 0; jt < cone.size(); ++jt) {
                    const RayFiltration& f = data.filtrations[cone[jt]];
                    for (Int i = smin - 1; i <= smax + 1; ++i) {
                        std::vector<IntVec> chosen;
                        for (std::size_t t = 0; t < r; ++t)
                            if (usable_levels[pick[t]][jt] >= i) chosen.push_back(usable[pick[t]]);
                        IntMat C(chosen.size(), r);
                        for (std::size_t t = 0; t < chosen.size(); ++t)
                            for (std::size_t j = 0; j < r; ++j) C(t, j) = chosen[t][j];
                        if (rank(C) != filtration_at(f, i, r).dim()) return;
                    }
                }
                ConeDecomposition d;
                d.cone_index = c;
                for (std::size_t t = 0; t < r; ++t) {
                    d.basis.push_back(usable[pick[t]]);
                    d.levels.push_back(usable_levels[pick[t]]);
                }
                found = d;
            });
        }
        if (!found) {
            report.compatible = false;
            report.failing_cone = c;
            return report;
        }
        report.decompositions.push_back(*found);
    }
    return report;
}

}  // namespace polycert

#endif
