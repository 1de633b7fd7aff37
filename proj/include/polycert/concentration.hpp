#ifndef POLYCERT_CONCENTRATION_HPP
#define POLYCERT_CONCENTRATION_HPP

// Concentration inequalities for the facet volume distribution of a lattice
// polytope. Three modes share one evaluator:
//
//   affine: proper affine subspaces A of R^n,
//           (sum of vol over normals in A) / (dim A + 1)  vs  total / (n+1);
//   linear: proper nonzero linear subspaces F of R^n, sum / dim F vs total / n;
//   lifted: normals lifted to (v, -1) in R^(n+1), proper subspaces W,
//           sum / dim W  vs  total / (n+1).
//
// Enumerating spans of subsets of the input vectors is exhaustive: among
// subspaces with a fixed incident set the span of that set maximizes the
// left hand side, and it is generated by at most n of its members. The
// exponential oracle below re-derives every record from all 2^m subsets with
// none of the canonical-form machinery, as an independent cross-check.
//
// Equality records are matched into complementary pairs (direct sums, taken
// through lifts in affine mode). On smooth, reflexive, centered input every
// equality is guaranteed a complement, so an unmatched one is a
// contradiction, hence a hard error; otherwise it is reported as data.

#include "polycert/polytope.hpp"
#include "polycert/subspace.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace polycert {

enum class ConcentrationMode { affine, linear, lifted };
enum class ConcentrationStatus { strict, equality, violated };
enum class ConcentrationOverall { holds_strictly, holds_with_equality, violated };

inline const char* to_string(ConcentrationMode m) {
    switch (m) {
        case ConcentrationMode::affine: return "affine";
        case ConcentrationMode::linear: return "linear";
        default: return "lifted";
    }
}

inline const char* to_string(ConcentrationStatus s) {
    switch (s) {
        case ConcentrationStatus::strict: return "strict";
        case ConcentrationStatus::equality: return "equality";
        default: return "violated";
    }
}

inline const char* to_string(ConcentrationOverall o) {
    switch (o) {
        case ConcentrationOverall::holds_strictly: return "holds-strictly";
        case ConcentrationOverall::holds_with_equality: return "holds-with-equality";
        default: return "violated";
    }
}

struct ConcentrationRecord {
    std::size_t dim;                       // dim of the subspace (affine dim in affine mode)
    std::optional<AffineSubspace> affine;  // set in affine mode
    std::optional<LinearSubspace> linear;  // set in linear and lifted modes
    std::vector<std::size_t> incident;     // indices of normals inside, ascending
    Rat lhs;
    ConcentrationStatus status;
};

struct ConcentrationReport {
    ConcentrationMode mode;
    std::size_t ambient_dim;  // n, the polytope dimension
    Rat rhs;
    bool hypotheses_met;  // input is smooth, reflexive and centered
    std::vector<ConcentrationRecord> records;  // ordered by (dim, canonical form)
    std::vector<std::pair<std::size_t, std::size_t>> equality_pairs;  // indices into records
    std::vector<std::size_t> unpaired_equalities;
    ConcentrationOverall overall;
};

namespace detail {

inline void validate_concentration_input(const std::vector<IntVec>& normals,
                                         const std::vector<Int>& volumes, std::size_t n) {
    if (n == 0) throw std::invalid_argument("concentration: ambient dimension is zero");
    if (normals.empty()) throw std::invalid_argument("concentration: no facet data");
    if (normals.size() != volumes.size())
        throw std::invalid_argument("concentration: normal/volume count mismatch");
    for (const IntVec& v : normals) {
        if (v.size() != n) throw std::invalid_argument("concentration: normal of wrong dimension");
        if (is_zero(v)) throw std::invalid_argument("concentration: zero normal");
    }
    for (const Int& v : volumes)
        if (v <= 0) throw std::invalid_argument("concentration: nonpositive volume");
}

inline IntVec lift_vec(const IntVec& v) {
    IntVec w = v;
    w.push_back(Int(-1));
    return w;
}

inline ConcentrationStatus classify(const Rat& lhs, const Rat& rhs) {
    if (lhs < rhs) return ConcentrationStatus::strict;
    if (lhs == rhs) return ConcentrationStatus::equality;
    return ConcentrationStatus::violated;
}

}  // namespace detail

// Core evaluator on raw facet data. The hypotheses flag is what arms the
// hard failure on unmatched equality pairs; the polytope wrappers below set
// it from the polytope itself, raw callers state it explicitly.
inline ConcentrationReport check_concentration(const std::vector<IntVec>& normals,
                                               const std::vector<Int>& volumes, std::size_t n,
                                               ConcentrationMode mode,
                                               bool hypotheses_met = false) {
    detail::validate_concentration_input(normals, volumes, n);
    std::size_t m = normals.size();

    Rat total = 0;
    for (const Int& v : volumes) total += Rat(v);
    std::size_t rhs_den = (mode == ConcentrationMode::linear) ? n : n + 1;
    Rat rhs = total / Rat(static_cast<unsigned long long>(rhs_den));

    ConcentrationReport report;
    report.mode = mode;
    report.ambient_dim = n;
    report.rhs = rhs;
    report.hypotheses_met = hypotheses_met;

    if (mode == ConcentrationMode::affine) {
        std::set<AffineSubspace> cands;
        for (std::size_t k = 1; k <= n; ++k) {
            detail::for_each_subset(m, k, [&](const std::vector<std::size_t>& idx) {
                std::vector<RatVec> pts;
                for (std::size_t i : idx) pts.push_back(to_rat(normals[i]));
                cands.insert(AffineSubspace::span_of(pts, n));
            });
        }
        for (const AffineSubspace& A : cands) {
            ConcentrationRecord rec;
            rec.dim = A.dim();
            rec.affine = A;
            Rat sum = 0;
            for (std::size_t i = 0; i < m; ++i)
                if (A.contains(normals[i])) {
                    rec.incident.push_back(i);
                    sum += Rat(volumes[i]);
                }
            rec.lhs = sum / Rat(static_cast<unsigned long long>(A.dim() + 1));
            rec.status = detail::classify(rec.lhs, rhs);
            report.records.push_back(std::move(rec));
        }
    } else {
        std::size_t ambient = (mode == ConcentrationMode::lifted) ? n + 1 : n;
        std::size_t max_size = (mode == ConcentrationMode::lifted) ? n : n - 1;
        std::vector<IntVec> vecs;
        for (const IntVec& v : normals)
            vecs.push_back(mode == ConcentrationMode::lifted ? detail::lift_vec(v) : v);
        std::set<LinearSubspace> cands;
        for (std::size_t k = 1; k <= max_size; ++k) {
            detail::for_each_subset(m, k, [&](const std::vector<std::size_t>& idx) {
                std::vector<IntVec> gens;
                for (std::size_t i : idx) gens.push_back(vecs[i]);
                cands.insert(LinearSubspace(ambient, gens));
            });
        }
        for (const LinearSubspace& F : cands) {
            ConcentrationRecord rec;
            rec.dim = F.dim();
            rec.linear = F;
            Rat sum = 0;
            for (std::size_t i = 0; i < m; ++i)
                if (F.contains(vecs[i])) {
                    rec.incident.push_back(i);
                    sum += Rat(volumes[i]);
                }
            rec.lhs = sum / Rat(static_cast<unsigned long long>(F.dim()));
            rec.status = detail::classify(rec.lhs, rhs);
            report.records.push_back(std::move(rec));
        }
    }

    bool any_eq = false, any_viol = false;
    for (const ConcentrationRecord& r : report.records) {
        if (r.status == ConcentrationStatus::equality) any_eq = true;
        if (r.status == ConcentrationStatus::violated) any_viol = true;
    }
    report.overall = any_viol ? ConcentrationOverall::violated
                    : any_eq ? ConcentrationOverall::holds_with_equality
                             : ConcentrationOverall::holds_strictly;

    // Greedy deterministic matching: each equality record takes the first
    // later complementary equality record still available.
    std::vector<bool> used(report.records.size(), false);
    auto comp = [&](std::size_t i, std::size_t j) {
        const ConcentrationRecord& a = report.records[i];
        const ConcentrationRecord& b = report.records[j];
        if (mode == ConcentrationMode::affine) return complementary(*a.affine, *b.affine);
        return complementary(*a.linear, *b.linear);
    };
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        if (report.records[i].status != ConcentrationStatus::equality || used[i]) continue;
        for (std::size_t j = i + 1; j < report.records.size(); ++j) {
            if (report.records[j].status != ConcentrationStatus::equality || used[j]) continue;
            if (comp(i, j)) {
                report.equality_pairs.emplace_back(i, j);
                used[i] = used[j] = true;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < report.records.size(); ++i)
        if (report.records[i].status == ConcentrationStatus::equality && !used[i])
            report.unpaired_equalities.push_back(i);
    if (hypotheses_met && !report.unpaired_equalities.empty())
        throw std::logic_error(
            "concentration: equality case without complementary partner on smooth reflexive "
            "centered input");
    return report;
}

namespace detail {

inline std::pair<std::vector<IntVec>, std::vector<Int>> facet_data(const LatticePolytope& P) {
    std::vector<IntVec> normals;
    std::vector<Int> volumes;
    for (const Facet& f : P.facets()) {
        normals.push_back(f.normal);
        volumes.push_back(f.lattice_volume);
    }
    return {normals, volumes};
}

}  // namespace detail

// The hypotheses under which equality cases are guaranteed to pair up.
inline bool concentration_hypotheses(const LatticePolytope& P) {
    return P.is_smooth().smooth && P.is_reflexive().reflexive && P.is_centered();
}

inline ConcentrationReport check_affine(const LatticePolytope& P) {
    auto [normals, volumes] = detail::facet_data(P);
    return check_concentration(normals, volumes, P.dim(), ConcentrationMode::affine,
                               concentration_hypotheses(P));
}

inline ConcentrationReport check_linear(const LatticePolytope& P) {
    auto [normals, volumes] = detail::facet_data(P);
    return check_concentration(normals, volumes, P.dim(), ConcentrationMode::linear,
                               concentration_hypotheses(P));
}

// Lifted check, with the lifted-affine correspondence enforced: slicing a
// lifted candidate at height -1 must reproduce an affine candidate with the
// same incident set and left hand side, one for one. A mismatch means the
// two enumerations disagree, which is a defect, not a property of the input.
inline ConcentrationReport check_lifted(const LatticePolytope& P) {
    auto [normals, volumes] = detail::facet_data(P);
    bool hyp = concentration_hypotheses(P);
    std::size_t n = P.dim();
    ConcentrationReport lifted =
        check_concentration(normals, volumes, n, ConcentrationMode::lifted, hyp);
    ConcentrationReport affine =
        check_concentration(normals, volumes, n, ConcentrationMode::affine, hyp);
    if (lifted.records.size() != affine.records.size())
        throw std::logic_error("lifted check: candidate counts disagree with affine check");
    for (const ConcentrationRecord& rec : lifted.records) {
        if (rec.incident.empty())
            throw std::logic_error("lifted check: candidate without incident lifted normal");
        std::vector<RatVec> pts;
        for (std::size_t i : rec.incident) pts.push_back(to_rat(normals[i]));
        AffineSubspace slice = AffineSubspace::span_of(pts, n);
        if (slice.lift() != *rec.linear || slice.dim() + 1 != rec.dim)
            throw std::logic_error("lifted check: candidate is not the lift of its slice");
        bool matched = false;
        for (const ConcentrationRecord& arec : affine.records) {
            if (*arec.affine == slice) {
                matched = arec.incident == rec.incident && arec.lhs == rec.lhs &&
                          arec.status == rec.status;
                break;
            }
        }
        if (!matched)
            throw std::logic_error("lifted check: no affine record matches the slice");
    }
    return lifted;
}

// Exponential reference oracle: every one of the 2^m - 1 nonempty subsets
// proposes its span. Distinct spans of normal subsets have distinct incident
// sets (the span equals the span of its incident set), so records key on the
// incident set; the dimensions are cross-checked on collision.
struct OracleRecord {
    std::size_t dim;
    std::vector<std::size_t> incident;
    Rat lhs;
    ConcentrationStatus status;
};

struct OracleReport {
    ConcentrationMode mode;
    Rat rhs;
    std::vector<OracleRecord> records;  // sorted by (dim, incident)
    ConcentrationOverall overall;
};

inline OracleReport concentration_oracle(const std::vector<IntVec>& normals,
                                         const std::vector<Int>& volumes, std::size_t n,
                                         ConcentrationMode mode) {
    detail::validate_concentration_input(normals, volumes, n);
    std::size_t m = normals.size();
    if (m > 20) throw std::invalid_argument("oracle: facet count exceeds exhaustive range");

    std::vector<IntVec> vecs;
    for (const IntVec& v : normals)
        vecs.push_back(mode == ConcentrationMode::lifted ? detail::lift_vec(v) : v);

    // rank of the subset's span; for affine mode, of the difference set
    auto subset_dim = [&](const std::vector<std::size_t>& idx) -> std::size_t {
        if (mode == ConcentrationMode::affine) {
            IntMat D(idx.size() - 1, n);
            for (std::size_t i = 1; i < idx.size(); ++i)
                for (std::size_t j = 0; j < n; ++j)
                    D(i - 1, j) = vecs[idx[i]][j] - vecs[idx[0]][j];
            return idx.size() > 1 ? rank(D) : 0;
        }
        IntMat D(idx.size(), vecs[0].size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < vecs[0].size(); ++j) D(i, j) = vecs[idx[i]][j];
        return rank(D);
    };
    auto member = [&](const std::vector<std::size_t>& idx, std::size_t k,
                      std::size_t dim) -> bool {
        if (mode == ConcentrationMode::affine) {
            IntMat D(idx.size(), n);
            for (std::size_t i = 1; i < idx.size(); ++i)
                for (std::size_t j = 0; j < n; ++j)
                    D(i - 1, j) = vecs[idx[i]][j] - vecs[idx[0]][j];
            for (std::size_t j = 0; j < n; ++j)
                D(idx.size() - 1, j) = vecs[k][j] - vecs[idx[0]][j];
            return rank(D) == dim;
        }
        IntMat D(idx.size() + 1, vecs[0].size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < vecs[0].size(); ++j) D(i, j) = vecs[idx[i]][j];
        for (std::size_t j = 0; j < vecs[0].size(); ++j) D(idx.size(), j) = vecs[k][j];
        return rank(D) == dim;
    };

    Rat total = 0;
    for (const Int& v : volumes) total += Rat(v);
    std::size_t rhs_den = (mode == ConcentrationMode::linear) ? n : n + 1;
    Rat rhs = total / Rat(static_cast<unsigned long long>(rhs_den));

    std::map<std::vector<std::size_t>, std::size_t> seen;  // incident set -> dim
    for (unsigned long mask = 1; mask < (1ul << m); ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1ul << i)) idx.push_back(i);
        std::size_t dim = subset_dim(idx);
        std::size_t proper_bound = (mode == ConcentrationMode::lifted) ? n + 1 : n;
        if (dim >= proper_bound) continue;
        std::vector<std::size_t> incident;
        for (std::size_t k = 0; k < m; ++k)
            if (member(idx, k, dim)) incident.push_back(k);
        auto it = seen.find(incident);
        if (it != seen.end()) {
            if (it->second != dim)
                throw std::logic_error("oracle: one incident set with two span dimensions");
            continue;
        }
        seen.emplace(std::move(incident), dim);
    }

    OracleReport report;
    report.mode = mode;
    report.rhs = rhs;
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> keys;
    for (const auto& [inc, dim] : seen) keys.emplace_back(dim, inc);
    std::sort(keys.begin(), keys.end());
    bool any_eq = false, any_viol = false;
    for (auto& [dim, inc] : keys) {
        OracleRecord rec;
        rec.dim = dim;
        rec.incident = inc;
        Rat sum = 0;
        for (std::size_t i : inc) sum += Rat(volumes[i]);
        std::size_t den = (mode == ConcentrationMode::affine) ? dim + 1 : dim;
        rec.lhs = sum / Rat(static_cast<unsigned long long>(den));
        rec.status = detail::classify(rec.lhs, rhs);
        if (rec.status == ConcentrationStatus::equality) any_eq = true;
        if (rec.status == ConcentrationStatus::violated) any_viol = true;
        report.records.push_back(std::move(rec));
    }
    report.overall = any_viol ? ConcentrationOverall::violated
                     : any_eq ? ConcentrationOverall::holds_with_equality
                              : ConcentrationOverall::holds_strictly;
    return report;
}

// Record-for-record agreement between the polynomial enumeration and the
// exponential oracle, compared on (dim, incident set, lhs, status) plus the
// right hand side and the overall verdict.
inline bool concentration_agrees(const ConcentrationReport& r, const OracleReport& o) {
    if (r.mode != o.mode || r.rhs != o.rhs || r.overall != o.overall) return false;
    if (r.records.size() != o.records.size()) return false;
    using Key = std::tuple<std::size_t, std::vector<std::size_t>, Rat, int>;
    std::vector<Key> a, b;
    for (const ConcentrationRecord& rec : r.records)
        a.emplace_back(rec.dim, rec.incident, rec.lhs, static_cast<int>(rec.status));
    for (const OracleRecord& rec : o.records)
        b.emplace_back(rec.dim, rec.incident, rec.lhs, static_cast<int>(rec.status));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

}  // namespace polycert

#endif  // POLYCERT_CONCENTRATION_HPP
