#ifndef POLYCERT_CORPUS_HPP
#define POLYCERT_CORPUS_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "polycert/linalg.hpp"
#include "polycert/polytope.hpp"

namespace polycert {

// Named polytope with expected predicate flags; the flags are recomputed and
// checked on construction, so a mislabeled entry can never circulate.
struct CorpusEntry {
    std::string name;
    LatticePolytope polytope;
    bool reflexive;
    bool smooth;
    bool centered;

    CorpusEntry(std::string name_, LatticePolytope polytope_, bool reflexive_, bool smooth_,
                bool centered_)
        : name(std::move(name_)), polytope(std::move(polytope_)), reflexive(reflexive_),
          smooth(smooth_), centered(centered_) {
        if (polytope.is_reflexive().reflexive != reflexive)
            throw std::logic_error("corpus: entry " + name + " mislabeled: reflexive");
        if (polytope.is_smooth().smooth != smooth)
            throw std::logic_error("corpus: entry " + name + " mislabeled: smooth");
        if (polytope.is_centered() != centered)
            throw std::logic_error("corpus: entry " + name + " mislabeled: centered");
    }
};

namespace detail {

inline LatticePolytope poly(std::initializer_list<std::initializer_list<long long>> pts) {
    std::vector<IntVec> vs;
    for (const auto& p : pts) {
        IntVec v;
        for (long long x : p) v.push_back(Int(x));
        vs.push_back(v);
    }
    return LatticePolytope(vs);
}

}  // namespace detail

inline std::vector<CorpusEntry> builtin_corpus() {
    std::vector<CorpusEntry> entries;
    entries.emplace_back("fig1a", detail::poly({{-1, 2}, {2, -1}, {-1, -1}}), true, true, true);
    entries.emplace_back("fig1b", detail::poly({{0, 1}, {1, -1}, {-1, -1}}), true, false, false);
    entries.emplace_back("fig1c", detail::poly({{0, 1}, {1, 0}, {-1, -1}}), true, false, true);
    entries.emplace_back("p1xp1", detail::poly({{-1, -1}, {1, -1}, {-1, 1}, {1, 1}}), true, true,
                         true);
    entries.emplace_back("dp1", detail::poly({{-1, 0}, {0, -1}, {2, -1}, {-1, 2}}), true, true,
                         false);
    entries.emplace_back("dp2", detail::poly({{-1, 0}, {0, -1}, {2, -1}, {0, 1}, {-1, 1}}), true,
                         true, false);
    entries.emplace_back("hexagon",
                         detail::poly({{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}), true,
                         true, true);
    entries.emplace_back("cube3",
                         detail::poly({{-1, -1, -1},
                                       {1, -1, -1},
                                       {-1, 1, -1},
                                       {1, 1, -1},
                                       {-1, -1, 1},
                                       {1, -1, 1},
                                       {-1, 1, 1},
                                       {1, 1, 1}}),
                         true, true, true);
    return entries;
}

// Searches for a lattice-preserving linear map with U * vertices(P) =
// vertices(Q) as sets.  U is pinned down by the images of n independent
// vertices of P, and any valid U sends them to vertices of Q, so trying all
// ordered vertex tuples of Q is exhaustive.
inline std::optional<IntMat> unimodular_equivalent(const LatticePolytope& P,
                                                   const LatticePolytope& Q) {
    if (P.dim() != Q.dim()) return std::nullopt;
    if (P.vertices().size() != Q.vertices().size()) return std::nullopt;
    if (P.normalized_volume() != Q.normalized_volume()) return std::nullopt;
    std::size_t n = P.dim();
    std::size_t m = P.vertices().size();
    auto sorted_vertices = [](const LatticePolytope& R) {
        std::vector<IntVec> vs = R.vertices();
        std::sort(vs.begin(), vs.end(), [](const IntVec& a, const IntVec& b) {
            return lex_less(a, b);
        });
        return vs;
    };
    std::vector<IntVec> target = sorted_vertices(Q);
    if (sorted_vertices(P) == target) return IntMat::identity(n);

    // Greedy independent vertex tuple of P.
    std::vector<std::size_t> base;
    for (std::size_t i = 0; i < m && base.size() < n; ++i) {
        std::vector<std::size_t> trial = base;
        trial.push_back(i);
        IntMat T(trial.size(), n);
        for (std::size_t r = 0; r < trial.size(); ++r)
            for (std::size_t c = 0; c < n; ++c) T(r, c) = P.vertices()[trial[r]][c];
        if (rank(T) == trial.size()) base = trial;
    }
    if (base.size() < n) return std::nullopt;  // cannot happen for full-dimensional P

    RatMat Bp(n, n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) Bp(r, c) = Rat(P.vertices()[base[c]][r]);
    RatMat BpInv(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        RatVec e(n, Rat(0));
        e[c] = 1;
        std::optional<RatVec> col = solve(Bp, e);
        if (!col) throw std::logic_error("unimodular search: singular base tuple");
        for (std::size_t r = 0; r < n; ++r) BpInv(r, c) = (*col)[r];
    }

    std::optional<IntMat> found;
    detail::for_each_subset(m, n, [&](const std::vector<std::size_t>& subset) {
        if (found) return;
        std::vector<std::size_t> perm = subset;
        do {
            RatMat Bq(n, n);
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t r = 0; r < n; ++r) Bq(r, c) = Rat(Q.vertices()[perm[c]][r]);
            RatMat Urat = mat_mul(Bq, BpInv);
            IntMat U(n, n);
            bool integral = true;
            for (std::size_t r = 0; r < n && integral; ++r)
                for (std::size_t c = 0; c < n && integral; ++c) {
                    if (denominator(Urat(r, c)) != 1) integral = false;
                    else U(r, c) = numerator(Urat(r, c));
                }
            if (!integral) continue;
            Int d = det(U);
            if (d != 1 && d != -1) continue;
            std::vector<IntVec> image;
            for (const IntVec& v : P.vertices()) image.push_back(mat_vec(U, v));
            std::sort(image.begin(), image.end(), [](const IntVec& a, const IntVec& b) {
                return lex_less(a, b);
            });
            if (image == target) {
                found = U;
                return;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    });
    return found;
}

namespace detail {

// Primitive points of [-bound, bound]^2 sorted counterclockwise starting just
// above the positive x-axis direction (upper half first, each half by cross
// product).  Distinct primitive points never share a direction, so the order
// is total.
inline std::vector<IntVec> primitive_box_points(long long bound) {
    std::vector<IntVec> pts;
    for (long long x = -bound; x <= bound; ++x)
        for (long long y = -bound; y <= bound; ++y) {
            if (x == 0 && y == 0) continue;
            Int g = boost::multiprecision::gcd(Int(x < 0 ? -x : x), Int(y < 0 ? -y : y));
            if (g != 1) continue;
            pts.push_back(IntVec{Int(x), Int(y)});
        }
    auto half = [](const IntVec& u) {
        return (u[1] > 0 || (u[1] == 0 && u[0] > 0)) ? 0 : 1;
    };
    auto cross = [](const IntVec& u, const IntVec& w) -> Int { return u[0] * w[1] - u[1] * w[0]; };
    std::sort(pts.begin(), pts.end(), [&](const IntVec& u, const IntVec& w) {
        if (half(u) != half(w)) return half(u) < half(w);
        return cross(u, w) > 0;
    });
    return pts;
}

// All polygons with primitive vertices in the box, origin strictly inside,
// and every facet offset exactly 1, each emitted once with its vertices in
// counterclockwise angular order.  An edge u -> w of such a polygon satisfies
// cross(u, w) == gcd(w - u): that single equation encodes "inner normal is
// primitive with offset 1" and forces the origin strictly left of the edge,
// so a cycle of such edges with strictly convex turns is exactly a reflexive
// polygon.  Vertices of a polygon around the interior origin appear in
// angular order, so the walk only ever moves forward in the sorted point
// list, and each polygon is found exactly once, from its angularly smallest
// vertex.
inline std::vector<std::vector<IntVec>> enumerate_raw(long long bound) {
    if (bound < 2) throw std::invalid_argument("enumerate: bound must be at least 2");
    std::vector<IntVec> pts = primitive_box_points(bound);
    auto cross = [](const IntVec& u, const IntVec& w) -> Int { return u[0] * w[1] - u[1] * w[0]; };
    auto edge_ok = [&](const IntVec& u, const IntVec& w) {
        Int dx = w[0] - u[0], dy = w[1] - u[1];
        Int g = boost::multiprecision::gcd(boost::multiprecision::abs(dx),
                                           boost::multiprecision::abs(dy));
        return cross(u, w) == g;
    };
    auto turn_ok = [&](const IntVec& a, const IntVec& b, const IntVec& c) {
        IntVec ab = sub(b, a), bc = sub(c, b);
        return cross(ab, bc) > 0;
    };
    std::vector<std::vector<IntVec>> result;
    std::vector<std::size_t> path;
    auto dfs = [&](auto&& self, std::size_t last) -> void {
        if (path.size() >= 3) {
            const IntVec& first = pts[path[0]];
            const IntVec& second = pts[path[1]];
            const IntVec& prev = pts[path[path.size() - 2]];
            if (edge_ok(pts[last], first) && turn_ok(prev, pts[last], first) &&
                turn_ok(pts[last], first, second)) {
                std::vector<IntVec> polygon;
                for (std::size_t i : path) polygon.push_back(pts[i]);
                result.push_back(polygon);
            }
        }
        for (std::size_t next = last + 1; next < pts.size(); ++next) {
            if (!edge_ok(pts[last], pts[next])) continue;
            if (path.size() >= 2 &&
                !turn_ok(pts[path[path.size() - 2]], pts[last], pts[next]))
                continue;
            path.push_back(next);
            self(self, next);
            path.pop_back();
        }
    };
    for (std::size_t s = 0; s < pts.size(); ++s) {
        path.assign(1, s);
        dfs(dfs, s);
    }
    return result;
}

}  // namespace detail

// Representatives of the unimodular classes of reflexive polygons with
// vertices in [-bound, bound]^2, sorted by (vertex count, normalized volume,
// lexicographically smallest sorted vertex list).
inline std::vector<LatticePolytope> enumerate_reflexive_polygons(long long bound) {
    std::vector<std::vector<IntVec>> raw = detail::enumerate_raw(bound);
    std::vector<LatticePolytope> classes;
    for (const std::vector<IntVec>& vs : raw) {
        LatticePolytope P(vs);
        bool known = false;
        for (const LatticePolytope& rep : classes)
            if (unimodular_equivalent(rep, P)) {
                known = true;
                break;
            }
        if (!known) classes.push_back(P);
    }
    auto canonical = [](const LatticePolytope& P) {
        std::vector<IntVec> vs = P.vertices();
        std::sort(vs.begin(), vs.end(), [](const IntVec& a, const IntVec& b) {
            return lex_less(a, b);
        });
        return vs;
    };
    std::sort(classes.begin(), classes.end(),
              [&](const LatticePolytope& a, const LatticePolytope& b) {
                  if (a.vertices().size() != b.vertices().size())
                      return a.vertices().size() < b.vertices().size();
                  if (a.normalized_volume() != b.normalized_volume())
                      return a.normalized_volume() < b.normalized_volume();
                  std::vector<IntVec> ca = canonical(a), cb = canonical(b);
                  for (std::size_t i = 0; i < ca.size(); ++i) {
                      if (ca[i] != cb[i]) return lex_less(ca[i], cb[i]);
                  }
                  return false;
              });
    return classes;
}

}  // namespace polycert

#endif
