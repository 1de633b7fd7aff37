#ifndef POLYCERT_POLYTOPE_HPP
#define POLYCERT_POLYTOPE_HPP

// Full-dimensional lattice polytopes with exact facet data.
//
// A polytope is immutable after validated construction: the vertex list must
// be a duplicate-free, full-dimensional set in which every point is a true
// vertex of the hull (checked exhaustively with rational barycentric
// coordinates; invalid input is rejected, never repaired). Facets are found
// by testing every hyperplane spanned by n vertices against the whole vertex
// set, which is exhaustive at the input sizes this library targets.
//
// Conventions:
//   - facet normals are primitive inner normals: <u, v> >= -offset for all
//     vertices u, with equality exactly on the facet;
//   - facet lattice volume is the normalized (n-1)-volume of the facet
//     written in coordinates of the saturated kernel lattice of its normal;
//   - normalized n-volume is n! times the Euclidean volume, computed from a
//     fan triangulation over the lexicographically smallest vertex that
//     recurses on facet boundary triangulations.

#include "polycert/linalg.hpp"
#include "polycert/subspace.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polycert {

struct Facet {
    IntVec normal;                      // primitive inner normal
    Int offset;                         // <u, normal> >= -offset on the polytope
    std::vector<std::size_t> vertices;  // incident vertex indices, ascending
    Int lattice_volume;                 // normalized (n-1)-volume of the facet
};

struct Edge {
    std::size_t a, b;    // vertex indices, a < b
    Int lattice_length;  // number of lattice steps along the edge
};

struct ReflexivityReport {
    bool reflexive;
    std::string reason;  // empty when reflexive, else names the violating facet
};

struct SmoothnessReport {
    bool smooth;
    std::string reason;                        // empty when smooth
    std::optional<std::size_t> witness_vertex;  // vertex violating the criterion
    std::optional<Int> witness_det;             // edge-direction determinant there
};

namespace detail {

// Subset iteration helper: calls fn on every k-subset of {0, .., n-1}.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        fn(static_cast<const std::vector<std::size_t>&>(idx));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Is p a convex combination of the given points? Exhaustive over affinely
// independent subsets (Caratheodory), solved with exact barycentric
// coordinates.
inline bool in_convex_hull(const IntVec& p, const std::vector<IntVec>& points, std::size_t n) {
    for (std::size_t k = 1; k <= n + 1 && k <= points.size(); ++k) {
        bool found = false;
        for_each_subset(points.size(), k, [&](const std::vector<std::size_t>& idx) {
            if (found) return;
            std::vector<IntVec> support;
            for (std::size_t i : idx) support.push_back(points[i]);
            if (affine_hull(support).dim != k - 1) return;  // affinely dependent
            RatMat M(n + 1, k);
            RatVec rhs(n + 1);
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < k; ++c) M(r, c) = Rat(support[c][r]);
                rhs[r] = Rat(p[r]);
            }
            for (std::size_t c = 0; c < k; ++c) M(n, c) = Rat(1);
            rhs[n] = Rat(1);
            auto lambda = solve(M, rhs);
            if (!lambda) return;
            for (const Rat& l : *lambda)
                if (l < 0) return;
            found = true;
        });
        if (found) return true;
    }
    return false;
}

struct FacetGeom {
    IntVec normal;
    Int offset;
    std::vector<std::size_t> vertices;
};

// All facets of a full-dimensional point configuration, via supporting
// hyperplanes through n-subsets. Sorted by (normal, offset) so downstream
// output is deterministic.
inline std::vector<FacetGeom> enumerate_facets(const std::vector<IntVec>& points, std::size_t n) {
    std::map<std::pair<IntVec, Int>, std::vector<std::size_t>,
             bool (*)(const std::pair<IntVec, Int>&, const std::pair<IntVec, Int>&)>
        found(+[](const std::pair<IntVec, Int>& a, const std::pair<IntVec, Int>& b) {
            if (a.first != b.first) return lex_less(a.first, b.first);
            return a.second < b.second;
        });
    for_each_subset(points.size(), n, [&](const std::vector<std::size_t>& idx) {
        std::vector<IntVec> span_pts;
        for (std::size_t i : idx) span_pts.push_back(points[i]);
        AffineHull hull = affine_hull(span_pts);
        if (hull.dim != n - 1) return;
        IntMat D(hull.dirs.size(), n);
        for (std::size_t i = 0; i < hull.dirs.size(); ++i)
            for (std::size_t j = 0; j < n; ++j) D(i, j) = hull.dirs[i][j];
        std::vector<IntVec> kern = kernel_lattice_basis(D);
        if (kern.size() != 1) return;
        IntVec w = kern[0];
        // orient inner: all vertices on the nonnegative side
        bool any_pos = false, any_neg = false;
        for (const IntVec& u : points) {
            Int t = dot(sub(u, points[idx[0]]), w);
            if (t > 0) any_pos = true;
            if (t < 0) any_neg = true;
        }
        if (any_pos && any_neg) return;  // not supporting
        if (any_neg) {
            for (Int& x : w) x = -x;
        }
        Int c = -dot(points[idx[0]], w);
        std::vector<std::size_t> incident;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (dot(points[i], w) == -c) incident.push_back(i);
        found[{w, c}] = incident;
    });
    std::vector<FacetGeom> out;
    for (auto& [key, inc] : found) out.push_back({key.first, key.second, inc});
    return out;
}

// Coordinates of facet points in the saturated kernel lattice of the normal,
// relative to the first point. An optional unimodular mixer recombines the
// kernel basis; any choice gives the same lattice volume.
inline std::vector<IntVec> facet_coordinates(const std::vector<IntVec>& pts, const IntVec& normal,
                                             const IntMat* mixer = nullptr) {
    std::size_t n = normal.size();
    IntMat W(1, n);
    for (std::size_t j = 0; j < n; ++j) W(0, j) = normal[j];
    std::vector<IntVec> basis = kernel_lattice_basis(W);
    std::size_t d = basis.size();  // n - 1
    if (mixer) {
        if (mixer->rows() != d || mixer->cols() != d)
            throw std::invalid_argument("facet_coordinates: mixer shape");
        std::vector<IntVec> mixed(d, IntVec(n, 0));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t j = 0; j < n; ++j) mixed[i][j] += (*mixer)(i, k) * basis[k][j];
        basis = mixed;
    }
    std::vector<IntVec> coords;
    RatMat B(n, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < n; ++j) B(j, i) = Rat(basis[i][j]);
    for (const IntVec& u : pts) {
        RatVec rhs(n);
        for (std::size_t j = 0; j < n; ++j) rhs[j] = Rat(u[j] - pts[0][j]);
        auto y = solve(B, rhs);
        if (!y) throw std::logic_error("facet_coordinates: point outside facet plane");
        IntVec iy(d);
        for (std::size_t i = 0; i < d; ++i) {
            if (denominator((*y)[i]) != 1)
                throw std::logic_error("facet_coordinates: non-integral coordinate");
            iy[i] = numerator((*y)[i]);
        }
        coords.push_back(iy);
    }
    return coords;
}

inline std::size_t lex_min_index(const std::vector<IntVec>& points) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
        if (lex_less(points[i], points[best])) best = i;
    return best;
}

// Fan triangulation of a full-dimensional configuration: cone from the apex
// over triangulations of the facets the apex misses. Returns simplices as
// index (n+1)-tuples into the input.
inline std::vector<std::vector<std::size_t>> triangulate_fan(const std::vector<IntVec>& points,
                                                             std::size_t n, std::size_t apex) {
    if (points.size() == n + 1) {
        std::vector<std::size_t> all(points.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return {all};
    }
    std::vector<std::vector<std::size_t>> simplices;
    for (const FacetGeom& f : enumerate_facets(points, n)) {
        if (std::find(f.vertices.begin(), f.vertices.end(), apex) != f.vertices.end()) continue;
        std::vector<IntVec> fpts;
        for (std::size_t i : f.vertices) fpts.push_back(points[i]);
        std::vector<IntVec> coords = facet_coordinates(fpts, f.normal);
        auto sub = triangulate_fan(coords, n - 1, lex_min_index(coords));
        for (const auto& s : sub) {
            std::vector<std::size_t> simplex;
            simplex.push_back(apex);
            for (std::size_t local : s) simplex.push_back(f.vertices[local]);
            simplices.push_back(simplex);
        }
    }
    return simplices;
}

inline Int simplex_volume(const std::vector<IntVec>& points, const std::vector<std::size_t>& s,
                          std::size_t n) {
    IntMat M(n, n);
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 0; j < n; ++j) M(i - 1, j) = points[s[i]][j] - points[s[0]][j];
    return boost::multiprecision::abs(det(M));
}

inline Int normalized_volume_points(const std::vector<IntVec>& points, std::size_t n) {
    if (n == 0) return 1;  // a point has normalized volume one
    Int total = 0;
    for (const auto& s : triangulate_fan(points, n, lex_min_index(points)))
        total += simplex_volume(points, s, n);
    return total;
}

}  // namespace detail

class LatticePolytope {
public:
    explicit LatticePolytope(std::vector<IntVec> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.empty()) throw std::invalid_argument("polytope: empty vertex list");
        n_ = vertices_[0].size();
        if (n_ == 0) throw std::invalid_argument("polytope: ambient dimension is zero");
        for (const IntVec& u : vertices_)
            if (u.size() != n_) throw std::invalid_argument("polytope: mixed vertex dimensions");
        for (std::size_t i = 0; i < vertices_.size(); ++i)
            for (std::size_t j = i + 1; j < vertices_.size(); ++j)
                if (vertices_[i] == vertices_[j])
                    throw std::invalid_argument("polytope: duplicate vertex " + vec_string(vertices_[i]));
        if (affine_hull(vertices_).dim != n_)
            throw std::invalid_argument("polytope: not full-dimensional");
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            std::vector<IntVec> others;
            for (std::size_t j = 0; j < vertices_.size(); ++j)
                if (j != i) others.push_back(vertices_[j]);
            if (detail::in_convex_hull(vertices_[i], others, n_))
                throw std::invalid_argument("polytope: point " + vec_string(vertices_[i]) +
                                            " is not a vertex");
        }
        compute_facets();
    }

    std::size_t dim() const { return n_; }
    const std::vector<IntVec>& vertices() const { return vertices_; }
    const std::vector<Facet>& facets() const { return facets_; }

    // All facet offsets equal one; the failure reason names a witness facet.
    ReflexivityReport is_reflexive() const {
        for (const Facet& f : facets_) {
            if (f.offset != 1)
                return {false, "facet with normal " + vec_string(f.normal) + " has offset " +
                                    f.offset.str()};
        }
        return {true, ""};
    }

    // Every vertex has exactly n edges whose primitive directions form a
    // lattice basis (determinant of absolute value one).
    SmoothnessReport is_smooth() const {
        std::vector<Edge> es = edges();
        for (std::size_t v = 0; v < vertices_.size(); ++v) {
            std::vector<std::size_t> nbrs;
            for (const Edge& e : es) {
                if (e.a == v) nbrs.push_back(e.b);
                if (e.b == v) nbrs.push_back(e.a);
            }
            std::sort(nbrs.begin(), nbrs.end());
            if (nbrs.size() != n_)
                return {false,
                        "vertex " + vec_string(vertices_[v]) + " has " +
                            std::to_string(nbrs.size()) + " edges, expected " + std::to_string(n_),
                        v, std::nullopt};
            IntMat M(n_, n_);
            for (std::size_t i = 0; i < n_; ++i) {
                IntVec dir = primitive(sub(vertices_[nbrs[i]], vertices_[v]));
                for (std::size_t j = 0; j < n_; ++j) M(i, j) = dir[j];
            }
            Int d = det(M);
            if (d != 1 && d != -1)
                return {false,
                        "vertex " + vec_string(vertices_[v]) +
                            " has edge-direction determinant " + d.str(),
                        v, d};
        }
        return {true, "", std::nullopt, std::nullopt};
    }

    // Exact centroid: volume-weighted average of simplex centroids of the fan
    // triangulation. The apex parameter exists so independence of the apex
    // can be asserted; every choice returns the same point.
    RatVec barycenter(std::optional<std::size_t> apex = std::nullopt) const {
        std::size_t a = apex.value_or(detail::lex_min_index(vertices_));
        if (a >= vertices_.size()) throw std::invalid_argument("barycenter: apex out of range");
        Rat total = 0;
        RatVec acc(n_, Rat(0));
        for (const auto& s : detail::triangulate_fan(vertices_, n_, a)) {
            Rat vol(detail::simplex_volume(vertices_, s, n_));
            total += vol;
            for (std::size_t j = 0; j < n_; ++j) {
                Rat c = 0;
                for (std::size_t i : s) c += Rat(vertices_[i][j]);
                acc[j] += vol * c / Rat(static_cast<unsigned>(s.size()));
            }
        }
        for (std::size_t j = 0; j < n_; ++j) acc[j] /= total;
        return acc;
    }

    bool is_centered() const {
        RatVec b = barycenter();
        return is_zero(b);
    }

    Int normalized_volume() const { return detail::normalized_volume_points(vertices_, n_); }

    // (a, b) is an edge when at least n-1 facets contain both endpoints and
    // the vertices common to all those facets are exactly {a, b}.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (std::size_t a = 0; a < vertices_.size(); ++a) {
            for (std::size_t b = a + 1; b < vertices_.size(); ++b) {
                std::vector<const Facet*> common;
                for (const Facet& f : facets_) {
                    bool ha = std::binary_search(f.vertices.begin(), f.vertices.end(), a);
                    bool hb = std::binary_search(f.vertices.begin(), f.vertices.end(), b);
                    if (ha && hb) common.push_back(&f);
                }
                if (common.size() + 1 < n_) continue;
                std::vector<std::size_t> inter;
                for (std::size_t v = 0; v < vertices_.size(); ++v) {
                    bool in_all = true;
                    for (const Facet* f : common)
                        if (!std::binary_search(f->vertices.begin(), f->vertices.end(), v)) {
                            in_all = false;
                            break;
                        }
                    if (in_all) inter.push_back(v);
                }
                if (inter == std::vector<std::size_t>{a, b}) {
                    IntVec diff = sub(vertices_[b], vertices_[a]);
                    Int g = 0;
                    for (const Int& x : diff) g = boost::multiprecision::gcd(g, x);
                    out.push_back({a, b, boost::multiprecision::abs(g)});
                }
            }
        }
        return out;
    }

    // Vertices of the polar dual {y : <u, y> >= -1 for all vertices u}.
    // Requires the origin strictly inside; vertices come out sorted.
    std::vector<RatVec> dual_vertices() const {
        for (const Facet& f : facets_)
            if (f.offset <= 0) throw std::invalid_argument("dual: origin is not interior");
        std::vector<RatVec> out;
        detail::for_each_subset(vertices_.size(), n_, [&](const std::vector<std::size_t>& idx) {
            RatMat M(n_, n_);
            RatVec rhs(n_, Rat(-1));
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = 0; j < n_; ++j) M(i, j) = Rat(vertices_[idx[i]][j]);
            if (rank(M) != n_) return;
            auto y = solve(M, rhs);
            if (!y) return;
            for (const IntVec& u : vertices_)
                if (dot(to_rat(u), *y) < -1) return;
            if (std::find(out.begin(), out.end(), *y) == out.end()) out.push_back(*y);
        });
        std::sort(out.begin(), out.end(),
                  [](const RatVec& a, const RatVec& b) { return lex_less(a, b); });
        return out;
    }

    // The dual as a lattice polytope; integral exactly when P is reflexive.
    LatticePolytope dual_polytope() const {
        std::vector<IntVec> verts;
        for (const RatVec& y : dual_vertices()) {
            IntVec iv(n_);
            for (std::size_t j = 0; j < n_; ++j) {
                if (denominator(y[j]) != 1)
                    throw std::invalid_argument("dual: dual polytope is not a lattice polytope");
                iv[j] = numerator(y[j]);
            }
            verts.push_back(iv);
        }
        return LatticePolytope(verts);
    }

    // Facet lattice volume recomputed with a recombined kernel basis; the
    // mixer must be unimodular. Exposed so basis independence is testable.
    Int facet_volume_with_basis(std::size_t facet_index, const IntMat& mixer) const {
        const Facet& f = facets_.at(facet_index);
        std::vector<IntVec> pts;
        for (std::size_t i : f.vertices) pts.push_back(vertices_[i]);
        std::vector<IntVec> coords = detail::facet_coordinates(pts, f.normal, &mixer);
        return detail::normalized_volume_points(coords, n_ - 1);
    }

private:
    void compute_facets() {
        for (const detail::FacetGeom& g : detail::enumerate_facets(vertices_, n_)) {
            std::vector<IntVec> pts;
            for (std::size_t i : g.vertices) pts.push_back(vertices_[i]);
            std::vector<IntVec> coords = detail::facet_coordinates(pts, g.normal);
            Int vol = detail::normalized_volume_points(coords, n_ - 1);
            facets_.push_back({g.normal, g.offset, g.vertices, vol});
        }
    }

    std::vector<IntVec> vertices_;
    std::size_t n_ = 0;
    std::vector<Facet> facets_;
};

}  // namespace polycert

#endif  // POLYCERT_POLYTOPE_HPP
