#ifndef POLYCERT_SUBSPACE_HPP
#define POLYCERT_SUBSPACE_HPP

// Linear and affine subspaces of Q^n with canonical representations, so that
// value equality is span equality and containers can deduplicate by value.
//
// Canonical form of a linear subspace: Hermite rows of the saturated lattice
// (span intersected with Z^n). Canonical form of an affine subspace: those
// direction rows plus the unique base point with zero entries in every
// direction pivot column.

#include "polycert/linalg.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace polycert {

class LinearSubspace {
public:
    explicit LinearSubspace(std::size_t ambient) : ambient_(ambient) {}

    LinearSubspace(std::size_t ambient, const std::vector<RatVec>& generators)
        : ambient_(ambient) {
        std::vector<IntVec> scaled;
        for (const RatVec& g : generators) {
            if (g.size() != ambient) throw std::invalid_argument("subspace: bad generator size");
            if (is_zero(g)) continue;
            Int lcm = 1;
            for (const Rat& x : g)
                lcm = lcm / boost::multiprecision::gcd(lcm, denominator(x)) * denominator(x);
            IntVec iv(ambient);
            for (std::size_t j = 0; j < ambient; ++j)
                iv[j] = numerator(g[j]) * (lcm / denominator(g[j]));
            scaled.push_back(primitive(iv));
        }
        init_from_int(scaled);
    }

    LinearSubspace(std::size_t ambient, const std::vector<IntVec>& generators)
        : ambient_(ambient) {
        std::vector<IntVec> nonzero;
        for (const IntVec& g : generators) {
            if (g.size() != ambient) throw std::invalid_argument("subspace: bad generator size");
            if (!is_zero(g)) nonzero.push_back(g);
        }
        init_from_int(nonzero);
    }

    std::size_t ambient() const { return ambient_; }
    std::size_t dim() const { return rows_.size(); }
    const std::vector<IntVec>& rows() const { return rows_; }

    bool contains(const RatVec& v) const {
        if (v.size() != ambient_) throw std::invalid_argument("subspace: bad vector size");
        std::vector<RatVec> gens;
        for (const IntVec& r : rows_) gens.push_back(to_rat(r));
        return in_span(gens, v);
    }

    bool contains(const IntVec& v) const { return contains(to_rat(v)); }

    bool contains(const LinearSubspace& other) const {
        for (const IntVec& r : other.rows_)
            if (!contains(r)) return false;
        return true;
    }

    bool operator==(const LinearSubspace& o) const {
        return ambient_ == o.ambient_ && rows_ == o.rows_;
    }
    bool operator!=(const LinearSubspace& o) const { return !(*this == o); }

    // Total order: by dimension, then canonical rows lexicographically.
    bool operator<(const LinearSubspace& o) const {
        if (dim() != o.dim()) return dim() < o.dim();
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (rows_[i] != o.rows_[i]) return lex_less(rows_[i], o.rows_[i]);
        }
        return false;
    }

private:
    void init_from_int(const std::vector<IntVec>& gens) {
        if (gens.empty()) return;
        IntMat G(gens.size(), ambient_);
        for (std::size_t i = 0; i < gens.size(); ++i)
            for (std::size_t j = 0; j < ambient_; ++j) G(i, j) = gens[i][j];
        // saturate: double orthogonal-complement kernel, then Hermite rows
        std::vector<IntVec> perp = kernel_lattice_basis(G);
        std::vector<IntVec> sat;
        if (perp.empty()) {
            for (std::size_t i = 0; i < ambient_; ++i) {
                IntVec e(ambient_, 0);
                e[i] = 1;
                sat.push_back(e);
            }
        } else {
            IntMat K(perp.size(), ambient_);
            for (std::size_t i = 0; i < perp.size(); ++i)
                for (std::size_t j = 0; j < ambient_; ++j) K(i, j) = perp[i][j];
            sat = kernel_lattice_basis(K);
        }
        if (sat.empty()) return;
        IntMat B(sat.size(), ambient_);
        for (std::size_t i = 0; i < sat.size(); ++i)
            for (std::size_t j = 0; j < ambient_; ++j) B(i, j) = sat[i][j];
        HnfResult h = hnf(B);
        for (std::size_t i = 0; i < h.H.rows(); ++i) {
            IntVec row = h.H.row(i);
            if (!is_zero(row)) rows_.push_back(row);
        }
    }

    std::size_t ambient_;
    std::vector<IntVec> rows_;
};

inline std::size_t sum_dim(const LinearSubspace& a, const LinearSubspace& b) {
    if (a.ambient() != b.ambient()) throw std::invalid_argument("sum_dim: ambient mismatch");
    std::vector<std::vector<Rat>> all;
    for (const IntVec& r : a.rows()) all.push_back(to_rat(r));
    for (const IntVec& r : b.rows()) all.push_back(to_rat(r));
    if (all.empty()) return 0;
    RatMat M(all.size(), a.ambient());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = 0; j < a.ambient(); ++j) M(i, j) = all[i][j];
    return rank(M);
}

inline std::size_t intersect_dim(const LinearSubspace& a, const LinearSubspace& b) {
    return a.dim() + b.dim() - sum_dim(a, b);
}

// Direct-sum test: a + b = ambient space and a, b intersect trivially.
inline bool complementary(const LinearSubspace& a, const LinearSubspace& b) {
    return a.dim() + b.dim() == a.ambient() && sum_dim(a, b) == a.ambient();
}

class AffineSubspace {
public:
    AffineSubspace(const RatVec& point, const LinearSubspace& dirs)
        : base_(point), dirs_(dirs) {
        if (point.size() != dirs.ambient())
            throw std::invalid_argument("affine subspace: base/dirs mismatch");
        reduce_base();
    }

    // Affine span of a nonempty point set.
    static AffineSubspace span_of(const std::vector<RatVec>& points, std::size_t ambient) {
        if (points.empty()) throw std::invalid_argument("affine span: empty point set");
        std::vector<RatVec> diffs;
        for (std::size_t i = 1; i < points.size(); ++i) {
            RatVec d(ambient);
            for (std::size_t j = 0; j < ambient; ++j) d[j] = points[i][j] - points[0][j];
            diffs.push_back(d);
        }
        return AffineSubspace(points[0], LinearSubspace(ambient, diffs));
    }

    std::size_t ambient() const { return dirs_.ambient(); }
    std::size_t dim() const { return dirs_.dim(); }
    const RatVec& base() const { return base_; }
    const LinearSubspace& dirs() const { return dirs_; }

    bool contains(const RatVec& p) const {
        RatVec d(p.size());
        for (std::size_t j = 0; j < p.size(); ++j) d[j] = p[j] - base_[j];
        return dirs_.contains(d);
    }

    bool contains(const IntVec& p) const { return contains(to_rat(p)); }

    // Linear span of {(a, -1) : a in this subspace} in one dimension more.
    LinearSubspace lift() const {
        std::vector<RatVec> gens;
        RatVec b(ambient() + 1);
        for (std::size_t j = 0; j < ambient(); ++j) b[j] = base_[j];
        b[ambient()] = Rat(-1);
        gens.push_back(b);
        for (const IntVec& d : dirs_.rows()) {
            RatVec g(ambient() + 1, Rat(0));
            for (std::size_t j = 0; j < ambient(); ++j) g[j] = Rat(d[j]);
            gens.push_back(g);
        }
        return LinearSubspace(ambient() + 1, gens);
    }

    bool operator==(const AffineSubspace& o) const {
        return base_ == o.base_ && dirs_ == o.dirs_;
    }
    bool operator!=(const AffineSubspace& o) const { return !(*this == o); }

    bool operator<(const AffineSubspace& o) const {
        if (dirs_ != o.dirs_) return dirs_ < o.dirs_;
        return lex_less(base_, o.base_);
    }

private:
    // The canonical base is the unique point of the subspace whose entries
    // vanish at every direction pivot column. Hermite rows are echelon, so a
    // single top-down sweep settles each pivot for good.
    void reduce_base() {
        for (const IntVec& row : dirs_.rows()) {
            std::size_t p = 0;
            while (p < row.size() && row[p] == 0) ++p;
            if (p == row.size()) continue;
            Rat f = base_[p] / Rat(row[p]);
            if (f == 0) continue;
            for (std::size_t j = 0; j < base_.size(); ++j) base_[j] -= f * Rat(row[j]);
        }
    }

    RatVec base_;
    LinearSubspace dirs_;
};

// Two affine subspaces of Q^n are complementary when their lifts split
// Q^(n+1) as a direct sum; equivalently the dimensions sum to n - 1, they
// are disjoint, and their joint affine span is everything.
inline bool complementary(const AffineSubspace& a, const AffineSubspace& b) {
    return complementary(a.lift(), b.lift());
}

}  // namespace polycert

#endif  // POLYCERT_SUBSPACE_HPP
