#ifndef POLYCERT_LINALG_HPP
#define POLYCERT_LINALG_HPP

// Exact integer and rational linear algebra: Hermite and Smith normal forms,
// saturated kernel lattice bases, affine hulls, fraction-free rank and
// determinant, and exact solvers. Everything is deterministic; tests pin
// outputs bit-for-bit against the conventions documented below.

#include "polycert/matrix.hpp"
#include "polycert/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace polycert {

// Primitive representative of a nonzero integer vector: v divided by the gcd
// of its entries. The direction is preserved (positive scalar multiple);
// the zero vector is rejected.
inline IntVec primitive(const IntVec& v) {
    Int g = 0;
    for (const Int& x : v) g = boost::multiprecision::gcd(g, x);
    if (g == 0) throw std::invalid_argument("zero has no primitive representative");
    IntVec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] / g;
    return r;
}

struct HnfResult {
    IntMat H;  // row-style Hermite normal form of the input
    IntMat U;  // unimodular, H = U * A
};

// Row-style Hermite normal form. Conventions, pinned by tests:
//   - pivots are positive and move strictly right as the row index grows;
//   - zero rows are at the bottom;
//   - entries above each pivot are reduced into [0, pivot);
//   - H = U * A with det U = +-1.
inline HnfResult hnf(const IntMat& A) {
    IntMat H = A;
    IntMat U = IntMat::identity(A.rows());
    std::size_t m = A.rows(), n = A.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t piv = m;
        for (std::size_t i = r; i < m; ++i) {
            if (H(i, c) != 0) {
                piv = i;
                break;
            }
        }
        if (piv == m) continue;
        H.swap_rows(r, piv);
        U.swap_rows(r, piv);
        for (std::size_t i = r + 1; i < m; ++i) {
            if (H(i, c) == 0) continue;
            if (H(i, c) % H(r, c) == 0) {
                // plain elimination; keeps the pivot row untouched
                Int q = H(i, c) / H(r, c);
                for (std::size_t j = 0; j < n; ++j) H(i, j) -= q * H(r, j);
                for (std::size_t j = 0; j < m; ++j) U(i, j) -= q * U(r, j);
                continue;
            }
            auto [g, x, y] = ext_gcd(H(r, c), H(i, c));
            Int a = H(r, c) / g, b = H(i, c) / g;
            // 2x2 unimodular transform on rows r and i, det = (x*a + y*b) = 1
            for (std::size_t j = 0; j < n; ++j) {
                Int hr = H(r, j), hi = H(i, j);
                H(r, j) = x * hr + y * hi;
                H(i, j) = a * hi - b * hr;
            }
            for (std::size_t j = 0; j < m; ++j) {
                Int ur = U(r, j), ui = U(i, j);
                U(r, j) = x * ur + y * ui;
                U(i, j) = a * ui - b * ur;
            }
        }
        if (H(r, c) < 0) {
            for (std::size_t j = 0; j < n; ++j) H(r, j) = -H(r, j);
            for (std::size_t j = 0; j < m; ++j) U(r, j) = -U(r, j);
        }
        for (std::size_t i = 0; i < r; ++i) {
            Int q = floor_div(H(i, c), H(r, c));
            if (q == 0) continue;
            for (std::size_t j = 0; j < n; ++j) H(i, j) -= q * H(r, j);
            for (std::size_t j = 0; j < m; ++j) U(i, j) -= q * U(r, j);
        }
        ++r;
    }
    return {H, U};
}

struct SnfResult {
    IntMat S;  // diagonal, d_i >= 0, d_i | d_{i+1}
    IntMat U;  // unimodular, S = U * A * V
    IntMat V;  // unimodular
};

// Smith normal form via alternating row/column gcd elimination with a
// divisibility sweep, so the invariant-factor chain needs no postprocessing.
inline SnfResult snf(const IntMat& A) {
    IntMat S = A;
    std::size_t m = A.rows(), n = A.cols();
    IntMat U = IntMat::identity(m);
    IntMat V = IntMat::identity(n);

    // The divisible case stays plain elimination so pivot rows/columns are
    // never rewritten; the gcd mix runs only when it strictly shrinks the
    // pivot, which is what bounds the sweep loop below.
    auto row_combine = [&](std::size_t rt, std::size_t ri) {
        if (S(ri, rt) % S(rt, rt) == 0) {
            Int q = S(ri, rt) / S(rt, rt);
            for (std::size_t j = 0; j < n; ++j) S(ri, j) -= q * S(rt, j);
            for (std::size_t j = 0; j < m; ++j) U(ri, j) -= q * U(rt, j);
            return;
        }
        auto [g, x, y] = ext_gcd(S(rt, rt), S(ri, rt));
        Int a = S(rt, rt) / g, b = S(ri, rt) / g;
        for (std::size_t j = 0; j < n; ++j) {
            Int sr = S(rt, j), si = S(ri, j);
            S(rt, j) = x * sr + y * si;
            S(ri, j) = a * si - b * sr;
        }
        for (std::size_t j = 0; j < m; ++j) {
            Int ur = U(rt, j), ui = U(ri, j);
            U(rt, j) = x * ur + y * ui;
            U(ri, j) = a * ui - b * ur;
        }
    };
    auto col_combine = [&](std::size_t ct, std::size_t cj) {
        if (S(ct, cj) % S(ct, ct) == 0) {
            Int q = S(ct, cj) / S(ct, ct);
            for (std::size_t i = 0; i < m; ++i) S(i, cj) -= q * S(i, ct);
            for (std::size_t i = 0; i < n; ++i) V(i, cj) -= q * V(i, ct);
            return;
        }
        auto [g, x, y] = ext_gcd(S(ct, ct), S(ct, cj));
        Int a = S(ct, ct) / g, b = S(ct, cj) / g;
        for (std::size_t i = 0; i < m; ++i) {
            Int sc = S(i, ct), sj = S(i, cj);
            S(i, ct) = x * sc + y * sj;
            S(i, cj) = a * sj - b * sc;
        }
        for (std::size_t i = 0; i < n; ++i) {
            Int vc = V(i, ct), vj = V(i, cj);
            V(i, ct) = x * vc + y * vj;
            V(i, cj) = a * vj - b * vc;
        }
    };

    std::size_t bound = std::min(m, n);
    for (std::size_t t = 0; t < bound; ++t) {
        // pivot search in the trailing block
        std::size_t pi = m, pj = n;
        for (std::size_t i = t; i < m && pi == m; ++i)
            for (std::size_t j = t; j < n; ++j)
                if (S(i, j) != 0) {
                    pi = i;
                    pj = j;
                    break;
                }
        if (pi == m) break;  // trailing block is zero
        S.swap_rows(t, pi);
        U.swap_rows(t, pi);
        S.swap_cols(t, pj);
        V.swap_cols(t, pj);

        for (;;) {
            for (std::size_t i = t + 1; i < m; ++i)
                if (S(i, t) != 0) row_combine(t, i);
            for (std::size_t j = t + 1; j < n; ++j)
                if (S(t, j) != 0) col_combine(t, j);
            bool clean = true;
            for (std::size_t i = t + 1; i < m && clean; ++i)
                if (S(i, t) != 0) clean = false;
            for (std::size_t j = t + 1; j < n && clean; ++j)
                if (S(t, j) != 0) clean = false;
            if (!clean) continue;
            // divisibility sweep: the pivot must divide the whole trailing block
            std::size_t bi = m, bj = n;
            for (std::size_t i = t + 1; i < m && bi == m; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (S(i, j) % S(t, t) != 0) {
                        bi = i;
                        bj = j;
                        break;
                    }
            if (bi == m) break;
            // fold the offending row into the pivot row and re-eliminate
            for (std::size_t j = 0; j < n; ++j) S(t, j) += S(bi, j);
            for (std::size_t j = 0; j < m; ++j) U(t, j) += U(bi, j);
        }
        if (S(t, t) < 0) {
            for (std::size_t j = 0; j < n; ++j) S(t, j) = -S(t, j);
            for (std::size_t j = 0; j < m; ++j) U(t, j) = -U(t, j);
        }
    }
    return {S, U, V};
}

// Bareiss fraction-free determinant; every intermediate division is exact.
inline Int det(const IntMat& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("det: matrix not square");
    std::size_t n = A.rows();
    if (n == 0) return 1;
    IntMat M = A;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (M(k, k) == 0) {
            std::size_t piv = n;
            for (std::size_t i = k + 1; i < n; ++i)
                if (M(i, k) != 0) {
                    piv = i;
                    break;
                }
            if (piv == n) return 0;
            M.swap_rows(k, piv);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                M(i, j) = (M(i, j) * M(k, k) - M(i, k) * M(k, j)) / prev;
            M(i, k) = 0;
        }
        prev = M(k, k);
    }
    return sign * M(n - 1, n - 1);
}

// Fraction-free rank (Bareiss elimination with column skipping).
inline std::size_t rank(const IntMat& A) {
    if (A.empty()) return 0;
    IntMat M = A;
    std::size_t m = M.rows(), n = M.cols();
    std::size_t r = 0;
    Int prev = 1;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t piv = m;
        for (std::size_t i = r; i < m; ++i)
            if (M(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv == m) continue;
        M.swap_rows(r, piv);
        for (std::size_t i = r + 1; i < m; ++i) {
            for (std::size_t j = c + 1; j < n; ++j)
                M(i, j) = (M(i, j) * M(r, c) - M(i, c) * M(r, j)) / prev;
            M(i, c) = 0;
        }
        prev = M(r, c);
        ++r;
    }
    return r;
}

// Rational rank: clear denominators row-wise, then run the integer path.
inline std::size_t rank(const RatMat& A) {
    if (A.empty()) return 0;
    IntMat M(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        Int d = 1;
        for (std::size_t j = 0; j < A.cols(); ++j)
            d = d / boost::multiprecision::gcd(d, denominator(A(i, j))) * denominator(A(i, j));
        for (std::size_t j = 0; j < A.cols(); ++j)
            M(i, j) = numerator(A(i, j)) * (d / denominator(A(i, j)));
    }
    return rank(M);
}

// Basis of the saturated kernel lattice {x integral : A x = 0}. Columns of
// the Smith multiplier V whose image under A vanishes; saturation follows
// from V being unimodular. Output rows are deterministic.
inline std::vector<IntVec> kernel_lattice_basis(const IntMat& A) {
    std::size_t m = A.rows(), n = A.cols();
    if (n == 0) return {};
    if (m == 0) {
        std::vector<IntVec> basis;
        for (std::size_t i = 0; i < n; ++i) {
            IntVec e(n, 0);
            e[i] = 1;
            basis.push_back(e);
        }
        return basis;
    }
    SnfResult s = snf(A);
    std::vector<IntVec> basis;
    for (std::size_t i = 0; i < n; ++i) {
        bool in_kernel = (i >= m) || (i >= std::min(m, n)) || (s.S(i, i) == 0);
        if (in_kernel) basis.push_back(s.V.col(i));
    }
    return basis;
}

struct AffineHull {
    std::size_t dim;           // affine dimension of the point set
    std::vector<IntVec> dirs;  // integer rows spanning the direction space over Q
};

// Affine hull of a nonempty set of lattice points. Directions are the
// nonzero rows of the Hermite form of all differences against the first
// point: canonical for the lattice those differences generate, and a
// Q-basis of the direction space of the hull.
inline AffineHull affine_hull(const std::vector<IntVec>& points) {
    if (points.empty()) throw std::invalid_argument("affine_hull: empty point set");
    std::size_t n = points[0].size();
    IntMat D(points.size() - 1, n);
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].size() != n) throw std::invalid_argument("affine_hull: mixed dimensions");
        for (std::size_t j = 0; j < n; ++j) D(i - 1, j) = points[i][j] - points[0][j];
    }
    if (points.size() == 1) return {0, {}};
    HnfResult h = hnf(D);
    std::vector<IntVec> dirs;
    for (std::size_t i = 0; i < h.H.rows(); ++i) {
        IntVec row = h.H.row(i);
        if (!is_zero(row)) dirs.push_back(row);
    }
    return {dirs.size(), dirs};
}

struct Rref {
    RatMat R;
    std::vector<std::size_t> pivots;  // pivot column per nonzero row
};

inline Rref rref(const RatMat& A) {
    RatMat R = A;
    std::vector<std::size_t> pivots;
    std::size_t m = R.rows(), n = R.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t piv = m;
        for (std::size_t i = r; i < m; ++i)
            if (R(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv == m) continue;
        R.swap_rows(r, piv);
        Rat inv = Rat(1) / R(r, c);
        for (std::size_t j = c; j < n; ++j) R(r, j) *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || R(i, c) == 0) continue;
            Rat f = R(i, c);
            for (std::size_t j = c; j < n; ++j) R(i, j) -= f * R(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return {R, pivots};
}

// One exact solution of A x = b over the rationals, or nullopt. Free
// variables are set to zero, so the solution is deterministic.
inline std::optional<RatVec> solve(const RatMat& A, const RatVec& b) {
    if (A.rows() != b.size()) throw std::invalid_argument("solve: shape mismatch");
    std::size_t m = A.rows(), n = A.cols();
    RatMat Ab(m, n + 1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) Ab(i, j) = A(i, j);
        Ab(i, n) = b[i];
    }
    Rref rr = rref(Ab);
    RatVec x(n, Rat(0));
    for (std::size_t r = 0; r < rr.pivots.size(); ++r) {
        if (rr.pivots[r] == n) return std::nullopt;  // inconsistent row
        x[rr.pivots[r]] = rr.R(r, n);
    }
    return x;
}

// One integral solution of A x = b, or nullopt, via the Smith form:
// with S = U A V, solve S y = U b exactly and map back by x = V y.
inline std::optional<IntVec> integer_solve(const IntMat& A, const IntVec& b) {
    if (A.rows() != b.size()) throw std::invalid_argument("integer_solve: shape mismatch");
    std::size_t m = A.rows(), n = A.cols();
    SnfResult s = snf(A);
    IntVec ub = mat_vec(s.U, b);
    IntVec y(n, 0);
    for (std::size_t i = 0; i < m; ++i) {
        Int d = (i < std::min(m, n)) ? s.S(i, i) : Int(0);
        if (d == 0) {
            if (ub[i] != 0) return std::nullopt;
        } else {
            if (ub[i] % d != 0) return std::nullopt;
            y[i] = ub[i] / d;
        }
    }
    return mat_vec(s.V, y);
}

// Is v in the Q-span of the given vectors?
inline bool in_span(const std::vector<RatVec>& gens, const RatVec& v) {
    if (is_zero(v)) return true;
    RatMat G(gens.size(), v.size());
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) G(i, j) = gens[i][j];
    std::size_t r0 = rank(G);
    RatMat Gv(gens.size() + 1, v.size());
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) Gv(i, j) = gens[i][j];
    for (std::size_t j = 0; j < v.size(); ++j) Gv(gens.size(), j) = v[j];
    return rank(Gv) == r0;
}

}  // namespace polycert

#endif  // POLYCERT_LINALG_HPP
