#ifndef POLYCERT_RATIONAL_HPP
#define POLYCERT_RATIONAL_HPP

// Exact scalar types and small vector helpers shared by every module.
// All arithmetic in this library is arbitrary-precision; nothing here or
// downstream ever touches floating point.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace polycert {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

// gcd with Bezout certificate: returns (g, x, y) with g = gcd(a, b) >= 0
// and x*a + y*b = g.
inline std::tuple<Int, Int, Int> ext_gcd(Int a, Int b) {
    Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        Int q = a / b;  // truncated division is fine: loop invariants are exact
        Int r = a - q * b;
        a = b;
        b = r;
        Int nx = x0 - q * x1, ny = y0 - q * y1;
        x0 = x1;
        y0 = y1;
        x1 = nx;
        y1 = ny;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    return {a, x0, y0};
}

// Floored quotient for b > 0; cpp_int's operator/ truncates toward zero.
inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b, r = a - q * b;
    if (r < 0) --q;
    return q;
}

inline Int dot(const IntVec& a, const IntVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Rat dot(const RatVec& a, const RatVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline IntVec sub(const IntVec& a, const IntVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch");
    IntVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline bool is_zero(const IntVec& v) {
    for (const Int& x : v)
        if (x != 0) return false;
    return true;
}

inline bool is_zero(const RatVec& v) {
    for (const Rat& x : v)
        if (x != 0) return false;
    return true;
}

inline RatVec to_rat(const IntVec& v) {
    RatVec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rat(v[i]);
    return r;
}

// Exact serialization used by reports: always "p/q", q > 0, reduced.
inline std::string rat_string(const Rat& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

// Coordinate serialization: integers shortened to "p", proper fractions "p/q".
inline std::string coord_string(const Rat& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

inline std::string coord_string(const RatVec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += coord_string(v[i]);
    }
    return s;
}

inline std::string vec_string(const IntVec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i].str();
    }
    return s + ")";
}

// Lexicographic order on integer vectors; total order used wherever an
// algorithm needs a deterministic choice of representative.
inline bool lex_less(const IntVec& a, const IntVec& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

inline bool lex_less(const RatVec& a, const RatVec& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

}  // namespace polycert

#endif  // POLYCERT_RATIONAL_HPP
