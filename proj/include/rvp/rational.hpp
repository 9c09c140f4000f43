#pragma once

// Exact arithmetic helpers: rationals, integer lattice vectors, small dense
// linear algebra over Q, and unimodular reductions for D <= 4.

#include "rvp/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace rvp {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using LatticeVector = std::vector<std::int64_t>;
using RationalVector = std::vector<Rational>;
using RealVector = std::vector<double>;
using RationalMatrix = std::vector<RationalVector>;
using IntMatrix = std::vector<LatticeVector>;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

inline std::string format_rational(const Rational& r) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(r);
    if (boost::multiprecision::denominator(r) != 1) os << '/' << boost::multiprecision::denominator(r);
    return os.str();
}

// Accepts "p", "p/q", with optional sign and surrounding blanks.
inline std::optional<Rational> parse_rational(const std::string& text) {
    auto b = text.find_first_not_of(" \t");
    auto e = text.find_last_not_of(" \t\r");
    if (b == std::string::npos) return std::nullopt;
    std::string s = text.substr(b, e - b + 1);
    auto slash = s.find('/');
    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        return std::all_of(t.begin() + static_cast<long>(i), t.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    auto to_big = [](std::string t) {
        if (!t.empty() && t[0] == '+') t.erase(0, 1);
        return BigInt(t);
    };
    if (slash == std::string::npos) {
        if (!is_int(s)) return std::nullopt;
        return Rational(to_big(s));
    }
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den) || den[0] == '-' || den[0] == '+') return std::nullopt;
    BigInt d = to_big(den);
    if (d == 0) return std::nullopt;
    return Rational(to_big(num), d);
}

inline RationalVector to_rational(const LatticeVector& v) {
    RationalVector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rational(v[i]);
    return r;
}

inline RealVector to_real(const RationalVector& v) {
    RealVector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = to_double(v[i]);
    return r;
}

inline RealVector to_real(const LatticeVector& v) { return RealVector(v.begin(), v.end()); }

inline Rational dot(const RationalVector& a, const LatticeVector& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::int64_t dot(const LatticeVector& a, const LatticeVector& b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double dot(const RealVector& a, const RealVector& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double dot(const RealVector& a, const LatticeVector& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * static_cast<double>(b[i]);
    return s;
}

inline double distance(const RealVector& a, const RealVector& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline double norm(const RealVector& a) {
    double s = 0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

inline RationalVector sub(const RationalVector& a, const RationalVector& b) {
    RationalVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline RationalVector midpoint(const RationalVector& a, const RationalVector& b) {
    RationalVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + b[i]) / 2;
    return r;
}

inline RationalVector centroid(const std::vector<RationalVector>& pts) {
    RationalVector c(pts.front().size(), Rational(0));
    for (const auto& p : pts)
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += p[i];
    for (auto& x : c) x /= static_cast<long>(pts.size());
    return c;
}

inline std::string format_vector(const LatticeVector& v, char sep = ',') {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s + ")";
}

inline std::string format_vector(const RationalVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_rational(v[i]);
    }
    return s + ")";
}

// Row-reduces a copy; returns rank.
inline int rank(RationalMatrix m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            Rational f = m[i][c] / m[r][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return static_cast<int>(r);
}

inline Rational determinant(RationalMatrix m) {
    const std::size_t n = m.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m[i][c] == 0) continue;
            Rational f = m[i][c] / m[c][c];
            for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
        }
    }
    return det;
}

// Unique solution of a square system, or nullopt if singular.
inline std::optional<RationalVector> solve_linear(RationalMatrix a, RationalVector b) {
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rational f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return b;
}

// Dimension of the affine hull of a point set.
inline int affine_dimension(const std::vector<RationalVector>& pts) {
    if (pts.empty()) return -1;
    RationalMatrix m;
    for (std::size_t i = 1; i < pts.size(); ++i) m.push_back(sub(pts[i], pts[0]));
    return rank(m);
}

inline std::int64_t gcd_of(const LatticeVector& v) {
    std::int64_t g = 0;
    for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
    return g;
}

inline bool is_primitive(const LatticeVector& v) { return gcd_of(v) == 1; }

// Integer matrix W with det W = +-1 and W * v = e_1, for primitive v.
// Built from 2x2 extended-Euclid steps on (entry 0, entry i).
inline IntMatrix unimodular_reducer(const LatticeVector& v) {
    const std::size_t d = v.size();
    IntMatrix w(d, LatticeVector(d, 0));
    for (std::size_t i = 0; i < d; ++i) w[i][i] = 1;
    LatticeVector cur = v;
    for (std::size_t i = 1; i < d; ++i) {
        std::int64_t a = cur[0], b = cur[i];
        if (b == 0) continue;
        // extended gcd: x a + y b = g
        std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            std::int64_t q = old_r / r;
            std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
            std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
            std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
        }
        std::int64_t g = old_r, x = old_s, y = old_t;
        // rows (0,i) <- [[x, y], [-b/g, a/g]] * rows (0,i); determinant 1
        LatticeVector r0 = w[0], ri = w[i];
        for (std::size_t j = 0; j < d; ++j) {
            w[0][j] = x * r0[j] + y * ri[j];
            w[i][j] = (-b / g) * r0[j] + (a / g) * ri[j];
        }
        cur[0] = g;
        cur[i] = 0;
    }
    if (cur[0] < 0)
        for (auto& x : w[0]) x = -x;
    return w;
}

inline LatticeVector mat_vec(const IntMatrix& w, const LatticeVector& v) {
    LatticeVector r(w.size(), 0);
    for (std::size_t i = 0; i < w.size(); ++i) r[i] = dot(w[i], v);
    return r;
}

inline RationalVector mat_vec(const IntMatrix& w, const RationalVector& v) {
    RationalVector r(w.size(), Rational(0));
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) r[i] += v[j] * w[i][j];
    return r;
}

inline IntMatrix transpose(const IntMatrix& w) {
    IntMatrix t(w[0].size(), LatticeVector(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w[0].size(); ++j) t[j][i] = w[i][j];
    return t;
}

// Integer vector v with <v, n> = 1 (n primitive).
inline LatticeVector unit_pairing_vector(const LatticeVector& n) {
    // W n = e1 means row 0 of W pairs to 1 with n.
    return unimodular_reducer(n)[0];
}

// Basis of the lattice {w : <w, n> = 0}. Rows 1..D-1 of the reducer pair to
// zero with n and complete row 0 to a unimodular basis, so they span it.
inline IntMatrix kernel_lattice_basis(const LatticeVector& n) {
    IntMatrix w = unimodular_reducer(n);
    return IntMatrix(w.begin() + 1, w.end());
}

} // namespace rvp
