#pragma once

// Smith normal form over Z and modular linear solving, used by the
// cohomology routines (coboundary witnesses, cocycle sampling).

#include "parsec/scalar.hpp"

#include <optional>
#include <vector>

namespace parsec {

struct IntMatrix {
    size_t rows = 0, cols = 0;
    std::vector<Int> e;
    IntMatrix() = default;
    IntMatrix(size_t r, size_t c) : rows(r), cols(c), e(r * c, Int(0)) {}
    Int& operator()(size_t i, size_t j) { return e[i * cols + j]; }
    const Int& operator()(size_t i, size_t j) const { return e[i * cols + j]; }
    static IntMatrix identity(size_t n) {
        IntMatrix m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
};

struct SmithForm {
    IntMatrix u, d, v;  // u * a * v = d, u and v unimodular
    size_t rank = 0;
};

inline SmithForm smith_normal_form(IntMatrix a) {
    SmithForm s;
    s.u = IntMatrix::identity(a.rows);
    s.v = IntMatrix::identity(a.cols);
    size_t t = 0;
    auto row_op = [&](IntMatrix& m, size_t i, size_t k, const Int& f) {  // row i -= f * row k
        for (size_t j = 0; j < m.cols; ++j) m(i, j) -= f * m(k, j);
    };
    auto col_op = [&](IntMatrix& m, size_t j, size_t k, const Int& f) {  // col j -= f * col k
        for (size_t i = 0; i < m.rows; ++i) m(i, j) -= f * m(i, k);
    };
    auto swap_rows = [&](IntMatrix& m, size_t i, size_t k) {
        for (size_t j = 0; j < m.cols; ++j) std::swap(m(i, j), m(k, j));
    };
    auto swap_cols = [&](IntMatrix& m, size_t j, size_t k) {
        for (size_t i = 0; i < m.rows; ++i) std::swap(m(i, j), m(i, k));
    };
    while (t < a.rows && t < a.cols) {
        // locate smallest nonzero |entry| in the remaining block
        size_t pi = t, pj = t;
        bool found = false;
        for (size_t i = t; i < a.rows; ++i)
            for (size_t j = t; j < a.cols; ++j)
                if (a(i, j) != 0 && (!found || abs(a(i, j)) < abs(a(pi, pj)))) {
                    pi = i;
                    pj = j;
                    found = true;
                }
        if (!found) break;
        if (pi != t) {
            swap_rows(a, pi, t);
            swap_rows(s.u, pi, t);
        }
        if (pj != t) {
            swap_cols(a, pj, t);
            swap_cols(s.v, pj, t);
        }
        bool clean = true;
        for (size_t i = t + 1; i < a.rows; ++i)
            if (a(i, t) != 0) {
                Int f = a(i, t) / a(t, t);
                row_op(a, i, t, f);
                row_op(s.u, i, t, f);
                if (a(i, t) != 0) clean = false;
            }
        for (size_t j = t + 1; j < a.cols; ++j)
            if (a(t, j) != 0) {
                Int f = a(t, j) / a(t, t);
                col_op(a, j, t, f);
                col_op(s.v, j, t, f);
                if (a(t, j) != 0) clean = false;
            }
        if (!clean) continue;  // remainders left: pick a smaller pivot next round
        // divisibility condition d_t | all later entries
        bool fixed = false;
        for (size_t i = t + 1; i < a.rows && !fixed; ++i)
            for (size_t j = t + 1; j < a.cols && !fixed; ++j)
                if (a(i, j) % a(t, t) != 0) {
                    // add row i to row t and restart this pivot
                    for (size_t c = 0; c < a.cols; ++c) a(t, c) += a(i, c);
                    for (size_t c = 0; c < s.u.cols; ++c) s.u(t, c) += s.u(i, c);
                    fixed = true;
                }
        if (fixed) continue;
        if (a(t, t) < 0) {
            for (size_t j = 0; j < a.cols; ++j) a(t, j) = -a(t, j);
            for (size_t j = 0; j < s.u.cols; ++j) s.u(t, j) = -s.u(t, j);
        }
        ++t;
    }
    s.d = std::move(a);
    s.rank = t;
    return s;
}

inline Int mod_norm(Int x, const Int& n) {
    x %= n;
    if (x < 0) x += n;
    return x;
}

// Solve A x = b (mod N).  Returns the canonical solution (free parameters
// zero, determined coordinates reduced to least nonnegative residues) or
// nothing when the system is unsolvable.
inline std::optional<std::vector<Int>> solve_mod_n(IntMatrix a, const std::vector<Int>& b, const Int& n) {
    for (auto& e : a.e) e = mod_norm(e, n);
    SmithForm s = smith_normal_form(a);
    std::vector<Int> c(a.rows, Int(0));
    for (size_t i = 0; i < a.rows; ++i) {
        for (size_t j = 0; j < a.rows; ++j) c[i] += s.u(i, j) * b[j];
        c[i] = mod_norm(c[i], n);
    }
    for (size_t i = a.cols; i < a.rows; ++i)
        if (c[i] != 0) return std::nullopt;
    std::vector<Int> y(a.cols, Int(0));
    for (size_t i = 0; i < a.cols; ++i) {
        Int d = (i < s.rank) ? s.d(i, i) : Int(0);
        Int rhs = (i < a.rows) ? c[i] : Int(0);
        if (d == 0) {
            if (rhs != 0) return std::nullopt;
            continue;  // free coordinate, keep zero
        }
        Int g = gcd(d, n);
        if (rhs % g != 0) return std::nullopt;
        // d y = rhs (mod n)  <=>  (d/g) y = rhs/g (mod n/g), d/g invertible
        Int nn = n / g, dd = mod_norm(d / g, nn), rr = rhs / g;
        // modular inverse of dd mod nn by extended gcd
        Int x0 = 0, x1 = 1, a0 = nn, a1 = dd;
        while (a1 != 0) {
            Int q = a0 / a1;
            a0 -= q * a1;
            std::swap(a0, a1);
            x0 -= q * x1;
            std::swap(x0, x1);
        }
        Int inv = mod_norm(x0, nn == 0 ? Int(1) : nn);
        y[i] = nn == 0 ? Int(0) : mod_norm(rr % nn * inv, nn);
    }
    std::vector<Int> x(a.cols, Int(0));
    for (size_t i = 0; i < a.cols; ++i) {
        for (size_t j = 0; j < a.cols; ++j) x[i] += s.v(i, j) * y[j];
        x[i] = mod_norm(x[i], n);
    }
    return x;
}

// Generators of { x : A x = 0 (mod N) } as columns.
inline std::vector<std::vector<Int>> nullspace_mod_n(IntMatrix a, const Int& n) {
    for (auto& e : a.e) e = mod_norm(e, n);
    SmithForm s = smith_normal_form(a);
    std::vector<std::vector<Int>> gens;
    for (size_t i = 0; i < a.cols; ++i) {
        Int d = (i < s.rank) ? s.d(i, i) : Int(0);
        Int step = (d == 0) ? Int(1) : n / gcd(d, n);
        if (mod_norm(step, n) == 0) continue;
        std::vector<Int> g(a.cols);
        for (size_t r = 0; r < a.cols; ++r) g[r] = mod_norm(s.v(r, i) * step, n);
        bool nonzero = false;
        for (const auto& v : g) nonzero |= (v != 0);
        if (nonzero) gens.push_back(std::move(g));
    }
    return gens;
}

}  // namespace parsec
