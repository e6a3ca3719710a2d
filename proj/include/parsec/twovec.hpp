#pragma once

// Kapranov-Voevodsky 2-vector spaces in the label encoding: objects are
// multiplicity vectors over an ordered set of simple labels, 2-linear maps
// are multiplicity matrices, 2-morphisms are entrywise linear maps.

#include "parsec/matrix.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace parsec {

struct TwoVecSpace {
    std::vector<std::string> labels;
    size_t dim() const { return labels.size(); }
};

inline TwoVecSpace make_space(size_t n, const std::string& prefix = "s") {
    TwoVecSpace v;
    for (size_t i = 0; i < n; ++i) v.labels.push_back(prefix + std::to_string(i));
    return v;
}

inline TwoVecSpace tensor(const TwoVecSpace& a, const TwoVecSpace& b) {
    TwoVecSpace v;
    for (const auto& la : a.labels)
        for (const auto& lb : b.labels) v.labels.push_back(la + "*" + lb);
    return v;
}

struct KVObj {
    std::vector<size_t> mult;
    size_t dim() const { return mult.size(); }
    size_t total() const { return std::accumulate(mult.begin(), mult.end(), size_t{0}); }
    friend bool operator==(const KVObj& a, const KVObj& b) { return a.mult == b.mult; }
};

struct KVMap {
    size_t rows = 0, cols = 0;     // |target labels| x |source labels|
    std::vector<size_t> mult;      // row-major multiplicities

    KVMap() = default;
    KVMap(size_t r, size_t c) : rows(r), cols(c), mult(r * c, 0) {}
    size_t& operator()(size_t i, size_t j) { return mult[i * cols + j]; }
    size_t operator()(size_t i, size_t j) const { return mult[i * cols + j]; }
    static KVMap identity(size_t n) {
        KVMap m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    friend bool operator==(const KVMap& a, const KVMap& b) {
        return a.rows == b.rows && a.cols == b.cols && a.mult == b.mult;
    }
};

inline KVObj apply(const KVMap& f, const KVObj& x) {
    if (f.cols != x.dim()) throw std::invalid_argument("apply: shape mismatch");
    KVObj y;
    y.mult.assign(f.rows, 0);
    for (size_t i = 0; i < f.rows; ++i)
        for (size_t j = 0; j < f.cols; ++j) y.mult[i] += f(i, j) * x.mult[j];
    return y;
}

inline KVMap compose(const KVMap& f, const KVMap& g) {  // f ∘ g
    if (f.cols != g.rows) throw std::invalid_argument("compose: shape mismatch");
    KVMap h(f.rows, g.cols);
    for (size_t i = 0; i < f.rows; ++i)
        for (size_t k = 0; k < f.cols; ++k)
            for (size_t j = 0; j < g.cols; ++j) h(i, j) += f(i, k) * g(k, j);
    return h;
}

inline KVMap tensor(const KVMap& f, const KVMap& g) {  // Kronecker product
    KVMap h(f.rows * g.rows, f.cols * g.cols);
    for (size_t i = 0; i < f.rows; ++i)
        for (size_t j = 0; j < f.cols; ++j)
            for (size_t k = 0; k < g.rows; ++k)
                for (size_t l = 0; l < g.cols; ++l) h(i * g.rows + k, j * g.cols + l) = f(i, j) * g(k, l);
    return h;
}

inline size_t hom_dim(const KVObj& x, const KVObj& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("hom_dim: space mismatch");
    size_t d = 0;
    for (size_t i = 0; i < x.dim(); ++i) d += x.mult[i] * y.mult[i];
    return d;
}

// Cauchy-Schwarz equality detection: in a semisimple category two objects
// with hom dimensions (hXX, hXY, hYY) are isomorphic iff all three agree.
inline bool iso_test(size_t hxx, size_t hxy, size_t hyy) { return hxx == hxy && hxy == hyy; }

// 2-morphisms: one exact block per multiplicity entry.
struct KVTwoMor {
    KVMap source, target;          // same endpoints
    std::vector<CMat> blocks;      // row-major over (t, s), target(t,s) x source(t,s)

    CMat& block(size_t t, size_t s) { return blocks[t * source.cols + s]; }
    const CMat& block(size_t t, size_t s) const { return blocks[t * source.cols + s]; }
};

inline KVTwoMor identity_two_mor(const KVMap& f) {
    KVTwoMor m;
    m.source = m.target = f;
    m.blocks.resize(f.rows * f.cols);
    for (size_t t = 0; t < f.rows; ++t)
        for (size_t s = 0; s < f.cols; ++s) m.block(t, s) = CMat::identity(f(t, s));
    return m;
}

inline KVTwoMor vcompose(const KVTwoMor& b, const KVTwoMor& a) {  // b after a
    if (!(a.target == b.source)) throw std::invalid_argument("vcompose: middle mismatch");
    KVTwoMor m;
    m.source = a.source;
    m.target = b.target;
    m.blocks.resize(a.blocks.size());
    for (size_t i = 0; i < a.blocks.size(); ++i) m.blocks[i] = b.blocks[i] * a.blocks[i];
    return m;
}

}  // namespace parsec
