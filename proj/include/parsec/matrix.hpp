#pragma once

// Dense exact matrices and the deterministic elimination kernels used by
// every limit computation in the library.  Pivoting is fixed (first nonzero
// entry in row-major order) so that all bases are reproducible.

#include "parsec/scalar.hpp"

#include <cassert>
#include <optional>
#include <vector>

namespace parsec {

template <class T>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(size_t r, size_t c) : rows_(r), cols_(c), e_(r * c) {}
    Matrix(size_t r, size_t c, const T& fill) : rows_(r), cols_(c), e_(r * c, fill) {}

    static Matrix identity(size_t n) {
        Matrix m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = unit();
        return m;
    }
    static Matrix zero(size_t r, size_t c) { return Matrix(r, c); }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    T& operator()(size_t i, size_t j) { return e_[i * cols_ + j]; }
    const T& operator()(size_t i, size_t j) const { return e_[i * cols_ + j]; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        assert(a.cols_ == b.rows_);
        Matrix r(a.rows_, b.cols_);
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t k = 0; k < a.cols_; ++k) {
                if (is_zero_val(a(i, k))) continue;
                for (size_t j = 0; j < b.cols_; ++j) r(i, j) = r(i, j) + a(i, k) * b(k, j);
            }
        return r;
    }
    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
        Matrix r = a;
        for (size_t i = 0; i < r.e_.size(); ++i) r.e_[i] = r.e_[i] + b.e_[i];
        return r;
    }
    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
        Matrix r = a;
        for (size_t i = 0; i < r.e_.size(); ++i) r.e_[i] = r.e_[i] - b.e_[i];
        return r;
    }
    friend Matrix operator*(const T& s, const Matrix& a) {
        Matrix r = a;
        for (auto& x : r.e_) x = s * x;
        return r;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
        for (size_t i = 0; i < a.e_.size(); ++i)
            if (!(a.e_[i] == b.e_[i])) return false;
        return true;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    bool is_zero() const {
        for (const auto& x : e_)
            if (!is_zero_val(x)) return false;
        return true;
    }
    bool is_identity() const {
        if (rows_ != cols_) return false;
        return *this == identity(rows_);
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    static Matrix kron(const Matrix& a, const Matrix& b) {
        Matrix r(a.rows_ * b.rows_, a.cols_ * b.cols_);
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t j = 0; j < a.cols_; ++j)
                for (size_t k = 0; k < b.rows_; ++k)
                    for (size_t l = 0; l < b.cols_; ++l)
                        r(i * b.rows_ + k, j * b.cols_ + l) = a(i, j) * b(k, l);
        return r;
    }

    std::vector<T> apply(const std::vector<T>& v) const {
        assert(v.size() == cols_);
        std::vector<T> r(rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r[i] = r[i] + (*this)(i, j) * v[j];
        return r;
    }

    Matrix col(size_t j) const {
        Matrix r(rows_, 1);
        for (size_t i = 0; i < rows_; ++i) r(i, 0) = (*this)(i, j);
        return r;
    }

private:
    size_t rows_, cols_;
    std::vector<T> e_;

    static bool is_zero_val(const T& x) { return x.is_zero(); }
    static T unit() { return T::one(); }
};

using CMat = Matrix<Cyclo>;

// Reduced row echelon form by fraction-free forward elimination followed by
// exact normalization.  Pivots are chosen as the first nonzero entry in
// row-major scan order.  Returns pivot columns.
template <class T>
std::vector<size_t> rref_inplace(Matrix<T>& m) {
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        size_t p = row;
        while (p < m.rows() && m(p, col).is_zero()) ++p;
        if (p == m.rows()) continue;
        if (p != row)
            for (size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
        T inv = m(row, col).inverse();
        for (size_t j = col; j < m.cols(); ++j) m(row, j) = inv * m(row, j);
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col).is_zero()) continue;
            T f = m(i, col);
            for (size_t j = col; j < m.cols(); ++j) m(i, j) = m(i, j) - f * m(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

template <class T>
size_t rank(Matrix<T> m) {
    return rref_inplace(m).size();
}

// Basis of the nullspace, one canonical vector per free column.
template <class T>
std::vector<std::vector<T>> kernel_basis(Matrix<T> m) {
    size_t n = m.cols();
    auto pivots = rref_inplace(m);
    std::vector<bool> is_pivot(n, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<std::vector<T>> basis;
    for (size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<T> v(n);
        v[f] = T::one();
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = T::zero() - m(r, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Solve A x = b exactly; empty optional when inconsistent.
template <class T>
std::optional<std::vector<T>> solve_linear(const Matrix<T>& a, const std::vector<T>& b) {
    assert(b.size() == a.rows());
    Matrix<T> aug(a.rows(), a.cols() + 1);
    for (size_t i = 0; i < a.rows(); ++i) {
        for (size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    auto pivots = rref_inplace(aug);
    if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
    std::vector<T> x(a.cols());
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug(r, a.cols());
    return x;
}

// Solve A X = B with a single elimination; empty optional when inconsistent.
template <class T>
std::optional<Matrix<T>> solve_matrix(const Matrix<T>& a, const Matrix<T>& b) {
    assert(a.rows() == b.rows());
    Matrix<T> aug(a.rows(), a.cols() + b.cols());
    for (size_t i = 0; i < a.rows(); ++i) {
        for (size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        for (size_t j = 0; j < b.cols(); ++j) aug(i, a.cols() + j) = b(i, j);
    }
    auto pivots = rref_inplace(aug);
    size_t r = 0;
    std::vector<size_t> apivots;
    for (; r < pivots.size(); ++r) {
        if (pivots[r] >= a.cols()) return std::nullopt;  // inconsistent row
        apivots.push_back(pivots[r]);
    }
    Matrix<T> x(a.cols(), b.cols());
    for (size_t k = 0; k < apivots.size(); ++k)
        for (size_t j = 0; j < b.cols(); ++j) x(apivots[k], j) = aug(k, a.cols() + j);
    return x;
}

template <class T>
std::optional<Matrix<T>> try_inverse(const Matrix<T>& a) {
    if (a.rows() != a.cols()) return std::nullopt;
    auto inv = solve_matrix(a, Matrix<T>::identity(a.rows()));
    return inv;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
    auto inv = try_inverse(a);
    if (!inv) throw std::domain_error("matrix not invertible");
    return *inv;
}

inline CMat cmat_from_rows(const std::vector<std::vector<Cyclo>>& rows) {
    size_t r = rows.size(), c = r ? rows[0].size() : 0;
    CMat m(r, c);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    return m;
}

inline CMat scalar_matrix(size_t n, const Cyclo& s) {
    CMat m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = s;
    return m;
}

}  // namespace parsec
