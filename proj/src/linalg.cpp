#include "pbmo/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>

namespace pbmo {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector Matrix::column(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.rows());
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
    assert(a.cols() == x.size());
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
    return out;
}

double inf_norm(const Matrix& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) row += std::abs(a(i, j));
        best = std::max(best, row);
    }
    return best;
}

double inf_norm(std::span<const double> v) {
    double best = 0.0;
    for (double x : v) best = std::max(best, std::abs(x));
    return best;
}

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::optional<Matrix> invert(const Matrix& a, double relative_threshold) {
    assert(a.rows() == a.cols());
    const std::size_t n = a.rows();
    const double threshold = relative_threshold * inf_norm(a);
    Matrix work = a;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
        if (!(std::abs(work(pivot, col)) > threshold)) return std::nullopt;
        if (pivot != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(work(pivot, c), work(col, c));
                std::swap(inv(pivot, c), inv(col, c));
            }
        const double p = work(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            work(col, c) /= p;
            inv(col, c) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = work(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                work(r, c) -= f * work(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

std::optional<Vector> solve(const Matrix& a, std::span<const double> b,
                            double relative_threshold) {
    assert(a.rows() == a.cols() && a.rows() == b.size());
    const std::size_t n = a.rows();
    const double threshold = relative_threshold * inf_norm(a);
    Matrix work = a;
    Vector rhs(b.begin(), b.end());
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
        if (!(std::abs(work(pivot, col)) > threshold)) return std::nullopt;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(work(pivot, c), work(col, c));
            std::swap(rhs[pivot], rhs[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = work(r, col) / work(col, col);
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) work(r, c) -= f * work(col, c);
            rhs[r] -= f * rhs[col];
        }
    }
    Vector x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= work(i, c) * x[c];
        x[i] = s / work(i, i);
    }
    return x;
}

std::size_t rank(const Matrix& a, double relative_threshold) {
    Matrix work = a;
    const double threshold = relative_threshold * std::max(inf_norm(a), 1e-300);
    std::size_t r = 0;
    for (std::size_t col = 0; col < work.cols() && r < work.rows(); ++col) {
        std::size_t pivot = r;
        for (std::size_t i = r + 1; i < work.rows(); ++i)
            if (std::abs(work(i, col)) > std::abs(work(pivot, col))) pivot = i;
        if (!(std::abs(work(pivot, col)) > threshold)) continue;
        for (std::size_t c = 0; c < work.cols(); ++c) std::swap(work(pivot, c), work(r, c));
        for (std::size_t i = r + 1; i < work.rows(); ++i) {
            const double f = work(i, col) / work(r, col);
            for (std::size_t c = col; c < work.cols(); ++c) work(i, c) -= f * work(r, c);
        }
        ++r;
    }
    return r;
}

} // namespace pbmo
