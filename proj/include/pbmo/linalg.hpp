#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace pbmo {

using Vector = std::vector<double>;

/// Small dense row-major matrix. Sizes here are at most a few hundred.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Vector column(std::size_t c) const;
    Matrix transposed() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

/// Maximum absolute row sum.
double inf_norm(const Matrix& a);
double inf_norm(std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);

/// Gauss-Jordan inversion with partial pivoting. Returns nullopt when a pivot
/// falls below relative_threshold * ||a||_inf.
std::optional<Matrix> invert(const Matrix& a, double relative_threshold = 1e-10);

/// Solve a x = b by partial-pivot elimination; nullopt when singular.
std::optional<Vector> solve(const Matrix& a, std::span<const double> b,
                            double relative_threshold = 1e-12);

/// Numerical rank by elimination with the given relative pivot threshold.
std::size_t rank(const Matrix& a, double relative_threshold = 1e-10);

} // namespace pbmo
