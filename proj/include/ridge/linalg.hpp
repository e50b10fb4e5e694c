#pragma once
// Minimal dense linear algebra: row-major matrices, thin SVD by one-sided
// Jacobi, and Cholesky solves for symmetric positive-definite systems.

#include <chrono>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace ridge {

using Clock = std::chrono::steady_clock;
using Deadline = std::optional<Clock::time_point>;

class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double fill = 0.0) : v_(n, fill) {}
    Vector(std::initializer_list<double> init) : v_(init) {}
    explicit Vector(std::vector<double> values) : v_(std::move(values)) {}

    std::size_t size() const noexcept { return v_.size(); }
    bool empty() const noexcept { return v_.empty(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    double* data() noexcept { return v_.data(); }
    const double* data() const noexcept { return v_.data(); }
    auto begin() noexcept { return v_.begin(); }
    auto end() noexcept { return v_.end(); }
    auto begin() const noexcept { return v_.begin(); }
    auto end() const noexcept { return v_.end(); }
    std::span<double> span() noexcept { return v_; }
    std::span<const double> span() const noexcept { return v_; }
    const std::vector<double>& values() const noexcept { return v_; }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> v_;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    std::span<double> row(std::size_t i) { return {a_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {a_.data() + i * cols_, cols_}; }
    Vector col(std::size_t j) const;
    double* data() noexcept { return a_.data(); }
    const double* data() const noexcept { return a_.data(); }
    const std::vector<double>& values() const noexcept { return a_; }

    Matrix transposed() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

bool all_finite(std::span<const double> v);
inline bool all_finite(const Matrix& m) { return all_finite(std::span<const double>(m.values())); }
inline bool all_finite(const Vector& v) { return all_finite(v.span()); }

double norm2(std::span<const double> v);
double max_abs(std::span<const double> v);
// ||a - b||_2 / ||b||_2, or ||a - b||_2 when b is zero.
double relative_l2(const Vector& a, const Vector& b);

Vector matvec(const Matrix& a, const Vector& x);
// a^T x without forming the transpose.
Vector matvec_transposed(const Matrix& a, const Vector& x);
Matrix matmul(const Matrix& a, const Matrix& b);
// X^T X (cols x cols) and X X^T (rows x rows).
Matrix gram_of_columns(const Matrix& x, Deadline deadline = std::nullopt);
Matrix gram_of_rows(const Matrix& x, Deadline deadline = std::nullopt);
void add_to_diagonal(Matrix& a, double value);

struct ThinSvd {
    Matrix u;  // n x r, orthonormal columns
    Vector d;  // r singular values, strictly positive, non-increasing
    Matrix v;  // p x r, orthonormal columns
    std::size_t rank() const noexcept { return d.size(); }
    std::size_t n() const noexcept { return u.rows(); }
    std::size_t p() const noexcept { return v.rows(); }
};

inline constexpr double kDefaultTruncation = 1e-12;

// One-sided Jacobi on the shorter dimension. Singular values d_j <= tol * d_1
// are dropped. Throws ConvergenceError if the sweep budget is exhausted.
ThinSvd thin_svd(const Matrix& x, double truncation_tol = kDefaultTruncation);

// Reconstruct U diag(d) V^T.
Matrix reconstruct(const ThinSvd& svd);

class Cholesky {
public:
    // Lower-triangular factor without pivoting; throws NotPositiveDefinite
    // naming the first non-positive pivot.
    static Cholesky factor(const Matrix& a, Deadline deadline = std::nullopt);

    std::size_t size() const noexcept { return l_.rows(); }
    const Matrix& lower() const noexcept { return l_; }
    Vector solve(const Vector& b) const;
    // L z = b
    Vector solve_lower(std::span<const double> b) const;
    // min_j L_jj^2 / max_j A_jj; a cheap conditioning indicator.
    double min_pivot_ratio() const noexcept { return min_pivot_ratio_; }

private:
    Matrix l_;
    double min_pivot_ratio_ = 0.0;
};

// Solves a z = b for symmetric positive-definite a.
Vector solve_spd(const Matrix& a, const Vector& b);

// min ||a z - b||_2 via unpivoted Householder QR; a must have full column rank
// and at least as many rows as columns.
Vector least_squares_qr(const Matrix& a, const Vector& b);

void check_deadline(const Deadline& deadline, const char* where);

}  // namespace ridge
