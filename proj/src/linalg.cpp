#include "ridge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "ridge/error.hpp"
#include "ridge/simd.hpp"

namespace ridge {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), a_(std::move(row_major)) {
    if (a_.size() != rows * cols) {
        throw Error("matrix data has " + std::to_string(a_.size()) + " entries, expected " +
                    std::to_string(rows * cols));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw Error("ragged initializer for matrix");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Vector Matrix::col(std::size_t j) const {
    Vector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    constexpr std::size_t kBlock = 32;
    for (std::size_t i0 = 0; i0 < rows_; i0 += kBlock) {
        for (std::size_t j0 = 0; j0 < cols_; j0 += kBlock) {
            const std::size_t i1 = std::min(rows_, i0 + kBlock);
            const std::size_t j1 = std::min(cols_, j0 + kBlock);
            for (std::size_t i = i0; i < i1; ++i)
                for (std::size_t j = j0; j < j1; ++j) t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double norm2(std::span<const double> v) {
    // Scaled to avoid overflow on large entries.
    const double scale = max_abs(v);
    if (scale == 0.0) return 0.0;
    double acc = 0.0;
    for (double x : v) {
        const double y = x / scale;
        acc += y * y;
    }
    return scale * std::sqrt(acc);
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double relative_l2(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw Error("relative_l2: length mismatch");
    Vector diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    const double nb = norm2(b.span());
    const double nd = norm2(diff.span());
    return nb == 0.0 ? nd : nd / nb;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw Error("matvec: dimension mismatch");
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) out[i] = simd::dot(a.row(i).data(), x.data(), a.cols());
    return out;
}

Vector matvec_transposed(const Matrix& a, const Vector& x) {
    if (a.rows() != x.size()) throw Error("matvec_transposed: dimension mismatch");
    Vector out(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) simd::axpy(x[i], a.row(i).data(), out.data(), a.cols());
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw Error("matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik != 0.0) simd::axpy(aik, b.row(k).data(), c.row(i).data(), b.cols());
        }
    }
    return c;
}

namespace {

// Symmetric Gram matrix of the rows of t: G_ab = <t_a, t_b>.
Matrix row_gram(const Matrix& t, const Deadline& deadline) {
    const std::size_t m = t.rows();
    const std::size_t len = t.cols();
    Matrix g(m, m);
    for (std::size_t a = 0; a < m; ++a) {
        if ((a & 15) == 0) check_deadline(deadline, "Gram matrix formation");
        const double* ta = t.row(a).data();
        for (std::size_t b = a; b < m; ++b) {
            const double v = simd::dot(ta, t.row(b).data(), len);
            g(a, b) = v;
            g(b, a) = v;
        }
    }
    return g;
}

}  // namespace

Matrix gram_of_columns(const Matrix& x, Deadline deadline) { return row_gram(x.transposed(), deadline); }

Matrix gram_of_rows(const Matrix& x, Deadline deadline) { return row_gram(x, deadline); }

void add_to_diagonal(Matrix& a, double value) {
    const std::size_t n = std::min(a.rows(), a.cols());
    for (std::size_t i = 0; i < n; ++i) a(i, i) += value;
}

void check_deadline(const Deadline& deadline, const char* where) {
    if (deadline && Clock::now() > *deadline) throw DeadlineExceeded(std::string("deadline exceeded during ") + where);
}

// ---------------------------------------------------------------------------
// Thin SVD

namespace {

constexpr int kMaxSweeps = 80;

}  // namespace

ThinSvd thin_svd(const Matrix& x, double truncation_tol) {
    if (!all_finite(x)) throw Error("thin_svd: matrix contains non-finite entries");
    if (!(truncation_tol >= 0.0)) throw Error("thin_svd: truncation tolerance must be >= 0");

    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    const bool wide = n <= p;
    // Rows of w are rotated pairwise until mutually orthogonal; j accumulates
    // the rotations so that j * w_original = w.
    Matrix w = wide ? x : x.transposed();
    const std::size_t m = w.rows();
    const std::size_t len = w.cols();
    Matrix j = Matrix::identity(m);

    const double tol = std::sqrt(static_cast<double>(std::max<std::size_t>(len, 1))) *
                       std::numeric_limits<double>::epsilon();
    std::vector<double> sq(m);
    int sweep = 0;
    double worst = 0.0;
    bool converged = m <= 1;
    for (; sweep < kMaxSweeps && !converged; ++sweep) {
        for (std::size_t k = 0; k < m; ++k) sq[k] = simd::dot(w.row(k).data(), w.row(k).data(), len);
        bool rotated = false;
        worst = 0.0;
        for (std::size_t a = 0; a + 1 < m; ++a) {
            for (std::size_t b = a + 1; b < m; ++b) {
                const double alpha = sq[a];
                const double beta = sq[b];
                if (alpha <= std::numeric_limits<double>::min() || beta <= std::numeric_limits<double>::min()) continue;
                const double gamma = simd::dot(w.row(a).data(), w.row(b).data(), len);
                const double ratio = std::abs(gamma) / std::sqrt(alpha * beta);
                worst = std::max(worst, ratio);
                if (ratio <= tol) continue;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                simd::rotate(w.row(a).data(), w.row(b).data(), c, s, len);
                simd::rotate(j.row(a).data(), j.row(b).data(), c, s, m);
                sq[a] = alpha - t * gamma;
                sq[b] = beta + t * gamma;
                rotated = true;
            }
        }
        converged = !rotated;
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "thin_svd: one-sided Jacobi did not converge after " << kMaxSweeps
            << " sweeps (largest remaining cosine " << worst << ", tolerance " << tol << ", shape " << n << "x" << p
            << ")";
        throw ConvergenceError(msg.str());
    }

    std::vector<double> sigma(m);
    for (std::size_t k = 0; k < m; ++k) sigma[k] = std::sqrt(simd::dot(w.row(k).data(), w.row(k).data(), len));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return sigma[l] > sigma[r]; });

    const double d1 = m == 0 ? 0.0 : sigma[order[0]];
    std::size_t r = 0;
    while (r < m && sigma[order[r]] > 0.0 && sigma[order[r]] > truncation_tol * d1) ++r;

    ThinSvd out;
    out.d = Vector(r);
    Matrix short_side(m, r);  // columns are rows of j
    Matrix long_side(len, r);  // columns are normalized rows of w
    for (std::size_t k = 0; k < r; ++k) {
        const std::size_t src = order[k];
        out.d[k] = sigma[src];
        const double inv = 1.0 / sigma[src];
        for (std::size_t i = 0; i < m; ++i) short_side(i, k) = j(src, i);
        for (std::size_t i = 0; i < len; ++i) long_side(i, k) = w(src, i) * inv;
    }
    if (wide) {
        out.u = std::move(short_side);
        out.v = std::move(long_side);
    } else {
        out.u = std::move(long_side);
        out.v = std::move(short_side);
    }
    return out;
}

Matrix reconstruct(const ThinSvd& svd) {
    Matrix us = svd.u;
    for (std::size_t i = 0; i < us.rows(); ++i)
        for (std::size_t k = 0; k < svd.rank(); ++k) us(i, k) *= svd.d[k];
    return matmul(us, svd.v.transposed());
}

// ---------------------------------------------------------------------------
// Cholesky

Cholesky Cholesky::factor(const Matrix& a, Deadline deadline) {
    if (a.rows() != a.cols()) throw Error("Cholesky: matrix must be square");
    const std::size_t n = a.rows();
    Cholesky out;
    out.l_ = Matrix(n, n);
    Matrix& l = out.l_;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
    double min_pivot = std::numeric_limits<double>::infinity();
    for (std::size_t jj = 0; jj < n; ++jj) {
        if ((jj & 15) == 0) check_deadline(deadline, "Cholesky factorization");
        const double* lj = l.row(jj).data();
        const double pivot = a(jj, jj) - simd::dot(lj, lj, jj);
        if (!(pivot > 0.0)) throw NotPositiveDefinite(jj, pivot);
        min_pivot = std::min(min_pivot, pivot);
        const double ljj = std::sqrt(pivot);
        l(jj, jj) = ljj;
        for (std::size_t i = jj + 1; i < n; ++i) {
            l(i, jj) = (a(i, jj) - simd::dot(l.row(i).data(), lj, jj)) / ljj;
        }
    }
    out.min_pivot_ratio_ = n == 0 || max_diag <= 0.0 ? 0.0 : min_pivot / max_diag;
    return out;
}

Vector Cholesky::solve(const Vector& b) const {
    const std::size_t n = size();
    if (b.size() != n) throw Error("Cholesky::solve: dimension mismatch");
    const Vector z = solve_lower(b.span());
    // Back substitution with L^T walks columns of L; accumulate by rows instead.
    Vector x = z;
    for (std::size_t ii = n; ii-- > 0;) {
        x[ii] /= l_(ii, ii);
        simd::axpy(-x[ii], l_.row(ii).data(), x.data(), ii);
    }
    return x;
}

Vector Cholesky::solve_lower(std::span<const double> b) const {
    const std::size_t n = size();
    if (b.size() != n) throw Error("Cholesky::solve_lower: dimension mismatch");
    Vector z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (b[i] - simd::dot(l_.row(i).data(), z.data(), i)) / l_(i, i);
    return z;
}

Vector solve_spd(const Matrix& a, const Vector& b) {
    if (a.rows() != a.cols()) throw Error("solve_spd: matrix must be square");
    if (a.rows() != b.size()) throw Error("solve_spd: right-hand side length mismatch");
    const double scale = max_abs(std::span<const double>(a.values()));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t jj = i + 1; jj < a.cols(); ++jj) {
            if (std::abs(a(i, jj) - a(jj, i)) > 1e-10 * scale) {
                throw Error("solve_spd: matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(jj) +
                            ")");
            }
        }
    }
    return Cholesky::factor(a).solve(b);
}

Vector least_squares_qr(const Matrix& a, const Vector& b) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (b.size() != m) throw Error("least_squares_qr: right-hand side length mismatch");
    if (m < n) throw Error("least_squares_qr: need at least as many rows as columns");

    // Column-major working copy so each Householder reflector acts on contiguous data.
    Matrix cols = a.transposed();
    Vector rhs = b;
    for (std::size_t k = 0; k < n; ++k) {
        double* ck = cols.row(k).data();
        const double alpha_norm = norm2(std::span<const double>(ck + k, m - k));
        if (alpha_norm == 0.0) throw Error("least_squares_qr: matrix is rank deficient at column " + std::to_string(k));
        const double alpha = ck[k] > 0.0 ? -alpha_norm : alpha_norm;
        std::vector<double> v(ck + k, ck + m);
        v[0] -= alpha;
        const double vnorm2 = simd::dot(v.data(), v.data(), v.size());
        if (vnorm2 == 0.0) continue;
        for (std::size_t jj = k; jj < n; ++jj) {
            double* cj = cols.row(jj).data() + k;
            const double f = 2.0 * simd::dot(v.data(), cj, v.size()) / vnorm2;
            simd::axpy(-f, v.data(), cj, v.size());
        }
        const double f = 2.0 * simd::dot(v.data(), rhs.data() + k, v.size()) / vnorm2;
        simd::axpy(-f, v.data(), rhs.data() + k, v.size());
    }
    Vector z(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = rhs[ii];
        for (std::size_t jj = ii + 1; jj < n; ++jj) acc -= cols(jj, ii) * z[jj];
        if (cols(ii, ii) == 0.0) throw Error("least_squares_qr: zero diagonal in R");
        z[ii] = acc / cols(ii, ii);
    }
    return z;
}

}  // namespace ridge
