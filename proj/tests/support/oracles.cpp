#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ridge::oracle {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = nd(gen);
    return m;
}

Vector random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ 0xabcdefULL);
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector v(n);
    for (auto& x : v) x = nd(gen);
    return v;
}

double log_uniform(double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ 0x5151ULL);
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(gen));
}

std::size_t uniform_int(std::size_t lo, std::size_t hi, std::uint64_t seed) {
    std::mt19937_64 gen(seed ^ 0x7777ULL);
    std::uniform_int_distribution<std::size_t> u(lo, hi);
    return u(gen);
}

Matrix naive_transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("naive_matmul");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            long double acc = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += static_cast<long double>(a(i, k)) * b(k, j);
            c(i, j) = static_cast<double>(acc);
        }
    return c;
}

Vector naive_matvec(const Matrix& a, const Vector& x) {
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        long double acc = 0;
        for (std::size_t k = 0; k < a.cols(); ++k) acc += static_cast<long double>(a(i, k)) * x[k];
        out[i] = static_cast<double>(acc);
    }
    return out;
}

Matrix gauss_jordan_inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix w = a;
    Matrix inv = Matrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(w(r, c)) > std::abs(w(piv, c))) piv = r;
        if (w(piv, c) == 0.0) throw std::runtime_error("gauss_jordan_inverse: singular");
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(w(c, j), w(piv, j));
            std::swap(inv(c, j), inv(piv, j));
        }
        const double d = w(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            w(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = w(r, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                w(r, j) -= f * w(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

SymEigen jacobi_eigen(const Matrix& a_in) {
    const std::size_t n = a_in.rows();
    Matrix a = a_in;
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                total += a(i, j) * a(i, j);
                if (i != j) off += a(i, j) * a(i, j);
            }
        if (off <= 1e-30 * total) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return a(l, l) < a(r, r); });
    SymEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

namespace {

Matrix regularized_gram_inverse(const Matrix& x, double lambda) {
    const Matrix xt = naive_transpose(x);
    Matrix g = naive_matmul(xt, x);
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += lambda;
    return gauss_jordan_inverse(g);
}

}  // namespace

Vector ridge_by_inverse(const Matrix& x, const Vector& y, double lambda) {
    const Matrix inv = regularized_gram_inverse(x, lambda);
    return naive_matvec(inv, naive_matvec(naive_transpose(x), y));
}

Matrix hat_by_inverse(const Matrix& x, double lambda) {
    const Matrix inv = regularized_gram_inverse(x, lambda);
    return naive_matmul(naive_matmul(x, inv), naive_transpose(x));
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_abs_diff shape");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

double max_abs_diff(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff length");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double rel_l2(const Vector& a, const Vector& b) {
    long double num = 0;
    long double den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += static_cast<long double>(a[i] - b[i]) * (a[i] - b[i]);
        den += static_cast<long double>(b[i]) * b[i];
    }
    return den == 0 ? std::sqrt(static_cast<double>(num)) : std::sqrt(static_cast<double>(num / den));
}

}  // namespace ridge::oracle
