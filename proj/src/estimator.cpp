#include "ridge/estimator.hpp"

#include <cmath>
#include <string>

#include "ridge/error.hpp"
#include "ridge/simd.hpp"

namespace ridge {

Penalty::Penalty(double lambda) : lambda_(lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw Error("penalty must be a finite value >= 0, got " + std::to_string(lambda));
    }
}

std::string_view to_string(Route route) {
    switch (route) {
        case Route::primal: return "primal";
        case Route::dual: return "dual";
        case Route::svd: return "svd";
    }
    return "unknown";
}

namespace {

// Below this min-pivot ratio X^T X is treated as numerically singular at lambda = 0.
constexpr double kSingularPivotRatio = 1e-13;

void check_xy(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size()) {
        throw Error("design has " + std::to_string(x.rows()) + " rows but response has length " +
                    std::to_string(y.size()));
    }
    if (x.rows() == 0 || x.cols() == 0) throw Error("design matrix must be non-empty");
    if (!all_finite(x)) throw Error("design matrix contains NaN or infinite values");
    if (!all_finite(y)) throw Error("response contains NaN or infinite values");
}

double residual_ss(const Vector& y, const Vector& fitted) {
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - fitted[i];
        ss += r * r;
    }
    return ss;
}

// sum over rows b of ||L^-1 b||^2
double sum_sq_lower_solves(const Cholesky& chol, const Matrix& rhs_rows, const Deadline& deadline) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rhs_rows.rows(); ++i) {
        if ((i & 15) == 0) check_deadline(deadline, "degrees of freedom");
        const Vector z = chol.solve_lower(rhs_rows.row(i));
        acc += simd::dot(z.data(), z.data(), z.size());
    }
    return acc;
}

}  // namespace

RidgeFit fit_primal(const Matrix& x, const Vector& y, Penalty pen, Deadline deadline) {
    check_xy(x, y);
    const double lambda = pen.lambda();
    Matrix a = gram_of_columns(x, deadline);
    add_to_diagonal(a, lambda);

    const auto singular = [] {
        return Error("X^T X is singular, so the ridge estimator needs lambda > 0");
    };
    Cholesky chol;
    try {
        chol = Cholesky::factor(a, deadline);
    } catch (const NotPositiveDefinite&) {
        if (lambda == 0.0) throw singular();
        throw;
    }
    if (lambda == 0.0 && chol.min_pivot_ratio() < kSingularPivotRatio) throw singular();

    RidgeFit fit;
    fit.lambda = lambda;
    fit.route = Route::primal;
    fit.beta = chol.solve(matvec_transposed(x, y));
    fit.fitted = matvec(x, fit.beta);
    fit.residual_ss = residual_ss(y, fit.fitted);
    // tr X (X^T X + lambda I)^-1 X^T = sum_i ||L^-1 x_i||^2
    fit.df = lambda == 0.0 ? static_cast<double>(x.cols()) : sum_sq_lower_solves(chol, x, deadline);
    return fit;
}

RidgeFit fit_dual(const Matrix& x, const Vector& y, Penalty pen, Deadline deadline) {
    check_xy(x, y);
    const double lambda = pen.lambda();
    if (lambda <= 0.0) {
        if (x.cols() > x.rows()) {
            throw Error("X^T X is singular (p = " + std::to_string(x.cols()) + " > n = " + std::to_string(x.rows()) +
                        "), so the ridge estimator needs lambda > 0");
        }
        throw Error("the dual route needs lambda > 0");
    }
    Matrix k = gram_of_rows(x, deadline);
    add_to_diagonal(k, lambda);
    const Cholesky chol = Cholesky::factor(k, deadline);
    const Vector alpha = chol.solve(y);

    RidgeFit fit;
    fit.lambda = lambda;
    fit.route = Route::dual;
    fit.beta = matvec_transposed(x, alpha);
    fit.fitted = matvec(x, fit.beta);
    fit.residual_ss = residual_ss(y, fit.fitted);
    // tr X X^T (X X^T + lambda I)^-1 = ||L^-1 X||_F^2, columns of X as right-hand sides
    fit.df = sum_sq_lower_solves(chol, x.transposed(), deadline);
    return fit;
}

RidgeFit fit_svd(const ThinSvd& svd, const Vector& y, Penalty pen) {
    if (pen.lambda() == 0.0 && svd.rank() < svd.p()) {
        throw Error("X^T X is singular (rank " + std::to_string(svd.rank()) + " < p = " + std::to_string(svd.p()) +
                    "), so the ridge estimator needs lambda > 0");
    }
    const SpectralCache cache(svd, y);
    RidgeFit fit;
    fit.lambda = pen.lambda();
    fit.route = Route::svd;
    fit.beta = cache.beta(pen.lambda());
    fit.fitted = cache.fitted(pen.lambda());
    fit.residual_ss = residual_ss(y, fit.fitted);
    fit.df = degrees_of_freedom(svd.d.span(), pen);
    return fit;
}

RidgeFit fit_auto(const Matrix& x, const Vector& y, Penalty pen) {
    if (x.cols() <= x.rows()) return fit_primal(x, y, pen);
    return fit_dual(x, y, pen);
}

// ---------------------------------------------------------------------------

SpectralCache::SpectralCache(const ThinSvd& svd, const Vector& y) : svd_(&svd), y_(y) {
    if (svd.n() != y.size()) {
        throw Error("response has length " + std::to_string(y.size()) + " but the SVD has " +
                    std::to_string(svd.n()) + " rows");
    }
    if (!all_finite(y)) throw Error("response contains NaN or infinite values");
    theta_ = matvec_transposed(svd.u, y);
    u_sq_ = svd.u;
    for (double& v : std::span<double>(u_sq_.data(), u_sq_.values().size())) v *= v;
}

Vector SpectralCache::beta(double lambda) const {
    const ThinSvd& s = *svd_;
    Vector w(s.rank());
    for (std::size_t j = 0; j < s.rank(); ++j) w[j] = s.d[j] / (s.d[j] * s.d[j] + lambda) * theta_[j];
    return matvec(s.v, w);
}

Vector SpectralCache::fitted(double lambda) const {
    const ThinSvd& s = *svd_;
    Vector w(s.rank());
    for (std::size_t j = 0; j < s.rank(); ++j) {
        const double d2 = s.d[j] * s.d[j];
        w[j] = d2 / (d2 + lambda) * theta_[j];
    }
    return matvec(s.u, w);
}

Vector SpectralCache::hat_diagonal(double lambda) const {
    const ThinSvd& s = *svd_;
    Vector shrink(s.rank());
    for (std::size_t j = 0; j < s.rank(); ++j) {
        const double d2 = s.d[j] * s.d[j];
        shrink[j] = d2 / (d2 + lambda);
    }
    return matvec(u_sq_, shrink);
}

double SpectralCache::radius(double lambda) const {
    const ThinSvd& s = *svd_;
    double acc = 0.0;
    for (std::size_t j = 0; j < s.rank(); ++j) {
        const double c = s.d[j] / (s.d[j] * s.d[j] + lambda) * theta_[j];
        acc += c * c;
    }
    return acc;
}

double SpectralCache::loocv(double lambda) const {
    const Vector yhat = fitted(lambda);
    const Vector h = hat_diagonal(lambda);
    double acc = 0.0;
    for (std::size_t i = 0; i < yhat.size(); ++i) {
        if (h[i] >= 1.0 - 1e-12) {
            throw Error("leave-one-out shortcut undefined: H_ii >= 1 at observation " + std::to_string(i) +
                        " (lambda = " + std::to_string(lambda) + ")");
        }
        const double r = (y_[i] - yhat[i]) / (1.0 - h[i]);
        acc += r * r;
    }
    return acc / static_cast<double>(yhat.size());
}

// ---------------------------------------------------------------------------

void check_grid(std::span<const double> lambdas) {
    if (lambdas.empty()) throw Error("lambda grid is empty");
    for (std::size_t g = 0; g < lambdas.size(); ++g) {
        if (!std::isfinite(lambdas[g]) || lambdas[g] <= 0.0) {
            throw Error("lambda grid value " + std::to_string(lambdas[g]) + " at position " + std::to_string(g) +
                        " is not strictly positive");
        }
        if (g > 0 && !(lambdas[g] < lambdas[g - 1])) {
            throw Error("lambda grid must be strictly decreasing (position " + std::to_string(g) + ")");
        }
    }
}

RidgePath solution_path(const ThinSvd& svd, const Vector& y, std::span<const double> lambdas, bool with_loocv) {
    check_grid(lambdas);
    const SpectralCache cache(svd, y);
    const std::size_t p = svd.p();
    RidgePath path;
    path.lambdas.assign(lambdas.begin(), lambdas.end());
    path.betas = Matrix(p, lambdas.size());
    path.dfs.reserve(lambdas.size());
    if (with_loocv) path.loocv.emplace();
    for (std::size_t g = 0; g < lambdas.size(); ++g) {
        const Vector b = cache.beta(lambdas[g]);
        for (std::size_t i = 0; i < p; ++i) path.betas(i, g) = b[i];
        path.dfs.push_back(degrees_of_freedom(svd.d.span(), Penalty(lambdas[g])));
        if (with_loocv) path.loocv->push_back(cache.loocv(lambdas[g]));
    }
    return path;
}

Vector hat_diagonal(const ThinSvd& svd, Penalty pen) {
    const Vector zeros(svd.n());
    return SpectralCache(svd, zeros).hat_diagonal(pen.lambda());
}

double degrees_of_freedom(std::span<const double> d, Penalty pen) {
    double df = 0.0;
    for (double dj : d) {
        if (!(dj > 0.0)) throw Error("singular values must be positive");
        const double d2 = dj * dj;
        df += d2 / (d2 + pen.lambda());
    }
    return df;
}

double constraint_radius(const ThinSvd& svd, const Vector& y, Penalty pen) {
    if (pen.lambda() <= 0.0) throw Error("constraint_radius needs lambda > 0");
    return SpectralCache(svd, y).radius(pen.lambda());
}

Penalty lambda_for_constraint(const ThinSvd& svd, const Vector& y, double c, Bracket bracket, double tol) {
    if (!(c > 0.0)) throw Error("constraint radius must be positive");
    if (!(bracket.lo > 0.0) || !(bracket.hi > bracket.lo)) throw Error("bracket must satisfy 0 < lo < hi");
    if (!(tol > 0.0)) throw Error("tolerance must be positive");
    const SpectralCache cache(svd, y);
    if (max_abs(cache.projections().span()) == 0.0) throw Error("X^T y = 0: every lambda gives beta = 0");

    const double c_lo = cache.radius(bracket.lo);
    const double c_hi = cache.radius(bracket.hi);
    if (!(c < c_lo && c > c_hi)) {
        throw Error("invalid bracket: radius at lambda_lo = " + std::to_string(c_lo) + ", at lambda_hi = " +
                    std::to_string(c_hi) + ", requested c = " + std::to_string(c));
    }
    double log_lo = std::log(bracket.lo);
    double log_hi = std::log(bracket.hi);
    constexpr int kMaxIterations = 200;
    for (int it = 0; it < kMaxIterations; ++it) {
        const double mid = 0.5 * (log_lo + log_hi);
        const double lambda = std::exp(mid);
        const double r = cache.radius(lambda);
        if (std::abs(r - c) <= tol * c) return Penalty(lambda);
        // radius decreases with lambda
        if (r > c)
            log_lo = mid;
        else
            log_hi = mid;
    }
    throw ConvergenceError("lambda_for_constraint: bisection did not reach tolerance " + std::to_string(tol) +
                           " within 200 iterations");
}

Vector predict(const RidgeFit& fit, const Matrix& x_new) {
    if (x_new.cols() != fit.beta.size()) {
        throw Error("new data has " + std::to_string(x_new.cols()) + " columns, model has " +
                    std::to_string(fit.beta.size()) + " coefficients");
    }
    return matvec(x_new, fit.beta);
}

Vector augmented_ols_oracle(const Matrix& x, const Vector& y, Penalty pen) {
    check_xy(x, y);
    if (pen.lambda() <= 0.0) throw Error("augmented OLS oracle needs lambda > 0");
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    Matrix aug(n + p, p);
    Vector rhs(n + p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) aug(i, j) = x(i, j);
        rhs[i] = y[i];
    }
    const double root = std::sqrt(pen.lambda());
    for (std::size_t j = 0; j < p; ++j) aug(n + j, j) = root;
    return least_squares_qr(aug, rhs);
}

}  // namespace ridge
