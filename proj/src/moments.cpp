#include "ridge/moments.hpp"

#include <cmath>
#include <string>

#include "ridge/error.hpp"
#include "ridge/simd.hpp"

namespace ridge {
namespace {

void check_truth(const ThinSvd& svd, const GroundTruth& gt) {
    if (gt.beta_true.size() != svd.p()) {
        throw Error("beta_true has length " + std::to_string(gt.beta_true.size()) + ", design has " +
                    std::to_string(svd.p()) + " columns");
    }
    if (!(gt.sigma2 > 0.0) || !std::isfinite(gt.sigma2)) throw Error("sigma2 must be positive and finite");
    if (!all_finite(gt.beta_true)) throw Error("beta_true must be finite");
}

bool full_column_rank(const ThinSvd& svd) { return svd.rank() == svd.p(); }

void require_nonsingular(const ThinSvd& svd, const char* what) {
    if (!full_column_rank(svd)) {
        throw Error(std::string(what) + ": X^T X is singular (rank " + std::to_string(svd.rank()) + " < p = " +
                    std::to_string(svd.p()) + ")");
    }
}

// V diag(w) V^T
Matrix spectral_matrix(const Matrix& v, const Vector& w) {
    const std::size_t p = v.rows();
    Matrix scaled = v;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < w.size(); ++j) scaled(i, j) *= w[j];
    Matrix out(p, p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            const double val = simd::dot(scaled.row(a).data(), v.row(b).data(), w.size());
            out(a, b) = val;
            out(b, a) = val;
        }
    }
    return out;
}

struct Spectral {
    Vector d2;     // squared singular values
    Vector theta;  // V^T beta
    double null_sq = 0.0;  // ||beta - V V^T beta||^2
};

Spectral decompose(const ThinSvd& svd, const GroundTruth& gt) {
    Spectral s;
    s.d2 = Vector(svd.rank());
    for (std::size_t j = 0; j < svd.rank(); ++j) s.d2[j] = svd.d[j] * svd.d[j];
    s.theta = matvec_transposed(svd.v, gt.beta_true);
    if (!full_column_rank(svd)) {
        const Vector proj = matvec(svd.v, s.theta);
        for (std::size_t i = 0; i < proj.size(); ++i) {
            const double r = gt.beta_true[i] - proj[i];
            s.null_sq += r * r;
        }
    }
    return s;
}

// MSE(lambda) = sum_j [sigma2 d_j^2 + lambda^2 theta_j^2] / (d_j^2 + lambda)^2 + null part
double mse_value(const Spectral& s, double sigma2, double lambda) {
    double acc = s.null_sq;
    for (std::size_t j = 0; j < s.d2.size(); ++j) {
        const double den = s.d2[j] + lambda;
        acc += (sigma2 * s.d2[j] + lambda * lambda * s.theta[j] * s.theta[j]) / (den * den);
    }
    return acc;
}

// d/dlambda of the above: sum_j 2 d_j^2 (lambda theta_j^2 - sigma2) / (d_j^2 + lambda)^3
double mse_derivative(const Spectral& s, double sigma2, double lambda) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.d2.size(); ++j) {
        const double den = s.d2[j] + lambda;
        acc += 2.0 * s.d2[j] * (lambda * s.theta[j] * s.theta[j] - sigma2) / (den * den * den);
    }
    return acc;
}

}  // namespace

Vector expectation_ridge(const ThinSvd& svd, const GroundTruth& gt, Penalty pen) {
    check_truth(svd, gt);
    Vector w = matvec_transposed(svd.v, gt.beta_true);
    for (std::size_t j = 0; j < svd.rank(); ++j) {
        const double d2 = svd.d[j] * svd.d[j];
        w[j] *= d2 / (d2 + pen.lambda());
    }
    return matvec(svd.v, w);
}

Matrix variance_ridge(const ThinSvd& svd, const GroundTruth& gt, Penalty pen) {
    check_truth(svd, gt);
    if (pen.lambda() == 0.0) require_nonsingular(svd, "variance at lambda = 0");
    Vector w(svd.rank());
    for (std::size_t j = 0; j < svd.rank(); ++j) {
        const double d2 = svd.d[j] * svd.d[j];
        const double den = d2 + pen.lambda();
        w[j] = gt.sigma2 * d2 / (den * den);
    }
    return spectral_matrix(svd.v, w);
}

Matrix variance_dominance_gap(const ThinSvd& svd, const GroundTruth& gt, Penalty pen) {
    check_truth(svd, gt);
    require_nonsingular(svd, "variance dominance");
    Vector w(svd.rank());
    const double lambda = pen.lambda();
    for (std::size_t j = 0; j < svd.rank(); ++j) {
        const double d2 = svd.d[j] * svd.d[j];
        const double den = d2 + lambda;
        // 1/d^2 - d^2/(d^2+lambda)^2 = lambda (2 d^2 + lambda) / (d^2 (d^2+lambda)^2)
        w[j] = gt.sigma2 * lambda * (2.0 * d2 + lambda) / (d2 * den * den);
    }
    return spectral_matrix(svd.v, w);
}

MomentsReport mse_ridge(const ThinSvd& svd, const GroundTruth& gt, Penalty pen) {
    check_truth(svd, gt);
    const double lambda = pen.lambda();
    if (lambda == 0.0) require_nonsingular(svd, "MSE at lambda = 0");
    const Spectral s = decompose(svd, gt);

    MomentsReport rep;
    rep.lambda = lambda;
    rep.mean = expectation_ridge(svd, gt, pen);
    rep.bias_sq = s.null_sq;
    for (std::size_t j = 0; j < s.d2.size(); ++j) {
        const double den = s.d2[j] + lambda;
        rep.var_trace += gt.sigma2 * s.d2[j] / (den * den);
        const double shrink = lambda / den;
        rep.bias_sq += shrink * shrink * s.theta[j] * s.theta[j];
    }
    rep.mse = rep.bias_sq + rep.var_trace;
    if (full_column_rank(svd)) rep.mse_ols = mse_value(s, gt.sigma2, 0.0);
    return rep;
}

MseImprovement mse_improvement_exists(const ThinSvd& svd, const GroundTruth& gt, std::span<const double> grid) {
    check_truth(svd, gt);
    require_nonsingular(svd, "MSE improvement");
    if (grid.empty()) throw Error("MSE improvement: grid is empty");
    for (double l : grid)
        if (!(l > 0.0) || !std::isfinite(l)) throw Error("MSE improvement: grid values must be positive");
    const Spectral s = decompose(svd, gt);

    MseImprovement out;
    out.mse_ols = mse_value(s, gt.sigma2, 0.0);
    out.lambda_star = grid[0];
    out.mse_star = mse_value(s, gt.sigma2, grid[0]);
    for (double l : grid) {
        const double m = mse_value(s, gt.sigma2, l);
        // Ties go to the larger lambda.
        if (m < out.mse_star || (m == out.mse_star && l > out.lambda_star)) {
            out.mse_star = m;
            out.lambda_star = l;
        }
    }
    out.improves = out.mse_star < out.mse_ols;

    constexpr double kStep = 1e-6;
    constexpr double kRelTol = 1e-4;
    out.slope_fd = (mse_value(s, gt.sigma2, 2.0 * kStep) - out.mse_ols) / (2.0 * kStep);
    out.slope_analytic = mse_derivative(s, gt.sigma2, kStep);
    out.slope_negative = out.slope_fd < 0.0;
    out.slope_agrees = std::abs(out.slope_fd - out.slope_analytic) <= kRelTol * std::abs(out.slope_analytic);
    return out;
}

}  // namespace ridge
