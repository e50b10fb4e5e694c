#pragma once
// Exact first and second moments of the ridge estimator for a fixed design,
// given the true coefficients and noise variance. All quantities use the
// spectral form over a thin SVD of X.

#include <optional>
#include <span>

#include "ridge/estimator.hpp"
#include "ridge/linalg.hpp"

namespace ridge {

struct GroundTruth {
    Vector beta_true;
    double sigma2;
};

struct MomentsReport {
    double lambda = 0.0;
    Vector mean;         // E[beta(lambda)]
    double bias_sq = 0;  // ||E[beta(lambda)] - beta||^2
    double var_trace = 0;
    double mse = 0;                 // bias_sq + var_trace
    std::optional<double> mse_ols;  // only when X^T X is nonsingular
};

Vector expectation_ridge(const ThinSvd& svd, const GroundTruth& gt, Penalty pen);
Matrix variance_ridge(const ThinSvd& svd, const GroundTruth& gt, Penalty pen);
// Var[OLS] - Var[ridge(lambda)]; positive semidefinite.
Matrix variance_dominance_gap(const ThinSvd& svd, const GroundTruth& gt, Penalty pen);
MomentsReport mse_ridge(const ThinSvd& svd, const GroundTruth& gt, Penalty pen);

struct MseImprovement {
    double lambda_star = 0;
    double mse_star = 0;
    double mse_ols = 0;
    bool improves = false;  // mse_star < mse_ols
    // Centered difference (MSE(2h) - MSE(0)) / 2h against the analytic
    // derivative at h, h = 1e-6.
    double slope_fd = 0;
    double slope_analytic = 0;
    bool slope_negative = false;
    bool slope_agrees = false;  // relative gap <= 1e-4
};

MseImprovement mse_improvement_exists(const ThinSvd& svd, const GroundTruth& gt, std::span<const double> grid);

}  // namespace ridge
