#pragma once
// Ridge estimator (X^T X + lambda I)^-1 X^T y through three routes:
// the p x p normal equations (primal), the n x n push-through form (dual) and
// the spectral form over a shared thin SVD. Plus hat-matrix diagnostics,
// degrees of freedom, regularization paths and the penalized/constrained map.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ridge/linalg.hpp"

namespace ridge {

class Penalty {
public:
    explicit Penalty(double lambda);
    double lambda() const noexcept { return lambda_; }

private:
    double lambda_;
};

enum class Route { primal, dual, svd };
std::string_view to_string(Route route);

struct RidgeFit {
    double lambda = 0.0;
    Vector beta;
    Vector fitted;
    double df = 0.0;
    Route route = Route::primal;
    double residual_ss = 0.0;
};

struct RidgePath {
    std::vector<double> lambdas;  // strictly decreasing
    Matrix betas;                 // p x G
    std::vector<double> dfs;
    std::optional<std::vector<double>> loocv;
};

// Precomputes U^T y and U∘U once so that each lambda costs O(r (n + p)).
class SpectralCache {
public:
    SpectralCache(const ThinSvd& svd, const Vector& y);

    const ThinSvd& svd() const noexcept { return *svd_; }
    const Vector& projections() const noexcept { return theta_; }  // U^T y
    Vector beta(double lambda) const;
    Vector fitted(double lambda) const;
    Vector hat_diagonal(double lambda) const;
    double radius(double lambda) const;  // ||beta(lambda)||^2
    // Mean of squared leave-one-out residuals (y_i - yhat_i) / (1 - H_ii).
    double loocv(double lambda) const;

private:
    const ThinSvd* svd_;
    Vector y_;
    Vector theta_;
    Matrix u_sq_;
};

RidgeFit fit_primal(const Matrix& x, const Vector& y, Penalty pen, Deadline deadline = std::nullopt);
RidgeFit fit_dual(const Matrix& x, const Vector& y, Penalty pen, Deadline deadline = std::nullopt);
RidgeFit fit_svd(const ThinSvd& svd, const Vector& y, Penalty pen);
// Primal when p <= n, dual otherwise.
RidgeFit fit_auto(const Matrix& x, const Vector& y, Penalty pen);

// Validates that lambdas are positive and strictly decreasing.
void check_grid(std::span<const double> lambdas);

RidgePath solution_path(const ThinSvd& svd, const Vector& y, std::span<const double> lambdas, bool with_loocv = false);

// H_ii(lambda) = sum_j U_ij^2 d_j^2 / (d_j^2 + lambda)
Vector hat_diagonal(const ThinSvd& svd, Penalty pen);
// df(lambda) = sum_j d_j^2 / (d_j^2 + lambda)
double degrees_of_freedom(std::span<const double> d, Penalty pen);

// ||beta(lambda)||_2^2, the radius of the equivalent constrained problem.
double constraint_radius(const ThinSvd& svd, const Vector& y, Penalty pen);

struct Bracket {
    double lo;
    double hi;
};

// Bisection over log lambda (at most 200 steps) for ||beta(lambda)||^2 = c.
Penalty lambda_for_constraint(const ThinSvd& svd, const Vector& y, double c, Bracket bracket, double tol);

Vector predict(const RidgeFit& fit, const Matrix& x_new);

// Test oracle: OLS on [X; sqrt(lambda) I] against [y; 0] solved by QR.
Vector augmented_ols_oracle(const Matrix& x, const Vector& y, Penalty pen);

}  // namespace ridge
