#pragma once
// Penalty selection: lambda grids, K-fold and leave-one-out cross-validation,
// and information criteria built on the effective degrees of freedom.

#include <cstdint>
#include <span>
#include <vector>

#include "ridge/estimator.hpp"
#include "ridge/linalg.hpp"

namespace ridge {

class LambdaGrid {
public:
    // Throws unless values are positive, finite and strictly decreasing.
    explicit LambdaGrid(std::vector<double> values);
    static LambdaGrid log_spaced(double min, double max, std::size_t count);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    bool log_spaced() const noexcept { return log_spaced_; }

private:
    std::vector<double> values_;
    bool log_spaced_ = false;
};

inline LambdaGrid make_log_grid(double min, double max, std::size_t count) {
    return LambdaGrid::log_spaced(min, max, count);
}

enum class CvMethod { kfold, loocv_shortcut, loocv_bruteforce };

struct CvReport {
    std::vector<double> lambdas;
    std::vector<double> errors;  // mean squared prediction error per lambda
    CvMethod method = CvMethod::loocv_shortcut;
    std::size_t k = 0;       // kfold only
    std::uint64_t seed = 0;  // kfold only
    std::vector<std::size_t> fold_sizes;
    std::vector<std::size_t> fold_of;  // fold index per observation (kfold only)
    double selected = 0.0;
};

// Seeded shuffle then contiguous blocks; first n % k folds get one extra point.
std::vector<std::size_t> assign_folds(std::size_t n, std::size_t k, std::uint64_t seed);

CvReport kfold_cv(const Matrix& x, const Vector& y, const LambdaGrid& grid, std::size_t k, std::uint64_t seed);
CvReport loocv_shortcut(const ThinSvd& svd, const Vector& y, const LambdaGrid& grid);
CvReport loocv_bruteforce(const Matrix& x, const Vector& y, const LambdaGrid& grid);

// Minimum error; near-ties (1e-12 relative) resolve to the largest lambda.
double select_lambda(std::span<const double> lambdas, std::span<const double> errors);
inline double select_lambda(const CvReport& report) { return select_lambda(report.lambdas, report.errors); }

enum class Criterion { aic, bic };

// n log(RSS / n) + penalty * df, penalty 2 (AIC) or log n (BIC).
double information_criterion(const RidgeFit& fit, std::size_t n, Criterion kind);

}  // namespace ridge
