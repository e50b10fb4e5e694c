#pragma once
// Synthetic designs and Monte-Carlo experiments for the ridge estimator.
//
// Random streams: for a config seed s, the design uses stream (s, 0) and
// replicate r draws its noise from stream (s, 1 + r). Each replicate is
// therefore reproducible on its own, whatever order replicates run in.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ridge/estimator.hpp"
#include "ridge/linalg.hpp"
#include "ridge/moments.hpp"
#include "ridge/selection.hpp"

namespace ridge {

struct Correlation {
    enum class Kind { equicorrelation, ar1 };
    Kind kind = Kind::equicorrelation;
    double value = 0.0;  // rho or phi

    static Correlation equi(double rho) { return {Kind::equicorrelation, rho}; }
    static Correlation ar1(double phi) { return {Kind::ar1, phi}; }
};

struct SimConfig {
    std::size_t n = 50;
    std::size_t p = 5;
    Correlation correlation;
    Vector beta_true;
    double sigma = 1.0;
    std::size_t replicates = 1;
    std::uint64_t seed = 1;
    // Penalties to evaluate; lambda = 0 is allowed for Monte-Carlo moments
    // when the design has full column rank.
    std::vector<double> lambdas;
};

inline constexpr std::uint64_t kDesignStream = 0;

// Throws when the implied covariance is not positive definite or fields are inconsistent.
void validate(const SimConfig& cfg);
Matrix covariance(const SimConfig& cfg);

Matrix gen_design(const SimConfig& cfg);
// y = X beta + sigma * eps, eps iid N(0, 1) from stream (seed, stream).
Vector gen_response(const Matrix& x, const GroundTruth& gt, std::uint64_t seed, std::uint64_t stream = 1);

struct McMomentsResult {
    double lambda = 0.0;
    Vector empirical_mean;
    Vector empirical_var_diag;  // denominator R - 1
    Vector analytic_mean;
    Vector analytic_var_diag;
    Vector mean_se;  // sqrt(var / R)
    Vector var_se;   // sqrt((m4 - var^2) / R), m4 the sample fourth central moment
    std::size_t replicates = 0;

    // Largest |empirical - analytic| / SE over both moments and all components.
    double max_z() const;
    bool within(double k_se) const;
};

std::vector<McMomentsResult> mc_moments(const SimConfig& cfg);

struct PathExperiment {
    RidgePath path;
    bool sign_change = false;      // some coefficient changes sign along the grid
    bool shrinks_to_zero = false;  // ||beta(lambda_max)|| <= 0.01 max_g ||beta(lambda_g)||
    std::filesystem::path csv;
    std::filesystem::path svg;
};

// Writes path.csv (lambda, beta_1..beta_p, df, loocv) and path.svg into out_dir.
PathExperiment run_path_experiment(const Matrix& x, const Vector& y, const LambdaGrid& grid,
                                   const std::filesystem::path& out_dir);
PathExperiment path_experiment(const SimConfig& cfg, const std::filesystem::path& out_dir);

bool has_sign_change(const RidgePath& path);

struct SeedSweep {
    bool found = false;
    std::uint64_t seed = 0;
    std::size_t seeds_tried = 0;
};

// Tries seeds cfg.seed, cfg.seed + 1, ... until a path shows a sign change.
SeedSweep sign_flip_sweep(const SimConfig& cfg, std::size_t max_seeds = 20);

// Named configurations: "collinear-sign-flip", "variance-shrinkage".
SimConfig preset(std::string_view name);
std::vector<std::string> preset_names();

std::string render_path_svg(const RidgePath& path, const std::vector<std::string>& labels);

struct BenchRow {
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t grid = 0;
    double svd_seconds = 0;
    double path_seconds = 0;  // SVD plus every lambda on the grid
    double dual_seconds = 0;
    bool dual_complete = false;
    double primal_seconds = 0;
    bool primal_complete = false;
    std::size_t primal_fits_done = 0;
    // primal_seconds / path_seconds; a lower bound when primal_complete is false.
    double speedup_vs_primal = 0;
};

struct BenchOptions {
    // Independent-fit routes stop after max(factor * path_seconds, min_budget_seconds);
    // an aborted route's time is then a lower bound on its full cost.
    double budget_factor = 4.0;
    double min_budget_seconds = 1.0;
    std::uint64_t seed = 2024;
};

std::vector<BenchRow> route_benchmark(const std::vector<std::pair<std::size_t, std::size_t>>& sizes,
                                      const LambdaGrid& grid, const BenchOptions& opts = {});
void write_bench_csv(const std::filesystem::path& out, const std::vector<BenchRow>& rows);

}  // namespace ridge
