// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ridge/error.hpp"
#include "ridge/estimator.hpp"
#include "ridge/moments.hpp"
#include "ridge/selection.hpp"
#include "ridge/simulate.hpp"

using namespace ridge;
using Seconds = std::chrono::duration<double>;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int failures = 0;

void criterion(int id, const char* title, double time_limit, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = Seconds(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.2f s", secs);
    if (time_limit > 0) {
        timing += " (limit " + fmt("%g", time_limit) + " s)";
        if (secs >= time_limit) {
            o.pass = false;
            o.detail += "; over time limit";
        }
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s; %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) { return make_log_grid(lo, hi, count).values(); }

Matrix orthonormal_columns(std::size_t n, std::size_t p, std::uint64_t seed) {
    // Gram-Schmidt on a random matrix, twice for stability.
    Matrix q = oracle::random_matrix(n, p, seed);
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < j; ++k) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += q(i, j) * q(i, k);
                for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
            }
            double nrm = 0.0;
            for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
            nrm = std::sqrt(nrm);
            for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
        }
    }
    return q;
}

Outcome orthonormal_shrinkage() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix q = orthonormal_columns(40, 8, seed);
        const Vector y = oracle::random_vector(40, seed + 100);
        const Vector ols = fit_primal(q, y, Penalty(0.0)).beta;
        for (double lam : {0.1, 1.0, 10.0}) {
            for (const Vector& b : {fit_primal(q, y, Penalty(lam)).beta, fit_svd(thin_svd(q), y, Penalty(lam)).beta}) {
                for (std::size_t j = 0; j < b.size(); ++j) worst = std::max(worst, std::abs(b[j] - ols[j] / (1.0 + lam)));
            }
        }
    }
    return {worst <= 1e-12, "max |beta(l) - beta(0)/(1+l)| = " + fmt("%.3g", worst) + " (tol 1e-12)"};
}

Outcome route_equivalence() {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const std::size_t n = oracle::uniform_int(1, 200, 4 * i + 1);
        const std::size_t p = oracle::uniform_int(1, 200, 4 * i + 2);
        const double lam = oracle::log_uniform(1e-4, 1e4, 4 * i + 3);
        const Matrix x = oracle::random_matrix(n, p, 4 * i + 4);
        const Vector y = oracle::random_vector(n, 7919 * i + 5);
        const Penalty pen(lam);
        const Vector ref = fit_svd(thin_svd(x), y, pen).beta;
        worst = std::max({worst, relative_l2(fit_primal(x, y, pen).beta, ref), relative_l2(fit_dual(x, y, pen).beta, ref),
                          relative_l2(augmented_ols_oracle(x, y, pen), ref)});
    }
    return {worst <= 1e-8, "200 instances, max relative l2 gap = " + fmt("%.3g", worst) + " (tol 1e-8)"};
}

Outcome degrees_of_freedom_check() {
    double worst = 0.0;
    bool decreasing = true;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const std::size_t n = oracle::uniform_int(2, 50, 3 * i + 11);
        const std::size_t p = oracle::uniform_int(1, 30, 3 * i + 12);
        const double lam = oracle::log_uniform(1e-2, 1e2, 3 * i + 13);
        const Matrix x = oracle::random_matrix(n, p, i + 500);
        const ThinSvd svd = thin_svd(x);
        const Matrix h = oracle::hat_by_inverse(x, lam);
        double trace = 0.0;
        for (std::size_t k = 0; k < n; ++k) trace += h(k, k);
        worst = std::max(worst, std::abs(degrees_of_freedom(svd.d.span(), Penalty(lam)) - trace));

        const std::vector<double> grid = log_grid(oracle::log_uniform(1e-4, 1e-1, i + 900),
                                                  oracle::log_uniform(1e1, 1e4, i + 901), 20);
        double prev = INFINITY;
        for (double l : grid) {
            // the grid is descending, so df must rise along it
            const double df = degrees_of_freedom(svd.d.span(), Penalty(l));
            if (prev != INFINITY && !(df > prev)) decreasing = false;
            prev = df;
        }
    }
    return {worst <= 1e-10 && decreasing, "max |df - tr H| = " + fmt("%.3g", worst) +
                                             " (tol 1e-10), strictly decreasing in lambda: " +
                                             (decreasing ? "yes" : "no")};
}

Outcome loocv_identity() {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const std::size_t n = oracle::uniform_int(3, 40, 3 * i + 21);
        const std::size_t p = oracle::uniform_int(1, 100, 3 * i + 22);
        const Matrix x = oracle::random_matrix(n, p, i + 700);
        const Vector y = oracle::random_vector(n, i + 800);
        const LambdaGrid grid = make_log_grid(1e-3, 1e3, 20);
        const CvReport s = loocv_shortcut(thin_svd(x), y, grid);
        const CvReport b = loocv_bruteforce(x, y, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) worst = std::max(worst, std::abs(s.errors[g] - b.errors[g]) / b.errors[g]);
    }
    return {worst <= 1e-8, "50 instances x 20 lambdas, max relative gap = " + fmt("%.3g", worst) + " (tol 1e-8)"};
}

Outcome variance_dominance() {
    double worst_ratio = INFINITY;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const std::size_t p = oracle::uniform_int(1, 12, 2 * i + 31);
        const std::size_t n = p + oracle::uniform_int(2, 40, 2 * i + 32);
        const Matrix x = oracle::random_matrix(n, p, i + 1100);
        const ThinSvd svd = thin_svd(x);
        const GroundTruth gt{oracle::random_vector(p, i + 1200), oracle::log_uniform(0.1, 10, i + 1300)};
        const Matrix v0 = variance_ridge(svd, gt, Penalty(0.0));
        for (double lam : {0.01, 1.0, 100.0}) {
            const Matrix vl = variance_ridge(svd, gt, Penalty(lam));
            Matrix gap(p, p);
            for (std::size_t a = 0; a < p; ++a)
                for (std::size_t b = 0; b < p; ++b) gap(a, b) = v0(a, b) - vl(a, b);
            const auto eig = oracle::jacobi_eigen(gap);
            const double ratio = eig.values.front() / std::abs(eig.values.back());
            worst_ratio = std::min(worst_ratio, ratio);
        }
    }
    return {worst_ratio >= -1e-10, "min over instances of lambda_min / lambda_max = " + fmt("%.3g", worst_ratio) +
                                       " (must be >= -1e-10)"};
}

Outcome mse_improvement() {
    const std::vector<double> grid = log_grid(1e-4, 1e4, 200);
    std::size_t improves = 0;
    std::size_t negative = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const std::size_t p = oracle::uniform_int(1, 10, 2 * i + 41);
        const std::size_t n = p + oracle::uniform_int(1, 40, 2 * i + 42);
        const ThinSvd svd = thin_svd(oracle::random_matrix(n, p, i + 1400));
        const GroundTruth gt{oracle::random_vector(p, i + 1500), oracle::log_uniform(0.01, 10, i + 1600)};
        const MseImprovement imp = mse_improvement_exists(svd, gt, grid);
        if (imp.improves) ++improves;
        if (imp.slope_negative) ++negative;
    }
    const ThinSvd scalar = thin_svd(Matrix::from_rows({{1}}));
    const GroundTruth one{Vector{1}, 1.0};
    const double m1 = mse_ridge(scalar, one, Penalty(1.0)).mse;
    const double m0 = mse_ridge(scalar, one, Penalty(0.0)).mse;
    const bool scalar_ok = std::abs(m1 - 0.5) <= 1e-12 && std::abs(m0 - 1.0) <= 1e-12;
    return {improves == 100 && negative == 100 && scalar_ok,
            std::to_string(improves) + "/100 grid minima below MSE(0), " + std::to_string(negative) +
                "/100 negative slopes at 0+; scalar MSE(1) = " + fmt("%.15g", m1) + ", MSE(0) = " + fmt("%.15g", m0)};
}

Outcome monte_carlo() {
    SimConfig cfg = preset("variance-shrinkage");
    cfg.lambdas = {1.0};
    const auto res = mc_moments(cfg);
    const McMomentsResult& r = res.front();
    return {r.replicates == 5000 && r.within(4.0),
            "R = " + std::to_string(r.replicates) + ", max |empirical - analytic| / SE = " + fmt("%.3g", r.max_z()) +
                " (limit 4)"};
}

Outcome constraint_round_trip() {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const std::size_t n = oracle::uniform_int(2, 60, 2 * i + 51);
        const std::size_t p = oracle::uniform_int(1, 60, 2 * i + 52);
        const Matrix x = oracle::random_matrix(n, p, i + 1700);
        const Vector y = oracle::random_vector(n, i + 1800);
        const ThinSvd svd = thin_svd(x);
        const double target_lambda = oracle::log_uniform(1e-3, 1e3, i + 1900);
        const double c = constraint_radius(svd, y, Penalty(target_lambda));
        const Penalty found = lambda_for_constraint(svd, y, c, {1e-6, 1e6}, 1e-9);
        worst = std::max(worst, std::abs(constraint_radius(svd, y, found) - c) / c);
    }
    return {worst <= 1e-6, "max relative radius error = " + fmt("%.3g", worst) + " (tol 1e-6)"};
}

Outcome performance_shape() {
    BenchOptions opts;
    const auto rows = route_benchmark({{100, 10000}}, make_log_grid(1e-2, 1e2, 100), opts);
    const BenchRow& r = rows.front();
    const std::string primal = std::string(r.primal_complete ? "" : ">= ") + fmt("%.3g", r.primal_seconds) + " s (" +
                               std::to_string(r.primal_fits_done) + "/100 fits before the budget ran out)";
    return {r.speedup_vs_primal >= 2.0 && r.path_seconds < 10.0,
            "one SVD + 100-lambda path " + fmt("%.3g", r.path_seconds) + " s vs independent primal fits " + primal +
                ", speedup " + (r.primal_complete ? "" : ">= ") + fmt("%.3g", r.speedup_vs_primal) + "x (need 2x)"};
}

Outcome sign_flip_figure() {
    const SimConfig cfg = preset("collinear-sign-flip");
    const SeedSweep sweep = sign_flip_sweep(cfg, 20);
    if (!sweep.found) return {false, "no sign change in 20 seeds"};
    SimConfig chosen = cfg;
    chosen.seed = sweep.seed;
    const auto dir = std::filesystem::temp_directory_path() / "ridge_acceptance_figure";
    const PathExperiment e = path_experiment(chosen, dir);
    std::ifstream svg(e.svg);
    std::stringstream ss;
    ss << svg.rdbuf();
    const bool svg_ok = ss.str().find("<svg") != std::string::npos && ss.str().find("<polyline") != std::string::npos;
    return {e.sign_change && e.shrinks_to_zero && svg_ok,
            "seed " + std::to_string(sweep.seed) + " (" + std::to_string(sweep.seeds_tried) +
                " tried), sign change: " + (e.sign_change ? "yes" : "no") +
                ", shrinks to 0 at largest lambda: " + (e.shrinks_to_zero ? "yes" : "no") + ", " + e.svg.string()};
}

}  // namespace

int main() {
    criterion(1, "orthonormal shrinkage", 1.0, orthonormal_shrinkage);
    criterion(2, "route equivalence", 30.0, route_equivalence);
    criterion(3, "degrees of freedom", 0.0, degrees_of_freedom_check);
    criterion(4, "LOOCV identity", 120.0, loocv_identity);
    criterion(5, "variance dominance", 0.0, variance_dominance);
    criterion(6, "MSE improvement", 0.0, mse_improvement);
    criterion(7, "Monte-Carlo moments", 60.0, monte_carlo);
    criterion(8, "constrained round trip", 0.0, constraint_round_trip);
    criterion(9, "path performance", 10.0, performance_shape);
    criterion(10, "sign-flip path figure", 0.0, sign_flip_figure);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
