#include "ridge/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ridge/error.hpp"
#include "ridge/rng.hpp"

namespace ridge {

LambdaGrid::LambdaGrid(std::vector<double> values) : values_(std::move(values)) { check_grid(values_); }

LambdaGrid LambdaGrid::log_spaced(double min, double max, std::size_t count) {
    if (!(min > 0.0) || !(max > min) || !std::isfinite(max)) {
        throw Error("log grid needs 0 < min < max, got min = " + std::to_string(min) + ", max = " + std::to_string(max));
    }
    if (count < 2) throw Error("log grid needs at least 2 points");
    std::vector<double> v(count);
    const double hi = std::log(max);
    const double step = (hi - std::log(min)) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) v[i] = std::exp(hi - step * static_cast<double>(i));
    v.front() = max;
    v.back() = min;
    LambdaGrid grid(std::move(v));
    grid.log_spaced_ = true;
    return grid;
}

std::vector<std::size_t> assign_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) throw Error("k must satisfy 2 <= k <= n (k = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    RandomStream rng(seed, 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

    std::vector<std::size_t> fold_of(n);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t t = 0; t < size; ++t) fold_of[order[pos++]] = f;
    }
    return fold_of;
}

namespace {

struct Split {
    Matrix x_train;
    Vector y_train;
    std::vector<std::size_t> held_out;
};

Split split_by_fold(const Matrix& x, const Vector& y, const std::vector<std::size_t>& fold_of, std::size_t fold) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    Split s;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < n; ++i) {
        if (fold_of[i] == fold) {
            s.held_out.push_back(i);
            continue;
        }
        const auto row = x.row(i);
        xs.insert(xs.end(), row.begin(), row.end());
        ys.push_back(y[i]);
    }
    const std::size_t m = ys.size();
    s.x_train = Matrix(m, p, std::move(xs));
    s.y_train = Vector(std::move(ys));
    return s;
}

// Scores each held-out observation for every lambda; squared errors are
// stored per observation and summed in index order.
std::vector<double> partition_errors(const Matrix& x, const Vector& y, const LambdaGrid& grid,
                                     const std::vector<std::size_t>& fold_of, std::size_t folds) {
    const std::size_t n = x.rows();
    std::vector<std::vector<double>> sq(grid.size(), std::vector<double>(n, 0.0));
    for (std::size_t f = 0; f < folds; ++f) {
        const Split s = split_by_fold(x, y, fold_of, f);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const RidgeFit fit = fit_auto(s.x_train, s.y_train, Penalty(grid[g]));
            for (std::size_t i : s.held_out) {
                double pred = 0.0;
                for (std::size_t j = 0; j < x.cols(); ++j) pred += x(i, j) * fit.beta[j];
                const double r = y[i] - pred;
                sq[g][i] = r * r;
            }
        }
    }
    std::vector<double> errors(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (double v : sq[g]) acc += v;
        errors[g] = acc / static_cast<double>(n);
    }
    return errors;
}

void check_xy(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size()) throw Error("design rows and response length differ");
}

}  // namespace

CvReport kfold_cv(const Matrix& x, const Vector& y, const LambdaGrid& grid, std::size_t k, std::uint64_t seed) {
    check_xy(x, y);
    CvReport rep;
    rep.method = CvMethod::kfold;
    rep.k = k;
    rep.seed = seed;
    rep.lambdas = grid.values();
    rep.fold_of = assign_folds(x.rows(), k, seed);
    rep.fold_sizes.assign(k, 0);
    for (std::size_t f : rep.fold_of) ++rep.fold_sizes[f];
    rep.errors = partition_errors(x, y, grid, rep.fold_of, k);
    rep.selected = select_lambda(rep);
    return rep;
}

CvReport loocv_shortcut(const ThinSvd& svd, const Vector& y, const LambdaGrid& grid) {
    const SpectralCache cache(svd, y);
    CvReport rep;
    rep.method = CvMethod::loocv_shortcut;
    rep.lambdas = grid.values();
    rep.errors.reserve(grid.size());
    for (double l : grid.values()) rep.errors.push_back(cache.loocv(l));
    rep.selected = select_lambda(rep);
    return rep;
}

CvReport loocv_bruteforce(const Matrix& x, const Vector& y, const LambdaGrid& grid) {
    check_xy(x, y);
    const std::size_t n = x.rows();
    if (n < 3) throw Error("leave-one-out by refitting needs n >= 3");
    std::vector<std::size_t> fold_of(n);
    std::iota(fold_of.begin(), fold_of.end(), std::size_t{0});
    CvReport rep;
    rep.method = CvMethod::loocv_bruteforce;
    rep.lambdas = grid.values();
    rep.errors = partition_errors(x, y, grid, fold_of, n);
    rep.selected = select_lambda(rep);
    return rep;
}

double select_lambda(std::span<const double> lambdas, std::span<const double> errors) {
    if (lambdas.empty() || lambdas.size() != errors.size()) throw Error("select_lambda: empty or mismatched curve");
    double best = errors[0];
    for (double e : errors) {
        if (!std::isfinite(e) || e < 0.0) throw Error("select_lambda: errors must be finite and non-negative");
        best = std::min(best, e);
    }
    const double cutoff = best + 1e-12 * std::abs(best);
    double chosen = 0.0;
    bool found = false;
    for (std::size_t g = 0; g < lambdas.size(); ++g) {
        if (errors[g] <= cutoff && (!found || lambdas[g] > chosen)) {
            chosen = lambdas[g];
            found = true;
        }
    }
    return chosen;
}

double information_criterion(const RidgeFit& fit, std::size_t n, Criterion kind) {
    if (!(fit.residual_ss > 0.0)) throw Error("information criterion undefined for zero residual sum of squares");
    if (n == 0) throw Error("information criterion needs n > 0");
    const double nn = static_cast<double>(n);
    const double penalty = kind == Criterion::aic ? 2.0 : std::log(nn);
    return nn * std::log(fit.residual_ss / nn) + penalty * fit.df;
}

}  // namespace ridge
