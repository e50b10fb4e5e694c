#include "ridge/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ridge/dataio.hpp"
#include "ridge/error.hpp"
#include "ridge/rng.hpp"

namespace ridge {

void validate(const SimConfig& cfg) {
    if (cfg.n < 2 || cfg.p < 1) throw Error("simulation needs n >= 2 and p >= 1");
    if (cfg.beta_true.size() != cfg.p) {
        throw Error("beta_true has length " + std::to_string(cfg.beta_true.size()) + ", expected p = " +
                    std::to_string(cfg.p));
    }
    if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) throw Error("sigma must be positive");
    if (cfg.replicates < 1) throw Error("replicates must be >= 1");
    const double v = cfg.correlation.value;
    if (cfg.correlation.kind == Correlation::Kind::equicorrelation) {
        const double lower = cfg.p > 1 ? -1.0 / static_cast<double>(cfg.p - 1) : -1.0;
        if (!(v > lower && v < 1.0)) {
            throw Error("equicorrelation rho = " + std::to_string(v) + " outside (" + std::to_string(lower) +
                        ", 1); covariance would not be positive definite");
        }
    } else if (!(std::abs(v) < 1.0)) {
        throw Error("AR(1) coefficient phi = " + std::to_string(v) + " must satisfy |phi| < 1");
    }
}

Matrix covariance(const SimConfig& cfg) {
    validate(cfg);
    Matrix s(cfg.p, cfg.p);
    const double v = cfg.correlation.value;
    for (std::size_t i = 0; i < cfg.p; ++i) {
        for (std::size_t j = 0; j < cfg.p; ++j) {
            if (i == j)
                s(i, j) = 1.0;
            else if (cfg.correlation.kind == Correlation::Kind::equicorrelation)
                s(i, j) = v;
            else
                s(i, j) = std::pow(v, static_cast<double>(i > j ? i - j : j - i));
        }
    }
    return s;
}

Matrix gen_design(const SimConfig& cfg) {
    const Cholesky chol = Cholesky::factor(covariance(cfg));
    const Matrix& l = chol.lower();
    RandomStream rng(cfg.seed, kDesignStream);
    Matrix x(cfg.n, cfg.p);
    Vector z(cfg.p);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        for (std::size_t j = 0; j < cfg.p; ++j) z[j] = rng.normal();
        for (std::size_t a = 0; a < cfg.p; ++a) {
            double acc = 0.0;
            for (std::size_t b = 0; b <= a; ++b) acc += l(a, b) * z[b];
            x(i, a) = acc;
        }
    }
    return x;
}

Vector gen_response(const Matrix& x, const GroundTruth& gt, std::uint64_t seed, std::uint64_t stream) {
    if (gt.beta_true.size() != x.cols()) throw Error("gen_response: beta_true length does not match design");
    if (!(gt.sigma2 >= 0.0)) throw Error("gen_response: sigma2 must be non-negative");
    const double sigma = std::sqrt(gt.sigma2);
    Vector y = matvec(x, gt.beta_true);
    RandomStream rng(seed, stream);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
    return y;
}

// ---------------------------------------------------------------------------

double McMomentsResult::max_z() const {
    double worst = 0.0;
    const auto scan = [&worst](const Vector& emp, const Vector& ana, const Vector& se) {
        for (std::size_t j = 0; j < emp.size(); ++j) {
            const double gap = std::abs(emp[j] - ana[j]);
            if (gap == 0.0) continue;
            worst = std::max(worst, se[j] > 0.0 ? gap / se[j] : std::numeric_limits<double>::infinity());
        }
    };
    scan(empirical_mean, analytic_mean, mean_se);
    scan(empirical_var_diag, analytic_var_diag, var_se);
    return worst;
}

bool McMomentsResult::within(double k_se) const { return max_z() <= k_se; }

std::vector<McMomentsResult> mc_moments(const SimConfig& cfg) {
    validate(cfg);
    if (cfg.lambdas.empty()) throw Error("mc_moments: no lambdas configured");
    const Matrix x = gen_design(cfg);
    const ThinSvd svd = thin_svd(x);
    const GroundTruth gt{cfg.beta_true, cfg.sigma * cfg.sigma};
    for (double l : cfg.lambdas) {
        if (Penalty(l).lambda() == 0.0 && svd.rank() < cfg.p) {
            throw Error("mc_moments: lambda = 0 needs a full-rank design");
        }
    }

    const std::size_t p = cfg.p;
    const std::size_t reps = cfg.replicates;
    const std::size_t grid = cfg.lambdas.size();
    // draws[g] is reps x p
    std::vector<Matrix> draws(grid, Matrix(reps, p));
    for (std::size_t r = 0; r < reps; ++r) {
        const Vector y = gen_response(x, gt, cfg.seed, 1 + r);
        const SpectralCache cache(svd, y);
        for (std::size_t g = 0; g < grid; ++g) {
            const Vector b = cache.beta(cfg.lambdas[g]);
            std::copy(b.begin(), b.end(), draws[g].row(r).begin());
        }
    }

    std::vector<McMomentsResult> out;
    out.reserve(grid);
    const double rr = static_cast<double>(reps);
    for (std::size_t g = 0; g < grid; ++g) {
        McMomentsResult res;
        res.lambda = cfg.lambdas[g];
        res.replicates = reps;
        res.empirical_mean = Vector(p);
        res.empirical_var_diag = Vector(p);
        res.mean_se = Vector(p);
        res.var_se = Vector(p);
        for (std::size_t j = 0; j < p; ++j) {
            double mean = 0.0;
            for (std::size_t r = 0; r < reps; ++r) mean += draws[g](r, j);
            mean /= rr;
            double m2 = 0.0;
            double m4 = 0.0;
            for (std::size_t r = 0; r < reps; ++r) {
                const double dev = draws[g](r, j) - mean;
                m2 += dev * dev;
                m4 += dev * dev * dev * dev;
            }
            const double var = reps > 1 ? m2 / (rr - 1.0) : 0.0;
            m4 /= rr;
            res.empirical_mean[j] = mean;
            res.empirical_var_diag[j] = var;
            res.mean_se[j] = std::sqrt(var / rr);
            res.var_se[j] = std::sqrt(std::max(0.0, m4 - (m2 / rr) * (m2 / rr)) / rr);
        }
        const Penalty pen(res.lambda);
        res.analytic_mean = expectation_ridge(svd, gt, pen);
        const Matrix var = variance_ridge(svd, gt, pen);
        res.analytic_var_diag = Vector(p);
        for (std::size_t j = 0; j < p; ++j) res.analytic_var_diag[j] = var(j, j);
        out.push_back(std::move(res));
    }
    return out;
}

// ---------------------------------------------------------------------------

bool has_sign_change(const RidgePath& path) {
    const Matrix& b = path.betas;
    for (std::size_t j = 0; j < b.rows(); ++j)
        for (std::size_t g = 0; g + 1 < b.cols(); ++g)
            if (b(j, g) * b(j, g + 1) < 0.0) return true;
    return false;
}

namespace {

bool shrinks_to_zero(const RidgePath& path) {
    const Matrix& b = path.betas;
    double largest = 0.0;
    double at_max_lambda = 0.0;
    for (std::size_t g = 0; g < b.cols(); ++g) {
        double sq = 0.0;
        for (std::size_t j = 0; j < b.rows(); ++j) sq += b(j, g) * b(j, g);
        largest = std::max(largest, std::sqrt(sq));
        if (g == 0) at_max_lambda = std::sqrt(sq);
    }
    return at_max_lambda <= 0.01 * largest;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string render_path_svg(const RidgePath& path, const std::vector<std::string>& labels) {
    constexpr double kWidth = 800.0;
    constexpr double kHeight = 600.0;
    constexpr double kLeft = 80.0;
    constexpr double kRight = 140.0;
    constexpr double kTop = 40.0;
    constexpr double kBottom = 60.0;
    const Matrix& b = path.betas;
    const std::size_t grid = path.lambdas.size();

    double xmin = std::log10(path.lambdas.back());
    double xmax = std::log10(path.lambdas.front());
    if (xmax == xmin) xmax = xmin + 1.0;
    double ymin = 0.0;
    double ymax = 0.0;
    for (double v : b.values()) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    if (ymax == ymin) ymax = ymin + 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    const auto sx = [&](double lam) {
        return kLeft + (std::log10(lam) - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight);
    };
    const auto sy = [&](double v) { return kTop + (ymax - v) / (ymax - ymin) * (kHeight - kTop - kBottom); };

    std::ostringstream svg;
    svg.setf(std::ios::fixed);
    svg.precision(2);
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n"
        << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
        << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
        << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << sy(0.0) << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << sy(0.0)
        << "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
    for (int t = static_cast<int>(std::ceil(xmin)); t <= static_cast<int>(std::floor(xmax)); ++t) {
        const double px = sx(std::pow(10.0, t));
        svg << "<line x1=\"" << px << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << px << "\" y2=\""
            << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px << "\" y=\"" << kHeight - kBottom + 20
            << "\" font-size=\"12\" text-anchor=\"middle\">1e" << t << "</text>\n";
    }
    svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 15
        << "\" font-size=\"14\" text-anchor=\"middle\">log10(lambda)</text>\n"
        << "<text x=\"20\" y=\"" << (kTop + kHeight - kBottom) / 2
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << (kTop + kHeight - kBottom) / 2
        << ")\">coefficient</text>\n";
    for (const double v : {ymin + pad, ymax - pad}) {
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(v) + 4 << "\" font-size=\"12\" text-anchor=\"end\">"
            << format_full(v).substr(0, 8) << "</text>\n";
    }
    for (std::size_t j = 0; j < b.rows(); ++j) {
        const char* color = kPalette[j % std::size(kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t g = 0; g < grid; ++g) svg << (g ? " " : "") << sx(path.lambdas[g]) << "," << sy(b(j, g));
        svg << "\"/>\n";
        const std::string label = j < labels.size() ? labels[j] : "beta" + std::to_string(j + 1);
        svg << "<text x=\"" << kWidth - kRight + 10 << "\" y=\"" << kTop + 18.0 * static_cast<double>(j + 1)
            << "\" font-size=\"12\" fill=\"" << color << "\">" << label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

PathExperiment run_path_experiment(const Matrix& x, const Vector& y, const LambdaGrid& grid,
                                   const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw Error("cannot create output directory '" + out_dir.string() + "'");
    }
    const ThinSvd svd = thin_svd(x);
    PathExperiment exp;
    exp.path = solution_path(svd, y, grid.values(), true);
    exp.sign_change = has_sign_change(exp.path);
    exp.shrinks_to_zero = shrinks_to_zero(exp.path);

    const std::size_t p = x.cols();
    const std::size_t g = grid.size();
    std::vector<std::string> header{"lambda"};
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < p; ++j) {
        labels.push_back("beta_" + std::to_string(j + 1));
        header.push_back(labels.back());
    }
    header.emplace_back("df");
    header.emplace_back("loocv");
    Matrix table(g, p + 3);
    for (std::size_t k = 0; k < g; ++k) {
        table(k, 0) = exp.path.lambdas[k];
        for (std::size_t j = 0; j < p; ++j) table(k, 1 + j) = exp.path.betas(j, k);
        table(k, p + 1) = exp.path.dfs[k];
        table(k, p + 2) = (*exp.path.loocv)[k];
    }
    exp.csv = out_dir / "path.csv";
    exp.svg = out_dir / "path.svg";
    write_csv(exp.csv, header, table);
    std::ofstream svg(exp.svg);
    if (!svg) throw Error("cannot write '" + exp.svg.string() + "'");
    svg << render_path_svg(exp.path, labels);
    return exp;
}

PathExperiment path_experiment(const SimConfig& cfg, const std::filesystem::path& out_dir) {
    validate(cfg);
    const LambdaGrid grid(cfg.lambdas);
    if (grid.size() < 20) throw Error("path experiment needs a grid of at least 20 lambdas");
    const Matrix x = gen_design(cfg);
    const Vector y = gen_response(x, GroundTruth{cfg.beta_true, cfg.sigma * cfg.sigma}, cfg.seed, 1);
    return run_path_experiment(x, y, grid, out_dir);
}

SeedSweep sign_flip_sweep(const SimConfig& cfg, std::size_t max_seeds) {
    validate(cfg);
    const LambdaGrid grid(cfg.lambdas);
    SeedSweep sweep;
    for (std::size_t s = 0; s < max_seeds; ++s) {
        SimConfig trial = cfg;
        trial.seed = cfg.seed + s;
        const Matrix x = gen_design(trial);
        const Vector y = gen_response(x, GroundTruth{trial.beta_true, trial.sigma * trial.sigma}, trial.seed, 1);
        ++sweep.seeds_tried;
        if (has_sign_change(solution_path(thin_svd(x), y, grid.values()))) {
            sweep.found = true;
            sweep.seed = trial.seed;
            break;
        }
    }
    return sweep;
}

SimConfig preset(std::string_view name) {
    SimConfig cfg;
    if (name == "collinear-sign-flip") {
        cfg.n = 50;
        cfg.p = 2;
        cfg.correlation = Correlation::equi(0.95);
        cfg.beta_true = Vector{2.0, -2.0};
        cfg.sigma = 1.0;
        cfg.replicates = 1;
        cfg.seed = 1;
        cfg.lambdas = LambdaGrid::log_spaced(1e-2, 1e5, 60).values();
        return cfg;
    }
    if (name == "variance-shrinkage") {
        cfg.n = 50;
        cfg.p = 5;
        cfg.correlation = Correlation::equi(0.8);
        cfg.beta_true = Vector{1.0, 0.5, -0.5, 1.0, -1.0};
        cfg.sigma = 1.0;
        cfg.replicates = 5000;
        cfg.seed = 7;
        cfg.lambdas = {100.0, 10.0, 1.0, 0.1, 0.0};
        return cfg;
    }
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error("unknown preset '" + std::string(name) + "'; known presets: " + known);
}

std::vector<std::string> preset_names() { return {"collinear-sign-flip", "variance-shrinkage"}; }

// ---------------------------------------------------------------------------

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Timed {
    double seconds = 0;
    bool complete = false;
    std::size_t fits = 0;
};

template <class Fit>
Timed time_independent_fits(const LambdaGrid& grid, double budget, Fit&& fit) {
    Timed t;
    const auto start = Clock::now();
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budget));
    try {
        for (double l : grid.values()) {
            fit(Penalty(l), Deadline(deadline));
            ++t.fits;
        }
        t.complete = true;
    } catch (const DeadlineExceeded&) {
        t.complete = false;
    }
    t.seconds = seconds_since(start);
    return t;
}

}  // namespace

std::vector<BenchRow> route_benchmark(const std::vector<std::pair<std::size_t, std::size_t>>& sizes,
                                      const LambdaGrid& grid, const BenchOptions& opts) {
    std::vector<BenchRow> rows;
    for (const auto& [n, p] : sizes) {
        if (n < 1 || p < 1) throw Error("benchmark sizes must be positive");
        RandomStream rng(opts.seed, n * 1000003u + p);
        Matrix x(n, p);
        for (double& v : std::span<double>(x.data(), n * p)) v = rng.normal();
        Vector y(n);
        for (double& v : y) v = rng.normal();

        BenchRow row;
        row.n = n;
        row.p = p;
        row.grid = grid.size();

        auto start = Clock::now();
        const ThinSvd svd = thin_svd(x);
        row.svd_seconds = seconds_since(start);
        const RidgePath path = solution_path(svd, y, grid.values());
        row.path_seconds = seconds_since(start);
        (void)path;

        const double budget = std::max(opts.budget_factor * row.path_seconds, opts.min_budget_seconds);
        const Timed dual = time_independent_fits(grid, budget, [&](Penalty pen, Deadline dl) { fit_dual(x, y, pen, dl); });
        row.dual_seconds = dual.seconds;
        row.dual_complete = dual.complete;
        const Timed primal =
            time_independent_fits(grid, budget, [&](Penalty pen, Deadline dl) { fit_primal(x, y, pen, dl); });
        row.primal_seconds = primal.seconds;
        row.primal_complete = primal.complete;
        row.primal_fits_done = primal.fits;
        row.speedup_vs_primal = row.primal_seconds / row.path_seconds;
        rows.push_back(row);
    }
    return rows;
}

void write_bench_csv(const std::filesystem::path& out, const std::vector<BenchRow>& rows) {
    const std::vector<std::string> header{"n",           "p",           "grid",           "svd_seconds",
                                          "path_seconds", "dual_seconds", "dual_complete", "primal_seconds",
                                          "primal_complete", "primal_fits_done", "speedup_vs_primal"};
    Matrix table(rows.size(), header.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const BenchRow& r = rows[i];
        const double vals[] = {static_cast<double>(r.n), static_cast<double>(r.p), static_cast<double>(r.grid),
                               r.svd_seconds, r.path_seconds, r.dual_seconds, r.dual_complete ? 1.0 : 0.0,
                               r.primal_seconds, r.primal_complete ? 1.0 : 0.0,
                               static_cast<double>(r.primal_fits_done), r.speedup_vs_primal};
        for (std::size_t c = 0; c < header.size(); ++c) table(i, c) = vals[c];
    }
    write_csv(out, header, table);
}

}  // namespace ridge
