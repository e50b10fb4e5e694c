#include "ridge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "ridge/dataio.hpp"
#include "ridge/error.hpp"
#include "ridge/estimator.hpp"
#include "ridge/moments.hpp"
#include "ridge/selection.hpp"
#include "ridge/simulate.hpp"

namespace ridge::cli {
namespace {

// Flag combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Format { csv, jsonl };

struct GridFlags {
    double min = 1e-2;
    double max = 1e2;
    std::size_t count = 50;
    std::vector<double> explicit_values;
};

struct CliConfig {
    std::string input;
    std::string response;
    std::optional<std::size_t> response_index;
    bool no_header = false;
    bool no_center = false;
    bool scale = false;
    Format format = Format::csv;

    double lambda = 0.0;
    GridFlags grid;
    GridFlags bench_grid{1e-2, 1e2, 100, {}};
    std::string out_dir;
    std::string out_file;

    std::string method = "loocv";
    std::size_t k = 5;
    std::uint64_t seed = 1;
    bool seed_given = false;

    std::vector<double> beta_true;
    double sigma2 = 0.0;
    bool center_design = false;

    std::string preset;
    std::size_t sweep = 20;
    std::size_t replicates = 0;

    std::string sizes = "100x100,100x1000";
    double budget_factor = 4.0;
};

// 6 significant digits for human-facing summaries.
std::string human(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

LambdaGrid grid_from(const GridFlags& g) {
    if (!g.explicit_values.empty()) {
        std::vector<double> v = g.explicit_values;
        std::sort(v.begin(), v.end(), std::greater<>());
        try {
            return LambdaGrid(std::move(v));
        } catch (const Error& e) {
            throw UsageError(std::string("--lambdas: ") + e.what());
        }
    }
    try {
        return LambdaGrid::log_spaced(g.min, g.max, g.count);
    } catch (const Error& e) {
        throw UsageError(std::string("grid flags: ") + e.what());
    }
}

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
    cmd->add_option("--lambda-min", g.min, "Smallest lambda of the log-spaced grid")->capture_default_str();
    cmd->add_option("--lambda-max", g.max, "Largest lambda of the log-spaced grid")->capture_default_str();
    cmd->add_option("--count", g.count, "Number of grid points")->capture_default_str();
    cmd->add_option("--lambdas", g.explicit_values, "Explicit comma-separated lambdas (overrides the log grid)")
        ->delimiter(',');
}

void add_data_flags(CLI::App* cmd, CliConfig& c, bool require_input = true) {
    auto* in = cmd->add_option("-i,--input", c.input, "CSV file with predictors and response");
    if (require_input) in->required();
    cmd->add_option("-r,--response", c.response, "Response column name (default: last column)");
    cmd->add_option("--response-index", c.response_index, "Zero-based response column index");
    cmd->add_flag("--no-header", c.no_header, "The CSV file has no header row");
    cmd->add_flag("--no-center", c.no_center, "Do not center (fit without an intercept)");
    cmd->add_flag("--scale", c.scale, "Scale predictors to unit sample standard deviation");
}

Dataset load(const CliConfig& c) {
    ColumnRef ref = std::size_t{0};
    if (c.response_index) {
        ref = *c.response_index;
    } else if (!c.response.empty()) {
        ref = c.response;
    } else {
        // Default: the last column.
        const CsvTable probe = read_csv_table(c.input, !c.no_header);
        ref = probe.values.cols() - 1;
    }
    return read_csv(c.input, !c.no_header, ref);
}

std::filesystem::path ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw Error("cannot create output directory '" + dir + "'");
    return dir;
}

// ---------------------------------------------------------------------------

int cmd_fit(const CliConfig& c, std::ostream& out) {
    const Dataset raw = load(c);
    const auto [data, scaler] = standardize(raw, !c.no_center, c.scale);
    const RidgeFit fit = fit_auto(data.x, data.y, Penalty(c.lambda));
    const OriginalScaleCoefficients coef = destandardize_coefficients(fit.beta, scaler);

    if (c.format == Format::jsonl) {
        out << nlohmann::json{{"term", "intercept"}, {"estimate", coef.intercept}}.dump() << '\n';
        for (std::size_t j = 0; j < raw.p(); ++j)
            out << nlohmann::json{{"term", raw.feature_names[j]}, {"estimate", coef.beta[j]}}.dump() << '\n';
        out << nlohmann::json{{"lambda", fit.lambda},
                              {"df", fit.df},
                              {"residual_ss", fit.residual_ss},
                              {"route", std::string(to_string(fit.route))}}
                   .dump()
            << '\n';
        return kExitOk;
    }
    out << "term,value\n";
    out << "intercept," << format_full(coef.intercept) << '\n';
    for (std::size_t j = 0; j < raw.p(); ++j) out << raw.feature_names[j] << ',' << format_full(coef.beta[j]) << '\n';
    out << "lambda," << format_full(fit.lambda) << '\n';
    out << "df," << format_full(fit.df) << '\n';
    out << "residual_ss," << format_full(fit.residual_ss) << '\n';
    return kExitOk;
}

int cmd_path(const CliConfig& c, std::ostream& out) {
    const LambdaGrid grid = grid_from(c.grid);
    const Dataset raw = load(c);
    const auto [data, scaler] = standardize(raw, !c.no_center, c.scale);
    const ThinSvd svd = thin_svd(data.x);
    RidgePath path = solution_path(svd, data.y, grid.values(), true);

    // Report coefficients in original units.
    const std::size_t p = raw.p();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        Vector b(p);
        for (std::size_t j = 0; j < p; ++j) b[j] = path.betas(j, g);
        const Vector orig = destandardize_coefficients(b, scaler).beta;
        for (std::size_t j = 0; j < p; ++j) path.betas(j, g) = orig[j];
    }

    const auto dir = ensure_dir(c.out_dir);
    std::vector<std::string> header{"lambda"};
    header.insert(header.end(), raw.feature_names.begin(), raw.feature_names.end());
    header.emplace_back("df");
    header.emplace_back("loocv");
    Matrix table(grid.size(), p + 3);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        table(g, 0) = path.lambdas[g];
        for (std::size_t j = 0; j < p; ++j) table(g, 1 + j) = path.betas(j, g);
        table(g, p + 1) = path.dfs[g];
        table(g, p + 2) = (*path.loocv)[g];
    }
    write_csv(dir / "path.csv", header, table);
    std::ofstream svg(dir / "path.svg");
    if (!svg) throw Error("cannot write '" + (dir / "path.svg").string() + "'");
    svg << render_path_svg(path, raw.feature_names);

    const double best = select_lambda(path.lambdas, *path.loocv);
    out << "wrote " << (dir / "path.csv").string() << " and " << (dir / "path.svg").string() << " ("
        << grid.size() << " lambdas)\n";
    out << "lambda minimizing LOOCV: " << human(best) << '\n';
    return kExitOk;
}

int cmd_cv(const CliConfig& c, std::ostream& out) {
    const LambdaGrid grid = grid_from(c.grid);
    const Dataset raw = load(c);
    const auto [data, scaler] = standardize(raw, !c.no_center, c.scale);
    (void)scaler;
    CvReport rep;
    if (c.method == "kfold") {
        if (c.k < 2 || c.k > data.n()) {
            throw UsageError("--k must satisfy 2 <= k <= n (n = " + std::to_string(data.n()) + ")");
        }
        rep = kfold_cv(data.x, data.y, grid, c.k, c.seed);
    } else if (c.method == "loocv") {
        rep = loocv_shortcut(thin_svd(data.x), data.y, grid);
    } else {
        rep = loocv_bruteforce(data.x, data.y, grid);
    }
    if (!c.out_file.empty()) {
        Matrix table(rep.lambdas.size(), 2);
        for (std::size_t g = 0; g < rep.lambdas.size(); ++g) {
            table(g, 0) = rep.lambdas[g];
            table(g, 1) = rep.errors[g];
        }
        write_csv(c.out_file, {"lambda", "cv_error"}, table);
    }
    if (c.format == Format::jsonl) {
        nlohmann::json j{{"method", c.method}, {"selected_lambda", rep.selected}};
        if (rep.method == CvMethod::kfold) {
            j["k"] = rep.k;
            j["seed"] = rep.seed;
            j["fold_sizes"] = rep.fold_sizes;
        }
        out << j.dump() << '\n';
    } else {
        out << "selected_lambda," << format_full(rep.selected) << '\n';
    }
    return kExitOk;
}

int cmd_moments(const CliConfig& c, std::ostream& out) {
    Dataset raw = c.response.empty() && !c.response_index ? read_design_csv(c.input, !c.no_header) : load(c);
    const Matrix x = c.center_design ? standardize(raw, true, false).first.x : raw.x;
    if (c.beta_true.size() != x.cols()) {
        throw UsageError("--beta-true has " + std::to_string(c.beta_true.size()) + " values but the design has " +
                         std::to_string(x.cols()) + " columns");
    }
    std::vector<double> lambdas;
    if (!c.grid.explicit_values.empty()) {
        lambdas = c.grid.explicit_values;
        std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
        for (double l : lambdas)
            if (!(l >= 0.0)) throw UsageError("--lambdas must be non-negative for moments");
    } else {
        lambdas = grid_from(c.grid).values();
    }
    const ThinSvd svd = thin_svd(x);
    const GroundTruth gt{Vector(c.beta_true), c.sigma2};

    Matrix table(lambdas.size(), 5);
    for (std::size_t g = 0; g < lambdas.size(); ++g) {
        const MomentsReport rep = mse_ridge(svd, gt, Penalty(lambdas[g]));
        table(g, 0) = rep.lambda;
        table(g, 1) = rep.bias_sq;
        table(g, 2) = rep.var_trace;
        table(g, 3) = rep.mse;
        table(g, 4) = rep.mse_ols.value_or(std::numeric_limits<double>::quiet_NaN());
    }
    const std::vector<std::string> header{"lambda", "bias_sq", "var_trace", "mse", "mse_ols"};
    if (c.out_file.empty()) {
        write_csv(out, header, table);
        return kExitOk;
    }
    write_csv(c.out_file, header, table);
    out << "wrote " << c.out_file << " (" << lambdas.size() << " lambdas)\n";
    std::vector<double> positive;
    for (double l : lambdas)
        if (l > 0.0) positive.push_back(l);
    if (svd.rank() == svd.p() && !positive.empty()) {
        const MseImprovement imp = mse_improvement_exists(svd, gt, positive);
        out << "MSE(OLS) = " << human(imp.mse_ols) << ", best lambda = " << human(imp.lambda_star)
            << " with MSE = " << human(imp.mse_star) << (imp.improves ? " (improves on OLS)" : "") << '\n';
        out << "slope of MSE at 0+: " << human(imp.slope_fd) << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const CliConfig& c, std::ostream& out) {
    SimConfig cfg = preset(c.preset);
    if (c.seed_given) cfg.seed = c.seed;
    if (c.replicates > 0) cfg.replicates = c.replicates;
    const auto dir = ensure_dir(c.out_dir);

    if (c.preset == "collinear-sign-flip") {
        const SeedSweep sweep = sign_flip_sweep(cfg, c.sweep);
        if (sweep.found) cfg.seed = sweep.seed;
        const PathExperiment exp = path_experiment(cfg, dir);
        out << "seed " << cfg.seed << " (" << sweep.seeds_tried << " seeds tried)\n";
        out << "sign change: " << (exp.sign_change ? "yes" : "no")
            << ", shrinks to zero: " << (exp.shrinks_to_zero ? "yes" : "no") << '\n';
        out << "wrote " << exp.csv.string() << " and " << exp.svg.string() << '\n';
        return kExitOk;
    }

    const std::vector<McMomentsResult> res = mc_moments(cfg);
    const std::size_t p = cfg.p;
    Matrix table(res.size() * p, 8);
    for (std::size_t g = 0; g < res.size(); ++g) {
        for (std::size_t j = 0; j < p; ++j) {
            const std::size_t row = g * p + j;
            const McMomentsResult& r = res[g];
            const double vals[] = {r.lambda,        static_cast<double>(j + 1), r.empirical_mean[j], r.analytic_mean[j],
                                   r.mean_se[j],    r.empirical_var_diag[j],    r.analytic_var_diag[j], r.var_se[j]};
            for (std::size_t k = 0; k < 8; ++k) table(row, k) = vals[k];
        }
    }
    write_csv(dir / "moments.csv",
              {"lambda", "coefficient", "empirical_mean", "analytic_mean", "mean_se", "empirical_var", "analytic_var",
               "var_se"},
              table);
    for (const McMomentsResult& r : res) {
        out << "lambda " << human(r.lambda) << ": max |empirical - analytic| / SE = " << human(r.max_z()) << '\n';
    }
    out << "wrote " << (dir / "moments.csv").string() << '\n';
    return kExitOk;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_sizes(const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto x = item.find('x');
        try {
            if (x == std::string::npos) throw std::invalid_argument(item);
            std::size_t used = 0;
            const std::string ns = item.substr(0, x);
            const std::string ps = item.substr(x + 1);
            const std::size_t n = std::stoul(ns, &used);
            if (used != ns.size()) throw std::invalid_argument(item);
            const std::size_t p = std::stoul(ps, &used);
            if (used != ps.size() || n == 0 || p == 0) throw std::invalid_argument(item);
            sizes.emplace_back(n, p);
        } catch (const std::exception&) {
            throw UsageError("--sizes entries must look like 100x10000, got '" + item + "'");
        }
    }
    if (sizes.empty()) throw UsageError("--sizes is empty");
    return sizes;
}

int cmd_bench(const CliConfig& c, std::ostream& out) {
    const auto sizes = parse_sizes(c.sizes);
    const LambdaGrid grid = grid_from(c.bench_grid);
    BenchOptions opts;
    opts.budget_factor = c.budget_factor;
    const auto rows = route_benchmark(sizes, grid, opts);
    if (!c.out_file.empty()) write_bench_csv(c.out_file, rows);
    for (const BenchRow& r : rows) {
        out << r.n << "x" << r.p << ": path " << human(r.path_seconds) << " s (svd " << human(r.svd_seconds)
            << " s), dual " << (r.dual_complete ? "" : ">= ") << human(r.dual_seconds) << " s, primal "
            << (r.primal_complete ? "" : ">= ") << human(r.primal_seconds) << " s, speedup "
            << (r.primal_complete ? "" : ">= ") << human(r.speedup_vs_primal) << "x\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliConfig c;
    std::string format = "csv";
    CLI::App app{"Ridge regression toolkit: fits, paths, cross-validation, moments, simulation"};
    app.name("ridge");
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    auto* fit = app.add_subcommand("fit", "Fit at one lambda and print original-scale coefficients");
    add_data_flags(fit, c);
    fit->add_option("--lambda", c.lambda, "Penalty (>= 0)")->required();
    fit->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));

    auto* path = app.add_subcommand("path", "Regularization path over a lambda grid (CSV + SVG)");
    add_data_flags(path, c);
    add_grid_flags(path, c.grid);
    path->add_option("-o,--out-dir", c.out_dir, "Output directory")->required();

    auto* cv = app.add_subcommand("cv", "Cross-validated penalty selection");
    add_data_flags(cv, c);
    add_grid_flags(cv, c.grid);
    cv->add_option("--method", c.method, "kfold, loocv (hat-matrix shortcut) or loocv-bruteforce")
        ->check(CLI::IsMember({"kfold", "loocv", "loocv-bruteforce"}))
        ->capture_default_str();
    cv->add_option("-k,--k", c.k, "Number of folds")->capture_default_str();
    cv->add_option("--seed", c.seed, "Fold assignment seed")->capture_default_str();
    cv->add_option("-o,--out", c.out_file, "Write the CV curve (lambda, cv_error) to this CSV");
    cv->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));

    auto* moments = app.add_subcommand("moments", "Analytic bias, variance and MSE for a known truth");
    add_data_flags(moments, c);
    add_grid_flags(moments, c.grid);
    moments->add_option("--beta-true", c.beta_true, "True coefficients, comma-separated")->required()->delimiter(',');
    moments->add_option("--sigma2", c.sigma2, "Noise variance (> 0)")->required()->check(CLI::PositiveNumber);
    moments->add_flag("--center-design", c.center_design, "Center the design columns first");
    moments->add_option("-o,--out", c.out_file, "Write the table here instead of standard output");

    auto* simulate = app.add_subcommand("simulate", "Run a named simulation preset");
    simulate->add_option("--preset", c.preset, "Preset name")->required()->check(CLI::IsMember(preset_names()));
    auto* seed_opt = simulate->add_option("--seed", c.seed, "Override the preset seed");
    simulate->add_option("--sweep", c.sweep, "Seeds searched for a sign change (collinear-sign-flip)")
        ->capture_default_str();
    simulate->add_option("--replicates", c.replicates, "Override the replicate count");
    simulate->add_option("-o,--out-dir", c.out_dir, "Output directory")->required();

    auto* bench = app.add_subcommand("bench", "Time the SVD path against independent primal and dual fits");
    bench->add_option("--sizes", c.sizes, "Comma-separated NxP shapes")->capture_default_str();
    add_grid_flags(bench, c.bench_grid);
    bench->add_option("--budget-factor", c.budget_factor,
                      "Stop independent fits after this multiple of the path time")
        ->capture_default_str();
    bench->add_option("-o,--out", c.out_file, "Write the timing table to this CSV");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }
    c.format = format == "jsonl" ? Format::jsonl : Format::csv;
    c.seed_given = seed_opt->count() > 0;

    try {
        if (fit->parsed()) return cmd_fit(c, out);
        if (path->parsed()) return cmd_path(c, out);
        if (cv->parsed()) return cmd_cv(c, out);
        if (moments->parsed()) return cmd_moments(c, out);
        if (simulate->parsed()) return cmd_simulate(c, out);
        if (bench->parsed()) return cmd_bench(c, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

}  // namespace ridge::cli
