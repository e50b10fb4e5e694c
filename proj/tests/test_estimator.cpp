#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ridge/error.hpp"
#include "ridge/estimator.hpp"

using namespace ridge;

TEST_SUITE("estimator") {

namespace {

Matrix orthonormal_columns(std::size_t n, std::size_t p, std::uint64_t seed) {
    // Columns of U from the SVD of a random matrix; U^T U = I.
    const ThinSvd s = thin_svd(oracle::random_matrix(n, p, seed));
    REQUIRE(s.rank() == p);
    return s.u;
}

}  // namespace

TEST_CASE("Penalty rejects negative and non-finite lambda") {
    CHECK_THROWS_AS(Penalty(-1e-300), Error);
    CHECK_THROWS_AS(Penalty(std::nan("")), Error);
    CHECK_THROWS_AS(Penalty{INFINITY}, Error);
    CHECK(Penalty(0.0).lambda() == 0.0);
}

TEST_CASE("primal: identity design with lambda 1 halves y") {
    const RidgeFit f = fit_primal(Matrix::identity(2), Vector{2, 4}, Penalty(1.0));
    CHECK(f.beta[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.beta[1] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(f.df == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.route == Route::primal);
}

TEST_CASE("primal: single column of ones") {
    // (2 + 2)^-1 * (1 + 3) = 1
    const RidgeFit f = fit_primal(Matrix::from_rows({{1}, {1}}), Vector{1, 3}, Penalty(2.0));
    CHECK(f.beta[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.fitted[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.residual_ss == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("primal at lambda 0 equals least squares") {
    const Matrix x = oracle::random_matrix(30, 4, 3);
    const Vector y = oracle::random_vector(30, 4);
    const RidgeFit f = fit_primal(x, y, Penalty(0.0));
    CHECK(oracle::rel_l2(f.beta, least_squares_qr(x, y)) <= 1e-12);
    CHECK(f.df == 4.0);
}

TEST_CASE("primal at lambda 0 with p > n reports singularity") {
    const Matrix x = oracle::random_matrix(3, 6, 5);
    try {
        fit_primal(x, oracle::random_vector(3, 6), Penalty(0.0));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("singular") != std::string::npos);
        CHECK(std::string(e.what()).find("lambda > 0") != std::string::npos);
    }
}

TEST_CASE("dual: one row") {
    // beta = x^T (x x^T + 2)^-1 y = (1,1) * 4 / 4
    const RidgeFit f = fit_dual(Matrix::from_rows({{1, 1}}), Vector{4}, Penalty(2.0));
    CHECK(f.beta[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.beta[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.route == Route::dual);
}

TEST_CASE("dual rejects lambda 0") {
    CHECK_THROWS_AS(fit_dual(oracle::random_matrix(3, 5, 1), oracle::random_vector(3, 1), Penalty(0.0)), Error);
}

TEST_CASE("svd route: orthonormal design closed form") {
    const Matrix q = orthonormal_columns(12, 4, 17);
    const Vector y = oracle::random_vector(12, 18);
    const Vector qty = oracle::naive_matvec(oracle::naive_transpose(q), y);
    const ThinSvd s = thin_svd(q);
    for (double lam : {0.1, 1.0, 10.0}) {
        const RidgeFit f = fit_svd(s, y, Penalty(lam));
        for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(f.beta[j] - qty[j] / (1.0 + lam)) <= 1e-12);
    }
}

TEST_CASE("svd route: y orthogonal to the column space gives zero") {
    const Matrix x = Matrix::from_rows({{1, 0}, {0, 1}, {0, 0}});
    const RidgeFit f = fit_svd(thin_svd(x), Vector{0, 0, 5}, Penalty(0.5));
    CHECK(f.beta[0] == 0.0);
    CHECK(f.beta[1] == 0.0);
}

TEST_CASE("svd route at lambda 0 needs full column rank") {
    const Matrix x = oracle::random_matrix(4, 8, 2);
    CHECK_THROWS_AS(fit_svd(thin_svd(x), oracle::random_vector(4, 3), Penalty(0.0)), Error);
}

TEST_CASE("routes agree with each other and the explicit inverse (property)") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t n = oracle::uniform_int(2, 40, seed * 3 + 1);
        const std::size_t p = oracle::uniform_int(1, 40, seed * 3 + 2);
        const double lam = oracle::log_uniform(1e-3, 1e3, seed * 3 + 3);
        const Matrix x = oracle::random_matrix(n, p, seed);
        const Vector y = oracle::random_vector(n, seed + 1000);
        const Vector ref = oracle::ridge_by_inverse(x, y, lam);
        const RidgeFit a = fit_primal(x, y, Penalty(lam));
        const RidgeFit b = fit_dual(x, y, Penalty(lam));
        const RidgeFit c = fit_svd(thin_svd(x), y, Penalty(lam));
        INFO("n=", n, " p=", p, " lambda=", lam);
        CHECK(oracle::rel_l2(a.beta, ref) <= 1e-9);
        CHECK(oracle::rel_l2(b.beta, ref) <= 1e-9);
        CHECK(oracle::rel_l2(c.beta, ref) <= 1e-9);
        CHECK(oracle::rel_l2(augmented_ols_oracle(x, y, Penalty(lam)), ref) <= 1e-9);
        CHECK(std::abs(a.df - b.df) <= 1e-10 * std::max(1.0, a.df));
        CHECK(std::abs(a.df - c.df) <= 1e-10 * std::max(1.0, a.df));
        CHECK(oracle::max_abs_diff(c.fitted, oracle::naive_matvec(x, c.beta)) <= 1e-10 * std::max(1.0, norm2(y.span())));
    }
}

TEST_CASE("fit_auto picks primal for tall and dual for wide designs") {
    CHECK(fit_auto(oracle::random_matrix(30, 5, 1), oracle::random_vector(30, 2), Penalty(1.0)).route == Route::primal);
    CHECK(fit_auto(oracle::random_matrix(5, 200, 1), oracle::random_vector(5, 2), Penalty(1.0)).route == Route::dual);
    CHECK(fit_auto(oracle::random_matrix(6, 6, 1), oracle::random_vector(6, 2), Penalty(0.0)).route == Route::primal);
}

TEST_CASE("solution path on the identity design") {
    const double lambdas[] = {10.0, 1.0, 0.1};
    const RidgePath path = solution_path(thin_svd(Matrix::identity(2)), Vector{2, 4}, lambdas);
    REQUIRE(path.betas.rows() == 2);
    REQUIRE(path.betas.cols() == 3);
    const double scale[] = {11.0, 2.0, 1.1};
    for (std::size_t g = 0; g < 3; ++g) {
        CHECK(path.betas(0, g) == doctest::Approx(2.0 / scale[g]).epsilon(1e-15));
        CHECK(path.betas(1, g) == doctest::Approx(4.0 / scale[g]).epsilon(1e-15));
    }
    CHECK(!path.loocv.has_value());
}

TEST_CASE("solution path matches independent fits and grows in norm") {
    const Matrix x = oracle::random_matrix(20, 100, 9);
    const Vector y = oracle::random_vector(20, 10);
    std::vector<double> grid;
    for (int g = 0; g < 50; ++g) grid.push_back(std::pow(10.0, 3.0 - 6.0 * g / 49.0));
    const RidgePath path = solution_path(thin_svd(x), y, grid, true);
    REQUIRE(path.loocv.has_value());
    double prev_norm = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        Vector col(100);
        for (std::size_t j = 0; j < 100; ++j) col[j] = path.betas(j, g);
        CHECK(oracle::rel_l2(col, fit_primal(x, y, Penalty(grid[g])).beta) <= 1e-9);
        const double nrm = norm2(col.span());
        CHECK(nrm >= prev_norm);
        prev_norm = nrm;
        if (g > 0) CHECK(path.dfs[g] > path.dfs[g - 1]);
    }
}

TEST_CASE("check_grid rejects unsorted, repeated and non-positive grids") {
    const std::vector<double> up{1.0, 2.0};
    const std::vector<double> rep{2.0, 2.0};
    const std::vector<double> zero{1.0, 0.0};
    CHECK_THROWS_AS(check_grid(up), Error);
    CHECK_THROWS_AS(check_grid(rep), Error);
    CHECK_THROWS_AS(check_grid(zero), Error);
    CHECK_THROWS_AS(check_grid(std::vector<double>{}), Error);
}

TEST_CASE("hat diagonal") {
    const Vector h0 = hat_diagonal(thin_svd(Matrix::identity(3)), Penalty(0.0));
    for (std::size_t i = 0; i < 3; ++i) CHECK(h0[i] == doctest::Approx(1.0).epsilon(1e-15));

    const Matrix x = oracle::random_matrix(10, 3, 21);
    const Matrix h = oracle::hat_by_inverse(x, 0.3);
    const Vector hd = hat_diagonal(thin_svd(x), Penalty(0.3));
    double trace = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(std::abs(hd[i] - h(i, i)) <= 1e-12);
        CHECK(hd[i] >= 0.0);
        CHECK(hd[i] < 1.0);
        trace += hd[i];
    }
    CHECK(trace == doctest::Approx(degrees_of_freedom(thin_svd(x).d.span(), Penalty(0.3))).epsilon(1e-12));
}

TEST_CASE("degrees of freedom examples") {
    const std::vector<double> d{1.0, 1.0, 1.0};
    CHECK(degrees_of_freedom(d, Penalty(1.0)) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(degrees_of_freedom(d, Penalty(0.0)) == 3.0);
    const std::vector<double> e{std::sqrt(3.0)};
    CHECK(degrees_of_freedom(e, Penalty(3.0)) == doctest::Approx(0.5).epsilon(1e-15));
    // df(0) = rank for a rank-deficient design.
    const Matrix x = oracle::random_matrix(4, 9, 3);
    CHECK(degrees_of_freedom(thin_svd(x).d.span(), Penalty(0.0)) == 4.0);
}

TEST_CASE("df is strictly decreasing and bounded by the rank (property)") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ThinSvd s = thin_svd(oracle::random_matrix(15, 8, seed));
        double prev = static_cast<double>(s.rank());
        for (double lam = 1e-3; lam < 1e4; lam *= 3.0) {
            const double df = degrees_of_freedom(s.d.span(), Penalty(lam));
            CHECK(df < prev);
            CHECK(df > 0.0);
            prev = df;
        }
    }
}

TEST_CASE("constraint radius and its inverse") {
    // X = I, y = (2,4): ||y / (1 + lambda)||^2 = 20 / (1 + lambda)^2; lambda 1 gives 5.
    const ThinSvd s = thin_svd(Matrix::identity(2));
    const Vector y{2, 4};
    CHECK(constraint_radius(s, y, Penalty(1.0)) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(constraint_radius(s, y, Penalty(1e12)) <= 1e-22);
    const Penalty found = lambda_for_constraint(s, y, 5.0, {1e-6, 1e6}, 1e-12);
    CHECK(found.lambda() == doctest::Approx(1.0).epsilon(1e-9));

    const double c_hi = constraint_radius(s, y, Penalty(1e6));
    CHECK_THROWS_AS(lambda_for_constraint(s, y, c_hi, {1e-6, 1e6}, 1e-12), Error);
    CHECK_THROWS_AS(lambda_for_constraint(s, Vector{0, 0}, 1.0, {1e-6, 1e6}, 1e-12), Error);
}

TEST_CASE("penalized to constrained round trip (property)") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const Matrix x = oracle::random_matrix(12, 7, seed);
        const Vector y = oracle::random_vector(12, seed + 50);
        const ThinSvd s = thin_svd(x);
        const double lam = oracle::log_uniform(1e-2, 1e2, seed + 70);
        const double c = constraint_radius(s, y, Penalty(lam));
        const double back = lambda_for_constraint(s, y, c, {1e-6, 1e6}, 1e-12).lambda();
        CHECK(std::abs(back - lam) <= 1e-6 * lam);
    }
}

TEST_CASE("large lambda limit: beta ~ X^T y / lambda") {
    const Matrix x = oracle::random_matrix(10, 4, 5);
    const Vector y = oracle::random_vector(10, 6);
    const double lam = 1e8;
    const Vector xty = oracle::naive_matvec(oracle::naive_transpose(x), y);
    const RidgeFit f = fit_primal(x, y, Penalty(lam));
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(f.beta[j] * lam - xty[j]) <= 1e-6 * std::abs(xty[j]) + 1e-12);
}

TEST_CASE("predict multiplies new rows by beta") {
    const RidgeFit f = fit_primal(Matrix::identity(2), Vector{2, 4}, Penalty(1.0));
    const Vector out = predict(f, Matrix::from_rows({{1, 1}, {2, 0}}));
    CHECK(out[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(predict(f, Matrix::from_rows({{1, 1, 1}})), Error);
}

TEST_CASE("non-finite inputs and mismatched shapes are rejected") {
    Matrix x = Matrix::identity(2);
    x(0, 1) = std::nan("");
    CHECK_THROWS_AS(fit_primal(x, Vector{1, 2}, Penalty(1.0)), Error);
    CHECK_THROWS_AS(fit_primal(Matrix::identity(2), Vector{1, 2, 3}, Penalty(1.0)), Error);
    CHECK_THROWS_AS(fit_dual(Matrix::identity(2), Vector{1, INFINITY}, Penalty(1.0)), Error);
}

}
