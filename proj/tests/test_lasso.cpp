#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "causalsel/errors.hpp"
#include "causalsel/lasso.hpp"

using namespace causalsel;

namespace {

// Sylvester-construction Hadamard matrix: the non-constant columns have
// exact zero mean, unit ML variance, and are mutually orthogonal.
Eigen::MatrixXd hadamard(int size) {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 1.0;
    while (h.rows() < size) {
        const int m = static_cast<int>(h.rows());
        Eigen::MatrixXd next(2 * m, 2 * m);
        next.topLeftCorner(m, m) = h;
        next.topRightCorner(m, m) = h;
        next.bottomLeftCorner(m, m) = h;
        next.bottomRightCorner(m, m) = -h;
        h = next;
    }
    return h;
}

Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd m(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = gauss(rng);
    return m;
}

}  // namespace

TEST_CASE("lasso_fit: exact soft-threshold solution on a single orthonormal predictor") {
    const Eigen::MatrixXd h = hadamard(8);
    const Eigen::VectorXd x = h.col(1);
    const Eigen::VectorXd e = h.col(2);
    const Eigen::VectorXd y = 0.5 * x + std::sqrt(0.75) * e;  // ML variance exactly 1

    LassoConfig cfg;
    cfg.l1_penalty = 0.01;
    cfg.tol = 1e-12;
    const LinearModel model = lasso_fit(x, y, cfg);
    CHECK(model.converged);
    CHECK(model.weights(0) == doctest::Approx(0.49).epsilon(1e-12));
    CHECK(model.intercept == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("lasso_fit: penalty above the KKT threshold zeroes every weight") {
    const Eigen::MatrixXd h = hadamard(8);
    Eigen::MatrixXd X(8, 3);
    X << h.col(1), h.col(2), h.col(3);
    const Eigen::VectorXd y = 0.4 * h.col(1) - 0.2 * h.col(2) + 0.3 * h.col(4);

    const double sdy = std::sqrt(y.squaredNorm() / 8.0);
    double max_corr = 0.0;
    for (int j = 0; j < 3; ++j)
        max_corr = std::max(max_corr, std::abs(X.col(j).dot(y) / 8.0) / sdy);

    LassoConfig cfg;
    cfg.l1_penalty = max_corr * sdy + 1e-6;
    const LinearModel model = lasso_fit(X, y, cfg);
    CHECK(model.support().empty());
    for (int j = 0; j < 3; ++j) CHECK(model.weights(j) == 0.0);
}

TEST_CASE("lasso_fit: support shrinks as the penalty grows (orthonormal design)") {
    const Eigen::MatrixXd h = hadamard(16);
    Eigen::MatrixXd X(16, 4);
    X << h.col(1), h.col(2), h.col(3), h.col(4);
    const Eigen::VectorXd y =
        0.8 * h.col(1) + 0.4 * h.col(2) + 0.1 * h.col(3) + 0.02 * h.col(4);

    std::vector<int> prev_support;
    bool first = true;
    for (double alpha : {0.01, 0.05, 0.2, 0.5, 1.0}) {
        LassoConfig cfg;
        cfg.l1_penalty = alpha;
        cfg.tol = 1e-12;
        const std::vector<int> sup = lasso_fit(X, y, cfg).support();
        if (!first)
            CHECK(std::includes(prev_support.begin(), prev_support.end(), sup.begin(),
                                sup.end()));
        prev_support = sup;
        first = false;
    }
}

TEST_CASE("lasso_fit: alpha=0 agrees with least squares") {
    const int n = 200, p = 5;
    const Eigen::MatrixXd X = random_matrix(n, p, 41);
    const Eigen::VectorXd beta = (Eigen::VectorXd(p) << 1.0, -0.5, 0.3, 0.0, 2.0).finished();
    const Eigen::VectorXd y = X * beta + 0.1 * random_matrix(n, 1, 42);

    LassoConfig cfg;
    cfg.l1_penalty = 0.0;
    cfg.tol = 1e-12;
    cfg.max_iters = 100000;
    const LinearModel lasso = lasso_fit(X, y, cfg);
    const LinearModel ols = ols_fit(X, y);
    CHECK((predict(lasso, X) - predict(ols, X)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("lasso_fit: KKT conditions hold at convergence") {
    const Eigen::MatrixXd X = random_matrix(300, 6, 13);
    const Eigen::VectorXd y =
        X.col(0) - 0.7 * X.col(2) + 0.05 * random_matrix(300, 1, 14);
    LassoConfig cfg;
    cfg.l1_penalty = 0.02;
    cfg.tol = 1e-12;
    cfg.max_iters = 100000;
    const LinearModel model = lasso_fit(X, y, cfg);
    CHECK(model.converged);
    CHECK(lasso_kkt_gap(X, y, cfg, model) < 1e-8);
}

TEST_CASE("lasso_fit: objective non-increasing across sweeps") {
    const Eigen::MatrixXd X = random_matrix(100, 8, 17);
    const Eigen::VectorXd y = X.col(1) + X.col(3) + 0.2 * random_matrix(100, 1, 18);
    LassoConfig cfg;
    cfg.l1_penalty = 0.05;
    cfg.tol = 1e-15;  // force exactly max_iters sweeps
    double prev = std::numeric_limits<double>::infinity();
    for (int sweeps = 1; sweeps <= 8; ++sweeps) {
        cfg.max_iters = sweeps;
        const LinearModel model = lasso_fit(X, y, cfg);
        const double obj = lasso_objective(X, y, cfg, model);
        CHECK(obj <= prev + 1e-12);
        prev = obj;
    }
}

TEST_CASE("lasso_fit: constant feature and shape errors rejected") {
    Eigen::MatrixXd X = random_matrix(20, 2, 23);
    X.col(1).setConstant(3.0);
    const Eigen::VectorXd y = random_matrix(20, 1, 24);
    CHECK_THROWS_AS(lasso_fit(X, y, LassoConfig{}), ConstantColumn);

    const Eigen::VectorXd short_y = y.head(10);
    CHECK_THROWS_AS(lasso_fit(random_matrix(20, 2, 25), short_y, LassoConfig{}),
                    DimensionMismatch);
}

TEST_CASE("ols_fit: zero features gives the mean model") {
    const Eigen::MatrixXd X(5, 0);
    Eigen::VectorXd y(5);
    y << 1, 2, 3, 4, 5;
    const LinearModel model = ols_fit(X, y);
    CHECK(model.intercept == doctest::Approx(3.0).epsilon(1e-15));
    const Eigen::VectorXd pred = predict(model, X);
    CHECK(pred.size() == 5);
    CHECK((pred.array() - 3.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("ols_fit: exact linear data interpolated") {
    const Eigen::MatrixXd X = random_matrix(50, 3, 29);
    const Eigen::VectorXd y = 2.0 * X.col(0) - X.col(1) + 0.5 * X.col(2) +
                              Eigen::VectorXd::Constant(50, 4.0);
    const LinearModel model = ols_fit(X, y);
    CHECK_FALSE(model.ridge_fallback);
    CHECK((predict(model, X) - y).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ols_fit: duplicated column takes the ridge path, predictions still optimal") {
    Eigen::MatrixXd X(40, 3);
    const Eigen::MatrixXd base = random_matrix(40, 2, 37);
    X.col(0) = base.col(0);
    X.col(1) = base.col(0);  // exact duplicate
    X.col(2) = base.col(1);
    const Eigen::VectorXd y = base.col(0) + 0.3 * base.col(1) +
                              0.01 * random_matrix(40, 1, 38);
    const LinearModel model = ols_fit(X, y);
    CHECK(model.ridge_fallback);

    // minimum-norm reference via SVD pseudo-inverse on centered data
    Eigen::MatrixXd Xc = X;
    for (int j = 0; j < 3; ++j) Xc.col(j).array() -= Xc.col(j).mean();
    const Eigen::VectorXd yc = y.array() - y.mean();
    const Eigen::VectorXd w_ref =
        Xc.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(yc);
    const Eigen::VectorXd ref_pred = (Xc * w_ref).array() + y.mean();
    CHECK((predict(model, X) - ref_pred).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("predict: zero-weight model, one row, dimension check") {
    LinearModel model;
    model.weights = Eigen::VectorXd::Zero(2);
    model.feature_means = Eigen::VectorXd::Zero(2);
    model.feature_scales = Eigen::VectorXd::Ones(2);
    model.intercept = 7.5;
    const Eigen::MatrixXd X = random_matrix(6, 2, 43);
    const Eigen::VectorXd pred = predict(model, X);
    CHECK((pred.array() - 7.5).abs().maxCoeff() == 0.0);

    const Eigen::MatrixXd one_row = random_matrix(1, 2, 44);
    CHECK(predict(model, one_row).size() == 1);

    const Eigen::MatrixXd wrong = random_matrix(6, 3, 45);
    CHECK_THROWS_AS(predict(model, wrong), DimensionMismatch);
}

TEST_CASE("lasso config validation") {
    const Eigen::MatrixXd X = random_matrix(10, 1, 51);
    const Eigen::VectorXd y = random_matrix(10, 1, 52);
    LassoConfig bad;
    bad.l1_penalty = -0.1;
    CHECK_THROWS_AS(lasso_fit(X, y, bad), InvalidArgument);
    bad = LassoConfig{};
    bad.tol = 0.0;
    CHECK_THROWS_AS(lasso_fit(X, y, bad), InvalidArgument);
    bad = LassoConfig{};
    bad.max_iters = 0;
    CHECK_THROWS_AS(lasso_fit(X, y, bad), InvalidArgument);
}
