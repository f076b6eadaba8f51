#include "causalsel/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "causalsel/errors.hpp"

namespace causalsel {

namespace {

constexpr double kScaleFloor = 1e-12;

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

void check_config(const LassoConfig& cfg) {
    if (cfg.l1_penalty < 0.0) throw InvalidArgument("l1_penalty must be >= 0");
    if (cfg.tol <= 0.0) throw InvalidArgument("tol must be > 0");
    if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
}

// Standardize columns with ML moments; throws ConstantColumn by index.
void standardize_ml(Eigen::MatrixXd& X, Eigen::VectorXd& means, Eigen::VectorXd& scales) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    means.resize(p);
    scales.resize(p);
    for (int j = 0; j < p; ++j) {
        means(j) = X.col(j).mean();
        X.col(j).array() -= means(j);
        const double var = X.col(j).squaredNorm() / n;
        if (var <= kScaleFloor) throw ConstantColumn("feature " + std::to_string(j));
        scales(j) = std::sqrt(var);
        X.col(j) /= scales(j);
    }
}

}  // namespace

std::vector<int> LinearModel::support() const {
    std::vector<int> out;
    for (int j = 0; j < weights.size(); ++j)
        if (weights(j) != 0.0) out.push_back(j);
    return out;
}

LinearModel lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const LassoConfig& cfg) {
    check_config(cfg);
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (y.size() != n) throw DimensionMismatch("lasso_fit: X and y row counts differ");
    if (n < 2) throw InsufficientSamples("lasso_fit: need at least two rows");

    LinearModel model;
    Eigen::MatrixXd Z = X;
    standardize_ml(Z, model.feature_means, model.feature_scales);
    const double y_mean = y.mean();
    const Eigen::VectorXd yc = y.array() - y_mean;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd r = yc;  // residual yc - Z w
    model.converged = false;
    for (int it = 0; it < cfg.max_iters; ++it) {
        double max_change = 0.0;
        for (int j = 0; j < p; ++j) {
            const double old = w(j);
            // z_j'z_j/n == 1 after standardization
            const double rho = Z.col(j).dot(r) / n + old;
            const double next = soft_threshold(rho, cfg.l1_penalty);
            if (next != old) {
                r -= Z.col(j) * (next - old);
                w(j) = next;
                max_change = std::max(max_change, std::abs(next - old));
            }
        }
        if (max_change < cfg.tol) {
            model.converged = true;
            break;
        }
    }

    model.weights = std::move(w);
    model.intercept = y_mean;
    return model;
}

LinearModel ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (y.size() != n) throw DimensionMismatch("ols_fit: X and y row counts differ");
    if (n < 1) throw InsufficientSamples("ols_fit: empty input");

    LinearModel model;
    model.feature_means = Eigen::VectorXd::Zero(p);
    model.feature_scales = Eigen::VectorXd::Ones(p);
    if (p == 0) {
        model.weights = Eigen::VectorXd::Zero(0);
        model.intercept = y.mean();
        return model;
    }

    Eigen::MatrixXd Xc = X;
    Eigen::VectorXd col_means(p);
    for (int j = 0; j < p; ++j) {
        col_means(j) = Xc.col(j).mean();
        Xc.col(j).array() -= col_means(j);
    }
    const double y_mean = y.mean();
    const Eigen::VectorXd yc = y.array() - y_mean;

    const Eigen::MatrixXd gram = Xc.transpose() * Xc;
    const Eigen::VectorXd xty = Xc.transpose() * yc;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    Eigen::VectorXd w;
    if (lu.isInvertible() && lu.rcond() > 1e-12) {
        w = lu.solve(xty);
    } else {
        model.ridge_fallback = true;
        const Eigen::MatrixXd ridged =
            gram + 1e-8 * Eigen::MatrixXd::Identity(p, p);
        w = ridged.ldlt().solve(xty);
    }
    model.weights = std::move(w);
    model.intercept = y_mean - col_means.dot(model.weights);
    return model;
}

Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.weights.size())
        throw DimensionMismatch("predict: feature count mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), model.intercept);
    for (int j = 0; j < X.cols(); ++j)
        out += model.weights(j) * (X.col(j).array() - model.feature_means(j)).matrix() /
               model.feature_scales(j);
    return out;
}

double lasso_kkt_gap(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const LassoConfig& cfg, const LinearModel& model) {
    const int n = static_cast<int>(X.rows());
    Eigen::MatrixXd Z = X;
    for (int j = 0; j < X.cols(); ++j)
        Z.col(j) = (Z.col(j).array() - model.feature_means(j)) / model.feature_scales(j);
    const Eigen::VectorXd r =
        (y.array() - model.intercept).matrix() - Z * model.weights;
    double gap = 0.0;
    for (int j = 0; j < X.cols(); ++j) {
        const double g = Z.col(j).dot(r) / n;  // -gradient of the smooth part
        if (model.weights(j) != 0.0)
            gap = std::max(gap, std::abs(std::abs(g) - cfg.l1_penalty));
        else
            gap = std::max(gap, std::abs(g) - cfg.l1_penalty);
    }
    return std::max(gap, 0.0);
}

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const LassoConfig& cfg, const LinearModel& model) {
    const int n = static_cast<int>(X.rows());
    const Eigen::VectorXd resid = y - predict(model, X);
    return resid.squaredNorm() / (2.0 * n) + cfg.l1_penalty * model.weights.lpNorm<1>();
}

}  // namespace causalsel
