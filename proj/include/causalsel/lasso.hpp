#pragma once

#include <Eigen/Dense>
#include <vector>

namespace causalsel {

struct LassoConfig {
    double l1_penalty = 0.01;
    double tol = 1e-7;
    int max_iters = 10000;
};

/// Linear model on internally standardized features. predict() applies
/// the standardization captured at fit time, so callers always pass raw
/// columns.
struct LinearModel {
    Eigen::VectorXd weights;         // on the standardized feature scale
    double intercept = 0.0;
    Eigen::VectorXd feature_means;
    Eigen::VectorXd feature_scales;  // 1.0 where no scaling was applied
    bool converged = true;
    bool ridge_fallback = false;

    /// Indices with exactly nonzero weight.
    std::vector<int> support() const;
};

/// L1-penalized least squares, objective
///   (1/(2n)) * ||y - Xw - b||^2 + alpha * sum_i |w_i|,
/// minimized by cyclic coordinate descent with soft-thresholding.
/// Features are standardized internally (ML moments); y is centered.
LinearModel lasso_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const LassoConfig& cfg);

/// Ordinary least squares with intercept. Singular normal equations fall
/// back to ridge 1e-8*I (flagged). Zero features gives the mean model.
LinearModel ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& X);

/// Largest KKT violation of the lasso objective at `model`:
/// max over j of |g_j| - alpha on the inactive set and ||g_j| - alpha|
/// on the support, with g the gradient of the smooth part. Zero at an
/// exact optimum.
double lasso_kkt_gap(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const LassoConfig& cfg, const LinearModel& model);

/// Value of the lasso objective at `model` (standardized scale).
double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const LassoConfig& cfg, const LinearModel& model);

}  // namespace causalsel
