#pragma once

#include <Eigen/Dense>
#include <vector>

#include "causalsel/dataset.hpp"

namespace causalsel {

/// Symmetric p x p Pearson correlation matrix with unit diagonal.
struct CorrelationMatrix {
    Eigen::MatrixXd values;
    int p() const { return static_cast<int>(values.rows()); }
};

/// Outcome of one conditional-independence test.
struct CiTestResult {
    double r = 0.0;        // (partial) correlation
    double z = 0.0;        // Fisher statistic
    double p_value = 1.0;
    bool independent = true;
    int cond_size = 0;
};

CorrelationMatrix correlation_matrix(const Dataset& data);

/// Partial correlation of variables i and j given the set S, computed by
/// inverting the principal submatrix of corr over {i,j} union S. Throws
/// SingularSubmatrix when that submatrix has condition number > 1e12.
double partial_correlation(const CorrelationMatrix& corr, int i, int j,
                           const std::vector<int>& cond);

/// Fisher-z conditional-independence test:
///   z = atanh(r) * sqrt(n - |S| - 3), two-sided p against N(0,1).
/// r is clamped to +-(1 - 1e-12) before atanh. independent <=> p > alpha.
CiTestResult fisher_z_test(const CorrelationMatrix& corr, int i, int j,
                           const std::vector<int>& cond, int n, double alpha);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace causalsel
