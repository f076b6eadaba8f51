#include "causalsel/stats.hpp"

#include <algorithm>
#include <cmath>

#include "causalsel/errors.hpp"

namespace causalsel {

namespace {
constexpr double kConditionLimit = 1e12;
constexpr double kAtanhClamp = 1.0 - 1e-12;
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

CorrelationMatrix correlation_matrix(const Dataset& data) {
    const int n = data.n();
    const int p = data.p();
    if (n < 2) throw InsufficientSamples("correlation needs at least two rows");

    Eigen::MatrixXd centered = data.values();
    Eigen::VectorXd sd(p);
    for (int j = 0; j < p; ++j) {
        centered.col(j).array() -= centered.col(j).mean();
        const double var = centered.col(j).squaredNorm() / (n - 1);
        if (var <= 0.0) throw ConstantColumn(data.column_names()[j]);
        sd(j) = std::sqrt(var);
    }
    Eigen::MatrixXd corr = (centered.transpose() * centered) / (n - 1);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) corr(i, j) /= sd(i) * sd(j);

    corr = ((corr + corr.transpose()) / 2.0).eval();
    for (int i = 0; i < p; ++i) corr(i, i) = 1.0;
    corr = corr.cwiseMax(-1.0).cwiseMin(1.0);
    return CorrelationMatrix{std::move(corr)};
}

double partial_correlation(const CorrelationMatrix& corr, int i, int j,
                           const std::vector<int>& cond) {
    const int p = corr.p();
    if (i == j) throw InvalidArgument("partial_correlation: i == j");
    auto check = [&](int v) {
        if (v < 0 || v >= p) throw InvalidArgument("partial_correlation: index out of range");
    };
    check(i);
    check(j);
    for (int s : cond) {
        check(s);
        if (s == i || s == j)
            throw InvalidArgument("partial_correlation: conditioning set contains i or j");
    }
    if (cond.empty()) return corr.values(i, j);

    const int m = 2 + static_cast<int>(cond.size());
    std::vector<int> idx;
    idx.reserve(m);
    idx.push_back(i);
    idx.push_back(j);
    idx.insert(idx.end(), cond.begin(), cond.end());

    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) sub(a, b) = corr.values(idx[a], idx[b]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (lmin <= 0.0 || lmax / lmin > kConditionLimit)
        throw SingularSubmatrix("ill-conditioned conditioning set (|S|=" +
                                std::to_string(cond.size()) + ")");

    const Eigen::MatrixXd omega = sub.inverse();
    const double rho = -omega(0, 1) / std::sqrt(omega(0, 0) * omega(1, 1));
    return std::clamp(rho, -1.0, 1.0);
}

CiTestResult fisher_z_test(const CorrelationMatrix& corr, int i, int j,
                           const std::vector<int>& cond, int n, double alpha) {
    const int df = n - static_cast<int>(cond.size()) - 3;
    if (df < 1)
        throw InsufficientSamples("fisher_z_test: n - |S| - 3 < 1 (n=" + std::to_string(n) +
                                  ", |S|=" + std::to_string(cond.size()) + ")");

    CiTestResult res;
    res.cond_size = static_cast<int>(cond.size());
    res.r = partial_correlation(corr, i, j, cond);
    const double rc = std::clamp(res.r, -kAtanhClamp, kAtanhClamp);
    res.z = std::atanh(rc) * std::sqrt(static_cast<double>(df));
    res.p_value = std::clamp(std::erfc(std::abs(res.z) / std::sqrt(2.0)), 0.0, 1.0);
    res.independent = res.p_value > alpha;
    return res;
}

}  // namespace causalsel
