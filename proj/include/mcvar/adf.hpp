#pragma once

#include "mcvar/common.hpp"
#include "mcvar/detail/adf_table.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>

namespace mcvar {

struct AdfResult {
    double statistic = 0.0;
    /// Interpolated from the bundled quantile table, so it is clamped to
    /// [0.001, 0.999].
    double p_value = 1.0;
    int lags = 0;
    int nobs = 0;
    double critical_1 = 0.0;
    double critical_5 = 0.0;
    double critical_10 = 0.0;
    bool reject_1 = false;
    bool reject_5 = false;
    bool reject_10 = false;
};

/// Schwert's rule floor(12 * (T/100)^{1/4}).
inline int schwert_lag(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace detail {

// Quantile of the tau distribution at table column `col` for `nobs`
// observations, linear in 1/n between tabulated sample sizes.
inline double adf_quantile_column(std::size_t col, double nobs) {
    const auto& n = kAdfSampleSizes;
    const auto& q = kAdfQuantiles;
    if (nobs <= n.front()) return q.front()[col];
    if (nobs >= n.back()) return q.back()[col];
    std::size_t r = 1;
    while (n[r] < nobs) ++r;
    const double w = (1.0 / n[r - 1] - 1.0 / nobs) / (1.0 / n[r - 1] - 1.0 / n[r]);
    return (1.0 - w) * q[r - 1][col] + w * q[r][col];
}

inline double adf_critical_value(double prob, double nobs) {
    const auto& p = kAdfProbs;
    auto it = std::find_if(p.begin(), p.end(), [&](double v) { return std::abs(v - prob) < 1e-12; });
    return adf_quantile_column(static_cast<std::size_t>(it - p.begin()), nobs);
}

inline double adf_p_value(double stat, double nobs) {
    const auto& p = kAdfProbs;
    std::array<double, kAdfProbs.size()> q{};
    for (std::size_t c = 0; c < q.size(); ++c) q[c] = adf_quantile_column(c, nobs);
    if (stat <= q.front()) return p.front();
    if (stat >= q.back()) return p.back();
    std::size_t c = 1;
    while (q[c] < stat) ++c;
    const double w = (stat - q[c - 1]) / (q[c] - q[c - 1]);
    return p[c - 1] + w * (p[c] - p[c - 1]);
}

}  // namespace detail

/// Augmented Dickey-Fuller test with a constant and no trend:
///
///   dy_t = a + phi * y_{t-1} + sum_{i=1..L} g_i * dy_{t-i} + e_t,
///
/// statistic = phi_hat / se(phi_hat). L is Schwert's rule, capped by
/// `max_lag` when given. H0 is a unit root, so rejection indicates
/// stationarity.
inline AdfResult adf_test(std::span<const double> series, std::optional<int> max_lag = std::nullopt) {
    const std::size_t n = series.size();
    if (n < 25) throw DataError("ADF test needs at least 25 observations, got " + std::to_string(n));
    int lags = schwert_lag(n);
    if (max_lag) {
        if (*max_lag < 0) throw ConfigError("ADF max_lag must be non-negative");
        lags = std::min(lags, *max_lag);
    }
    const int m = static_cast<int>(n) - 1 - lags;  // regression rows
    const int cols = 2 + lags;
    if (m <= cols) throw DataError("series too short for " + std::to_string(lags) + " ADF lags");

    Vector dy(static_cast<Eigen::Index>(n - 1));
    for (std::size_t i = 0; i + 1 < n; ++i) dy(static_cast<Eigen::Index>(i)) = series[i + 1] - series[i];

    Matrix X(m, cols);
    Vector z(m);
    for (int r = 0; r < m; ++r) {
        const int t = r + lags;  // index into dy
        z(r) = dy(t);
        X(r, 0) = 1.0;
        X(r, 1) = series[static_cast<std::size_t>(t)];
        for (int i = 1; i <= lags; ++i) X(r, 1 + i) = dy(t - i);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(X);
    if (qr.rank() < cols) throw NumericError("singular ADF regression");
    const Vector beta = qr.solve(z);
    const double s2 = (z - X * beta).squaredNorm() / static_cast<double>(m - cols);
    const Matrix xtx_inv = (X.transpose() * X).ldlt().solve(Matrix::Identity(cols, cols));
    const double se = std::sqrt(s2 * xtx_inv(1, 1));
    if (!(se > 0.0) || !std::isfinite(se)) throw NumericError("degenerate ADF standard error");

    AdfResult res;
    res.statistic = beta(1) / se;
    res.lags = lags;
    res.nobs = m;
    res.p_value = detail::adf_p_value(res.statistic, m);
    res.critical_1 = detail::adf_critical_value(0.01, m);
    res.critical_5 = detail::adf_critical_value(0.05, m);
    res.critical_10 = detail::adf_critical_value(0.10, m);
    res.reject_1 = res.statistic < res.critical_1;
    res.reject_5 = res.statistic < res.critical_5;
    res.reject_10 = res.statistic < res.critical_10;
    return res;
}

}  // namespace mcvar
