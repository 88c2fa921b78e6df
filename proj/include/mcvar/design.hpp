#pragma once

#include "mcvar/common.hpp"
#include "mcvar/panel.hpp"

#include <vector>

namespace mcvar {

/// Regression layout of one class: row t of `responses` is y_t and row t of
/// `predictors` is [y_{t-1}', ..., y_{t-P}'] (column block p-1 holds lag p).
struct LaggedDesign {
    Matrix responses;   // N x J
    Matrix predictors;  // N x (J*P)
    int lag_order = 0;

    Eigen::Index num_rows() const { return responses.rows(); }
    Eigen::Index num_series() const { return responses.cols(); }
};

/// Build the lag-P design from a T x J block. Responses start at row
/// `first_row` (defaults to P); a larger `first_row` gives a common sample
/// for comparing different lag orders.
inline LaggedDesign build_lagged_design(const Matrix& y, int lag_order, int first_row = -1) {
    if (lag_order < 1) throw ConfigError("lag order must be >= 1");
    if (first_row < 0) first_row = lag_order;
    if (first_row < lag_order) throw ConfigError("first response row precedes the available lags");
    const auto T = y.rows();
    const auto J = y.cols();
    if (T <= first_row)
        throw DataError("not enough observations (T=" + std::to_string(T) +
                        ") for lag order " + std::to_string(lag_order));
    const auto N = T - first_row;
    LaggedDesign d;
    d.lag_order = lag_order;
    d.responses = y.bottomRows(N);
    d.predictors.resize(N, J * lag_order);
    for (int p = 1; p <= lag_order; ++p)
        d.predictors.middleCols(J * (p - 1), J) = y.middleRows(first_row - p, N);
    return d;
}

inline std::vector<LaggedDesign> build_lagged_design(const ReturnPanel& panel, int lag_order) {
    std::vector<LaggedDesign> out;
    out.reserve(panel.values.size());
    for (const auto& v : panel.values) out.push_back(build_lagged_design(v, lag_order));
    return out;
}

}  // namespace mcvar
