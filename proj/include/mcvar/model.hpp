#pragma once

#include "mcvar/common.hpp"
#include "mcvar/design.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mcvar {

/// Regularization weights. lambda1/lambda2: lasso and cross-class fusion on
/// the autoregressive coefficients; lambda3/lambda4: lasso (off-diagonal)
/// and fusion on the inverse error covariances.
struct PenaltyConfig {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double lambda4 = 0.0;

    void validate() const {
        for (double v : {lambda1, lambda2, lambda3, lambda4})
            if (!std::isfinite(v) || v < 0.0) throw ConfigError("penalty weights must be finite and >= 0");
    }
    friend bool operator==(const PenaltyConfig&, const PenaltyConfig&) = default;
};

struct FitDiagnostics {
    std::vector<double> objective_trace;  // one entry per outer iteration
    int outer_iterations = 0;
    bool converged = false;
};

/// Fitted multi-class VAR. `coefficients[k]` is J x (J*P); column block p-1
/// is B_p, and entry (j, i) of a block is the effect of series i on series j.
/// `precisions[k]` is the J x J inverse error covariance.
struct MultiClassVarFit {
    std::vector<std::string> classes;
    std::vector<SeriesInfo> series;
    int lag_order = 1;
    std::vector<Matrix> coefficients;
    std::vector<Matrix> precisions;
    PenaltyConfig penalty;
    FitDiagnostics diagnostics;

    std::size_t num_classes() const { return coefficients.size(); }
    Eigen::Index num_series() const { return coefficients.empty() ? 0 : coefficients.front().rows(); }

    /// B_p for class k, p in 1..P.
    Matrix lag_block(std::size_t k, int p) const {
        const auto J = num_series();
        return coefficients.at(k).middleCols(J * (p - 1), J);
    }

    void validate() const;
};

inline void MultiClassVarFit::validate() const {
    const auto K = coefficients.size();
    if (K == 0 || precisions.size() != K) throw DataError("fit: class count mismatch");
    const auto J = num_series();
    if (lag_order < 1) throw DataError("fit: lag order must be >= 1");
    if (!classes.empty() && classes.size() != K) throw DataError("fit: class labels mismatch");
    if (!series.empty() && static_cast<Eigen::Index>(series.size()) != J)
        throw DataError("fit: series labels mismatch");
    for (std::size_t k = 0; k < K; ++k) {
        if (coefficients[k].rows() != J || coefficients[k].cols() != J * lag_order)
            throw DataError("fit: coefficient block has wrong shape");
        const auto& om = precisions[k];
        if (om.rows() != J || om.cols() != J) throw DataError("fit: precision matrix has wrong shape");
        if ((om - om.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw DataError("fit: precision matrix not symmetric");
    }
}

struct ParameterCount {
    long long coefficients = 0;
    long long precision_elements = 0;

    friend bool operator==(const ParameterCount&, const ParameterCount&) = default;
};

/// K*J^2*P autoregressive parameters and K*J(J+1)/2 unique inverse
/// covariance elements.
inline ParameterCount count_parameters(long long J, long long K, long long P) {
    if (J < 1 || K < 1 || P < 1) throw ConfigError("count_parameters: J, K, P must be positive");
    return {K * J * J * P, K * J * (J + 1) / 2};
}

/// log|A| through a Cholesky factorization; throws if A is not positive
/// definite.
inline double log_det_spd(const Matrix& a) {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NumericError("matrix is not positive definite");
    const Matrix& l = llt.matrixL();
    return 2.0 * l.diagonal().array().log().sum();
}

/// Sufficient statistics of one class design: the generalized least-squares
/// loss and its gradient depend on the data only through these.
struct ClassGram {
    Matrix yy;  // R'R,  J x J
    Matrix yx;  // R'X,  J x JP
    Matrix xx;  // X'X,  JP x JP
    Eigen::Index n = 0;
};

inline ClassGram make_gram(const LaggedDesign& d) {
    ClassGram g;
    g.yy = d.responses.transpose() * d.responses;
    g.yx = d.responses.transpose() * d.predictors;
    g.xx = d.predictors.transpose() * d.predictors;
    g.n = d.num_rows();
    return g;
}

inline std::vector<ClassGram> make_grams(const std::vector<LaggedDesign>& designs) {
    std::vector<ClassGram> out;
    out.reserve(designs.size());
    for (const auto& d : designs) out.push_back(make_gram(d));
    return out;
}

/// E'E for residuals E = R - X B', from the Gram blocks.
inline Matrix residual_cross_product(const Matrix& b, const ClassGram& g) {
    Matrix bx = b * g.yx.transpose();
    return g.yy - bx - bx.transpose() + b * g.xx * b.transpose();
}

/// sum_t (y_t - B Y_t)' Omega (y_t - B Y_t)
inline double gls_loss(const Matrix& b, const Matrix& omega, const ClassGram& g) {
    return (omega.cwiseProduct(residual_cross_product(b, g))).sum();
}

/// Exact (non-smoothed) fusion over ordered class pairs:
/// sum_{k != k'} sum_entries |A^(k) - A^(k')|.
inline double ordered_pair_fusion(const std::vector<Matrix>& mats) {
    double s = 0.0;
    for (std::size_t a = 0; a < mats.size(); ++a)
        for (std::size_t b = a + 1; b < mats.size(); ++b) s += 2.0 * (mats[a] - mats[b]).cwiseAbs().sum();
    return s;
}

inline double off_diagonal_l1(const Matrix& m) {
    return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
}

/// Penalty terms of the generalized criterion.
inline double penalty_value(const std::vector<Matrix>& coefficients, const std::vector<Matrix>& precisions,
                            const PenaltyConfig& pen) {
    double s = 0.0;
    for (const auto& b : coefficients) s += pen.lambda1 * b.cwiseAbs().sum();
    if (pen.lambda2 > 0.0) s += pen.lambda2 * ordered_pair_fusion(coefficients);
    for (const auto& om : precisions) s += pen.lambda3 * off_diagonal_l1(om);
    if (pen.lambda4 > 0.0) s += pen.lambda4 * ordered_pair_fusion(precisions);
    return s;
}

/// Generalized penalized criterion, Gram form.
inline double objective(const std::vector<Matrix>& coefficients, const std::vector<Matrix>& precisions,
                        const std::vector<ClassGram>& grams, const PenaltyConfig& pen) {
    double s = 0.0;
    for (std::size_t k = 0; k < grams.size(); ++k)
        s += gls_loss(coefficients[k], precisions[k], grams[k]) -
             static_cast<double>(grams[k].n) * log_det_spd(precisions[k]);
    return s + penalty_value(coefficients, precisions, pen);
}

/// Generalized penalized criterion:
///
///   sum_k sum_t [ e_t' Omega_k e_t - log|Omega_k| ]
///     + lambda1 sum |B| + lambda2 sum_{k != k'} |B_k - B_k'|
///     + lambda3 sum_k sum_{i != j} |Omega_k,ij| + lambda4 sum_{k != k'} |Omega_k - Omega_k'|
///
/// The log-determinant enters once per observation (weight N).
inline double objective(const std::vector<Matrix>& coefficients, const std::vector<Matrix>& precisions,
                        const std::vector<LaggedDesign>& designs, const PenaltyConfig& pen) {
    if (coefficients.size() != designs.size() || precisions.size() != designs.size())
        throw ConfigError("objective: class counts disagree");
    double s = 0.0;
    for (std::size_t k = 0; k < designs.size(); ++k) {
        const auto& d = designs[k];
        if (coefficients[k].cols() != d.predictors.cols() || coefficients[k].rows() != d.num_series())
            throw ConfigError("objective: coefficient shape does not match design");
        const Matrix e = d.responses - d.predictors * coefficients[k].transpose();
        s += (e * precisions[k]).cwiseProduct(e).sum() -
             static_cast<double>(d.num_rows()) * log_det_spd(precisions[k]);
    }
    return s + penalty_value(coefficients, precisions, pen);
}

inline double objective(const MultiClassVarFit& fit, const std::vector<LaggedDesign>& designs,
                        const PenaltyConfig& pen) {
    return objective(fit.coefficients, fit.precisions, designs, pen);
}

}  // namespace mcvar
