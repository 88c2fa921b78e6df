#pragma once

#include "mcvar/common.hpp"
#include "mcvar/design.hpp"
#include "mcvar/model.hpp"
#include "mcvar/prox.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace mcvar {

struct AdmmOptions {
    double rho = 1.0;
    int max_iterations = 10000;
    double abs_tolerance = 1e-9;
    double rel_tolerance = 1e-7;
    double relaxation = 1.0;     // over-relaxation factor in [1, 2)
    bool adapt_rho = true;       // residual balancing (x2 or /2 when ratio > 10)
    int adapt_until = 2000;      // freeze rho after this many iterations

    void validate() const {
        if (!(rho > 0.0)) throw ConfigError("ADMM rho must be > 0");
        if (max_iterations < 1) throw ConfigError("ADMM iteration cap must be >= 1");
        if (!(abs_tolerance > 0.0) || !(rel_tolerance > 0.0)) throw ConfigError("ADMM tolerances must be > 0");
        if (!(relaxation > 0.0 && relaxation < 2.0)) throw ConfigError("ADMM relaxation must lie in (0, 2)");
    }
};

/// Solver state carried between calls for warm starts.
struct AdmmState {
    std::vector<Matrix> z;
    std::vector<Matrix> u;  // scaled duals
    double rho = 1.0;
};

struct AdmmResult {
    /// The sparse iterate Z when it is positive definite, otherwise the
    /// (always positive definite) Theta iterate.
    std::vector<Matrix> precisions;
    AdmmState state;
    int iterations = 0;
    bool converged = false;
    bool sparse_iterate = true;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

struct ResidualCovariances {
    std::vector<Matrix> s;
    std::vector<double> n;
};

/// S_k = E_k'E_k / N with E_k the N x J residual matrix of class k.
inline ResidualCovariances residual_covariances(const std::vector<Matrix>& coefficients,
                                                const std::vector<LaggedDesign>& designs) {
    ResidualCovariances out;
    for (std::size_t k = 0; k < designs.size(); ++k) {
        const auto& d = designs[k];
        const Matrix e = d.responses - d.predictors * coefficients.at(k).transpose();
        const auto n = static_cast<double>(d.num_rows());
        out.s.push_back(e.transpose() * e / n);
        out.n.push_back(n);
    }
    return out;
}

inline ResidualCovariances residual_covariances(const std::vector<Matrix>& coefficients,
                                                const std::vector<ClassGram>& grams) {
    ResidualCovariances out;
    for (std::size_t k = 0; k < grams.size(); ++k) {
        const auto n = static_cast<double>(grams[k].n);
        Matrix s = residual_cross_product(coefficients.at(k), grams[k]) / n;
        out.s.push_back(0.5 * (s + s.transpose()));
        out.n.push_back(n);
    }
    return out;
}

/// The positive-definite solution of rho * Theta - Theta^{-1} = rho * A for
/// symmetric A: with A = V diag(d) V', Theta = V diag(theta) V' where
/// theta_i = (d_i + sqrt(d_i^2 + 4/rho)) / 2.
inline Matrix eigen_theta_update(const Matrix& a, double rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
    if (es.info() != Eigen::Success) throw NumericError("eigen_theta_update: eigendecomposition failed");
    const Vector d = es.eigenvalues();
    const Vector theta = 0.5 * (d.array() + (d.array().square() + 4.0 / rho).sqrt());
    Matrix out = es.eigenvectors() * theta.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

namespace detail {

inline bool is_positive_definite(const Matrix& m) {
    Eigen::LLT<Matrix> llt(m);
    return llt.info() == Eigen::Success;
}

}  // namespace detail

/// Fused graphical lasso across classes:
///
///   min sum_k n_k (tr(S_k Theta_k) - log|Theta_k|)
///       + lambda3 sum_k sum_{i != j} |Theta_k,ij|
///       + lambda4 sum_{k < k'} sum_{i,j} |Theta_k,ij - Theta_k',ij|
///
/// by ADMM on the split Theta = Z. The diagonal is not lasso-penalized.
inline AdmmResult admm_fgl(const std::vector<Matrix>& s, const std::vector<double>& n, double lambda3,
                           double lambda4, const AdmmOptions& opts,
                           const std::optional<AdmmState>& warm_start = std::nullopt) {
    opts.validate();
    const std::size_t K = s.size();
    if (K == 0 || n.size() != K) throw ConfigError("admm_fgl: class counts disagree");
    if (!(lambda3 >= 0.0) || !(lambda4 >= 0.0)) throw ConfigError("admm_fgl: penalties must be >= 0");
    const auto J = s.front().rows();
    for (std::size_t k = 0; k < K; ++k) {
        if (s[k].rows() != J || s[k].cols() != J) throw ConfigError("admm_fgl: covariance shapes differ");
        if ((s[k] - s[k].transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, s[k].cwiseAbs().maxCoeff()))
            throw DataError("admm_fgl: covariance matrix is not symmetric");
        if (!(n[k] > 0.0)) throw ConfigError("admm_fgl: sample sizes must be positive");
    }

    AdmmState st;
    if (warm_start && warm_start->z.size() == K) {
        st = *warm_start;
    } else {
        st.rho = opts.rho;
        for (std::size_t k = 0; k < K; ++k) {
            st.z.push_back(Matrix::Identity(J, J));
            st.u.push_back(Matrix::Zero(J, J));
        }
    }

    std::vector<Matrix> theta(K), z_old(K);
    std::vector<double> a(K);
    AdmmResult res;
    const double scale = std::sqrt(static_cast<double>(K)) * static_cast<double>(J);

    for (int it = 1; it <= opts.max_iterations; ++it) {
        res.iterations = it;
        for (std::size_t k = 0; k < K; ++k) {
            theta[k] = eigen_theta_update(st.z[k] - st.u[k] - (n[k] / st.rho) * s[k], st.rho / n[k]);
            z_old[k] = st.z[k];
        }
        std::vector<Matrix> relaxed(K);
        for (std::size_t k = 0; k < K; ++k)
            relaxed[k] = opts.relaxation * theta[k] + (1.0 - opts.relaxation) * z_old[k];

        for (Eigen::Index i = 0; i < J; ++i)
            for (Eigen::Index j = i; j < J; ++j) {
                for (std::size_t k = 0; k < K; ++k) a[k] = relaxed[k](i, j) + st.u[k](i, j);
                const auto x = fused_lasso_prox(a, i == j ? 0.0 : lambda3, lambda4, st.rho);
                for (std::size_t k = 0; k < K; ++k) st.z[k](i, j) = st.z[k](j, i) = x[k];
            }

        double r2 = 0.0, s2 = 0.0, th2 = 0.0, z2 = 0.0, u2 = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            st.u[k] += relaxed[k] - st.z[k];
            r2 += (theta[k] - st.z[k]).squaredNorm();
            s2 += (st.z[k] - z_old[k]).squaredNorm();
            th2 += theta[k].squaredNorm();
            z2 += st.z[k].squaredNorm();
            u2 += st.u[k].squaredNorm();
        }
        const double r = std::sqrt(r2);
        const double sd = st.rho * std::sqrt(s2);
        res.primal_residual = r;
        res.dual_residual = sd;
        const double eps_pri = opts.abs_tolerance * scale + opts.rel_tolerance * std::sqrt(std::max(th2, z2));
        const double eps_dual = opts.abs_tolerance * scale + opts.rel_tolerance * st.rho * std::sqrt(u2);
        if (r <= eps_pri && sd <= eps_dual) {
            res.converged = true;
            break;
        }
        if (opts.adapt_rho && it <= opts.adapt_until) {
            if (r > 10.0 * sd) {
                st.rho *= 2.0;
                for (auto& u : st.u) u *= 0.5;
            } else if (sd > 10.0 * r) {
                st.rho *= 0.5;
                for (auto& u : st.u) u *= 2.0;
            }
        }
    }

    res.sparse_iterate = true;
    for (std::size_t k = 0; k < K; ++k)
        if (!detail::is_positive_definite(st.z[k])) res.sparse_iterate = false;
    res.precisions = res.sparse_iterate ? st.z : theta;
    res.state = std::move(st);
    return res;
}

inline AdmmResult admm_fgl(const ResidualCovariances& cov, double lambda3, double lambda4,
                           const AdmmOptions& opts, const std::optional<AdmmState>& warm_start = std::nullopt) {
    return admm_fgl(cov.s, cov.n, lambda3, lambda4, opts, warm_start);
}

}  // namespace mcvar
