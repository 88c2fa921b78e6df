#pragma once

#include "mcvar/common.hpp"
#include "mcvar/design.hpp"
#include "mcvar/model.hpp"
#include "mcvar/prox.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

namespace mcvar {

struct SpgOptions {
    double mu = 1e-4;            // Nesterov smoothing parameter of the fusion term
    int max_iterations = 5000;
    double tolerance = 1e-6;     // relative objective and iterate change
    double initial_step = 1.0;   // first trial step 1/L
    double shrink = 0.5;         // backtracking factor on the step
    bool record_trace = false;

    void validate() const {
        if (!(mu > 0.0)) throw ConfigError("SPG smoothing parameter mu must be > 0");
        if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("SPG shrink factor must lie in (0, 1)");
        if (max_iterations < 1) throw ConfigError("SPG iteration cap must be >= 1");
        if (!(tolerance > 0.0)) throw ConfigError("SPG tolerance must be > 0");
        if (!(initial_step > 0.0)) throw ConfigError("SPG initial step must be > 0");
    }
};

struct SpgTraceRow {
    int iteration = 0;
    double objective = 0.0;  // smoothed objective at the accepted iterate
    double step = 0.0;
};

struct SpgResult {
    std::vector<Matrix> coefficients;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;        // smoothed criterion
    double exact_objective = 0.0;  // with the exact fusion penalty
    std::vector<SpgTraceRow> trace;
};

struct SmoothFusion {
    double value = 0.0;
    std::vector<Matrix> gradient;
};

/// Nesterov-smoothed fusion penalty over ordered class pairs. Writing the
/// penalty as max_{|alpha|_inf <= 1} <alpha, lambda2 * C vec(B)> with C the
/// pairwise-difference operator, the smoothed value is
///   max_alpha <alpha, lambda2 * C vec(B)> - (mu/2) ||alpha||^2
/// with maximizer alpha* = clip(lambda2 * C vec(B) / mu, [-1, 1]) and
/// gradient lambda2 * C' alpha*. The smoothing gap is at most
/// mu * (number of ordered pairs) / 2.
inline SmoothFusion smooth_fusion_value_grad(const std::vector<Matrix>& b, double lambda2, double mu) {
    SmoothFusion out;
    for (const auto& m : b) out.gradient.push_back(Matrix::Zero(m.rows(), m.cols()));
    if (lambda2 <= 0.0) return out;
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = i + 1; j < b.size(); ++j) {
            const Eigen::ArrayXXd d = lambda2 * (b[i] - b[j]).array();
            const Eigen::ArrayXXd alpha = (d / mu).max(-1.0).min(1.0);
            // (i, j) and (j, i) contribute identically.
            out.value += 2.0 * (alpha * d - 0.5 * mu * alpha.square()).sum();
            out.gradient[i].array() += 2.0 * lambda2 * alpha;
            out.gradient[j].array() -= 2.0 * lambda2 * alpha;
        }
    return out;
}

/// Smoothing gap bound mu * D, D = half the number of ordered fusion pairs
/// over all coefficient entries.
inline double smoothing_gap(std::size_t num_classes, Eigen::Index entries_per_class, double mu) {
    const double pairs = static_cast<double>(num_classes) * static_cast<double>(num_classes - 1) *
                         static_cast<double>(entries_per_class);
    return mu * pairs / 2.0;
}

/// Gradient of sum_t (y_t - B Y_t)' Omega (y_t - B Y_t) with respect to B:
/// 2 Omega (B X'X - R'X).
inline Matrix gls_grad(const Matrix& b, const Matrix& omega, const ClassGram& g) {
    return 2.0 * omega * (b * g.xx - g.yx);
}

inline std::vector<Matrix> gls_grad(const std::vector<Matrix>& b, const std::vector<LaggedDesign>& designs,
                                    const std::vector<Matrix>& omegas) {
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < designs.size(); ++k) {
        const auto& d = designs[k];
        const Matrix e = d.responses - d.predictors * b[k].transpose();
        out.push_back(-2.0 * omegas[k] * e.transpose() * d.predictors);
    }
    return out;
}

namespace detail {

// B-step objective on the packed layout [B^(1) ... B^(K)] (J x K*JP).
class BStepProblem {
public:
    BStepProblem(const std::vector<ClassGram>& grams, const std::vector<Matrix>& omegas, double lambda1,
                 double lambda2, double mu)
        : grams_(grams), omegas_(omegas), lambda1_(lambda1), lambda2_(lambda2), mu_(mu) {
        J_ = grams.front().yy.rows();
        JP_ = grams.front().xx.rows();
    }

    Eigen::Index width() const { return JP_; }

    std::vector<Matrix> unpack(const Matrix& x) const {
        std::vector<Matrix> out;
        for (std::size_t k = 0; k < grams_.size(); ++k) out.push_back(block(x, k));
        return out;
    }

    Matrix pack(const std::vector<Matrix>& b) const {
        Matrix x(J_, JP_ * static_cast<Eigen::Index>(b.size()));
        for (std::size_t k = 0; k < b.size(); ++k) x.middleCols(JP_ * static_cast<Eigen::Index>(k), JP_) = b[k];
        return x;
    }

    double smooth_value(const Matrix& x) const {
        double v = 0.0;
        for (std::size_t k = 0; k < grams_.size(); ++k) v += gls_loss(block(x, k), omegas_[k], grams_[k]);
        if (lambda2_ > 0.0) v += smooth_fusion_value_grad(unpack(x), lambda2_, mu_).value;
        return v;
    }

    double smooth_value_grad(const Matrix& x, Matrix& grad) const {
        grad.resize(x.rows(), x.cols());
        double v = 0.0;
        for (std::size_t k = 0; k < grams_.size(); ++k) {
            const Matrix b = block(x, k);
            v += gls_loss(b, omegas_[k], grams_[k]);
            grad.middleCols(JP_ * static_cast<Eigen::Index>(k), JP_) = gls_grad(b, omegas_[k], grams_[k]);
        }
        if (lambda2_ > 0.0) {
            auto sf = smooth_fusion_value_grad(unpack(x), lambda2_, mu_);
            v += sf.value;
            grad += pack(sf.gradient);
        }
        return v;
    }

    double lasso(const Matrix& x) const { return lambda1_ * x.cwiseAbs().sum(); }

    double exact_value(const Matrix& x) const {
        double v = lasso(x);
        for (std::size_t k = 0; k < grams_.size(); ++k) v += gls_loss(block(x, k), omegas_[k], grams_[k]);
        if (lambda2_ > 0.0) v += lambda2_ * ordered_pair_fusion(unpack(x));
        return v;
    }

private:
    Matrix block(const Matrix& x, std::size_t k) const {
        return x.middleCols(JP_ * static_cast<Eigen::Index>(k), JP_);
    }

    const std::vector<ClassGram>& grams_;
    const std::vector<Matrix>& omegas_;
    double lambda1_, lambda2_, mu_;
    Eigen::Index J_ = 0, JP_ = 0;
};

}  // namespace detail

/// B-step: minimize the generalized least-squares loss plus the smoothed
/// fusion term plus the lasso, with Omega held fixed. Monotone accelerated
/// proximal gradient with backtracking; momentum restarts whenever an
/// iterate would increase the objective. The lasso is applied exactly by
/// soft-thresholding, so zeros in the result are exact.
inline SpgResult spg_fit(const std::vector<ClassGram>& grams, const std::vector<Matrix>& omegas, double lambda1,
                         double lambda2, const SpgOptions& opts,
                         const std::optional<std::vector<Matrix>>& warm_start = std::nullopt) {
    opts.validate();
    if (grams.empty() || omegas.size() != grams.size()) throw ConfigError("spg_fit: class counts disagree");
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw ConfigError("spg_fit: penalties must be >= 0");

    const detail::BStepProblem prob(grams, omegas, lambda1, lambda2, opts.mu);
    const auto J = grams.front().yy.rows();
    const auto K = static_cast<Eigen::Index>(grams.size());
    Matrix x = Matrix::Zero(J, prob.width() * K);
    if (warm_start) {
        if (warm_start->size() != grams.size()) throw ConfigError("spg_fit: warm start has wrong class count");
        x = prob.pack(*warm_start);
    }

    double fx = prob.smooth_value(x) + prob.lasso(x);
    if (!std::isfinite(fx)) throw NumericError("spg_fit: non-finite objective at the starting point");

    SpgResult res;
    Matrix y = x, grad, z, xprev;
    bool y_is_x = true;
    double t = 1.0;
    double lip = 1.0 / opts.initial_step;

    for (int it = 1; it <= opts.max_iterations; ++it) {
        res.iterations = it;
        const double fy = prob.smooth_value_grad(y, grad);
        lip *= opts.shrink;  // let the step grow back
        double fz = 0.0;
        for (;;) {
            z = y - grad / lip;
            const double thr = lambda1 / lip;
            if (thr > 0.0) z = z.unaryExpr([thr](double v) { return soft_threshold(v, thr); });
            fz = prob.smooth_value(z);
            const Matrix dz = z - y;
            const double model = fy + grad.cwiseProduct(dz).sum() + 0.5 * lip * dz.squaredNorm();
            if (fz <= model + 1e-12 * std::abs(fy)) break;
            lip /= opts.shrink;
            if (!std::isfinite(lip) || lip > 1e300)
                throw NumericError("spg_fit: line search failed (step underflow)");
        }
        const double Fz = fz + prob.lasso(z);
        if (!std::isfinite(Fz)) throw NumericError("spg_fit: non-finite objective (diverging step)");

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (Fz <= fx) {
            const double rel_obj = (fx - Fz) / std::max(1.0, std::abs(fx));
            const double rel_x = (z - x).norm() / std::max(1.0, x.norm());
            xprev = x;
            x = z;
            fx = Fz;
            y = x + ((t - 1.0) / t_next) * (x - xprev);
            y_is_x = (t <= 1.0);
            t = t_next;
            if (opts.record_trace) res.trace.push_back({it, fx, 1.0 / lip});
            if (rel_obj < opts.tolerance && rel_x < opts.tolerance) {
                res.converged = true;
                break;
            }
        } else {
            if (y_is_x) {
                // A plain proximal step from x cannot improve: stationary to
                // working precision.
                res.converged = true;
                break;
            }
            t = 1.0;
            y = x;
            y_is_x = true;
        }
    }
    res.coefficients = prob.unpack(x);
    res.objective = fx;
    res.exact_objective = prob.exact_value(x);
    return res;
}

inline SpgResult spg_fit(const std::vector<LaggedDesign>& designs, const std::vector<Matrix>& omegas,
                         double lambda1, double lambda2, const SpgOptions& opts,
                         const std::optional<std::vector<Matrix>>& warm_start = std::nullopt) {
    return spg_fit(make_grams(designs), omegas, lambda1, lambda2, opts, warm_start);
}

inline void write_spg_trace_csv(std::ostream& out, const std::vector<SpgTraceRow>& trace) {
    out << "iteration,objective,step\n";
    out.precision(17);
    for (const auto& r : trace) out << r.iteration << ',' << r.objective << ',' << r.step << '\n';
}

}  // namespace mcvar
