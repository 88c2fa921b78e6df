#pragma once

#include "mcvar/common.hpp"
#include "mcvar/design.hpp"
#include "mcvar/jgl.hpp"
#include "mcvar/model.hpp"
#include "mcvar/panel.hpp"
#include "mcvar/spg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace mcvar {

struct FitOptions {
    int outer_max_iterations = 25;
    double outer_tolerance = 1e-4;
    SpgOptions spg;
    AdmmOptions admm;
    /// Worker threads for grid search. Results do not depend on it: every
    /// grid path is computed deterministically and collected in grid order.
    int threads = 1;

    void validate() const {
        if (outer_max_iterations < 1) throw ConfigError("outer iteration cap must be >= 1");
        if (!(outer_tolerance > 0.0)) throw ConfigError("outer tolerance must be > 0");
        if (threads < 1) throw ConfigError("thread count must be >= 1");
        spg.validate();
        admm.validate();
    }
};

/// State reused between neighbouring fits of a penalty path.
struct WarmStart {
    std::vector<Matrix> coefficients;
    std::vector<Matrix> precisions;
    std::optional<AdmmState> admm;
};

struct AlternationResult {
    std::vector<Matrix> coefficients;
    std::vector<Matrix> precisions;
    FitDiagnostics diagnostics;
    AdmmState admm;
    std::vector<SpgTraceRow> last_spg_trace;
};

namespace detail {

inline double relative_change(const std::vector<Matrix>& next, const std::vector<Matrix>& prev) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
        num += (next[k] - prev[k]).squaredNorm();
        den += prev[k].squaredNorm();
    }
    return std::sqrt(num) / std::max(1.0, std::sqrt(den));
}

}  // namespace detail

/// Alternate the B-step (SPG with Omega fixed) and the Omega-step (fused
/// graphical lasso on the residual covariances) until the relative change
/// of both blocks drops below the outer tolerance.
///
/// The criterion fuses over ordered class pairs, so the Omega-step, whose
/// fusion runs over unordered pairs, receives 2 * lambda4. An Omega update
/// that would raise the criterion is rejected.
inline AlternationResult alternate(const std::vector<ClassGram>& grams, const PenaltyConfig& pen,
                                   const FitOptions& opts, const WarmStart* warm = nullptr) {
    pen.validate();
    opts.validate();
    const std::size_t K = grams.size();
    const auto J = grams.front().yy.rows();
    const auto JP = grams.front().xx.rows();

    AlternationResult res;
    std::optional<AdmmState> admm_state;
    if (warm && warm->coefficients.size() == K) {
        res.coefficients = warm->coefficients;
        res.precisions = warm->precisions;
        admm_state = warm->admm;
    } else {
        res.coefficients.assign(K, Matrix::Zero(J, JP));
        res.precisions.assign(K, Matrix::Identity(J, J));
    }

    auto& diag = res.diagnostics;
    SpgOptions spg_opts = opts.spg;
    spg_opts.record_trace = true;
    for (int it = 1; it <= opts.outer_max_iterations; ++it) {
        diag.outer_iterations = it;
        auto spg = spg_fit(grams, res.precisions, pen.lambda1, pen.lambda2, spg_opts, res.coefficients);
        res.last_spg_trace = std::move(spg.trace);

        const auto cov = residual_covariances(spg.coefficients, grams);
        auto admm = admm_fgl(cov, pen.lambda3, 2.0 * pen.lambda4, opts.admm, admm_state);
        admm_state = admm.state;

        std::vector<Matrix> omega = std::move(admm.precisions);
        double obj = objective(spg.coefficients, omega, grams, pen);
        const double obj_keep = objective(spg.coefficients, res.precisions, grams, pen);
        if (obj_keep < obj) {
            omega = res.precisions;
            obj = obj_keep;
        }

        const double change = std::max(detail::relative_change(spg.coefficients, res.coefficients),
                                       detail::relative_change(omega, res.precisions));
        res.coefficients = std::move(spg.coefficients);
        res.precisions = std::move(omega);
        diag.objective_trace.push_back(obj);
        if (change < opts.outer_tolerance) {
            diag.converged = true;
            break;
        }
    }
    if (admm_state) res.admm = *admm_state;
    return res;
}

inline MultiClassVarFit make_fit(const PanelIndex& index, int lag_order, AlternationResult&& r,
                                 const PenaltyConfig& pen) {
    MultiClassVarFit fit;
    fit.classes = index.classes;
    fit.series = index.series;
    fit.lag_order = lag_order;
    fit.coefficients = std::move(r.coefficients);
    fit.precisions = std::move(r.precisions);
    fit.penalty = pen;
    fit.diagnostics = std::move(r.diagnostics);
    return fit;
}

inline void require_standardized(const ReturnPanel& panel) {
    if (!panel.is_standardized(1e-6))
        throw DataError("input returns are not standardized (mean 0, sd 1 per series)");
}

inline MultiClassVarFit fit(const ReturnPanel& panel, int lag_order, const PenaltyConfig& pen,
                            const FitOptions& opts = {}) {
    require_standardized(panel);
    const auto grams = make_grams(build_lagged_design(panel, lag_order));
    return make_fit(panel.index, lag_order, alternate(grams, pen, opts), pen);
}

/// Smallest lambda1 for which the B-step with lambda2 = 0 and Omega = I
/// returns exactly zero: max |gradient| of the loss at B = 0, i.e.
/// max_k max |2 R_k'X_k|.
inline double lambda1_max(const std::vector<ClassGram>& grams) {
    double m = 0.0;
    for (const auto& g : grams) m = std::max(m, 2.0 * g.yx.cwiseAbs().maxCoeff());
    return m;
}

inline double lambda1_max(const ReturnPanel& panel, int lag_order) {
    return lambda1_max(make_grams(build_lagged_design(panel, lag_order)));
}

/// Smallest lambda3 making every off-diagonal element of a single-class
/// graphical lasso on the B = 0 residuals vanish: max_k n_k max_{i!=j} |S_k,ij|.
inline double lambda3_max(const std::vector<ClassGram>& grams) {
    double m = 0.0;
    for (const auto& g : grams) {
        Matrix off = g.yy;
        off.diagonal().setZero();
        m = std::max(m, off.cwiseAbs().maxCoeff());
    }
    return m;
}

struct OrderSelection {
    int lag_order = 1;
    std::vector<double> bic;  // bic[P-1]
};

/// BIC lag-order choice from unpenalized per-class least squares on the
/// common sample of N = T - P_max rows:
///   BIC(P) = sum_k N log|Sigma_k(P)| + log(N) J^2 P.
/// Ties go to the smaller order.
inline OrderSelection select_order(const ReturnPanel& panel, int max_order) {
    if (max_order < 1) throw ConfigError("P_max must be >= 1");
    const auto T = static_cast<int>(panel.num_observations());
    const auto J = static_cast<int>(panel.index.num_series());
    if (T <= max_order || T - max_order <= J * max_order)
        throw DataError("insufficient observations for order selection up to P=" + std::to_string(max_order));
    const double N = T - max_order;
    OrderSelection sel;
    double best = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= max_order; ++p) {
        double bic = 0.0;
        for (const auto& y : panel.values) {
            const auto g = make_gram(build_lagged_design(y, p, max_order));
            Eigen::LDLT<Matrix> ldlt(g.xx);
            if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
                throw NumericError("singular design in order selection");
            const Matrix b = ldlt.solve(g.yx.transpose()).transpose();
            bic += N * log_det_spd(residual_cross_product(b, g) / N) +
                   std::log(N) * static_cast<double>(J) * J * p;
        }
        sel.bic.push_back(bic);
        if (bic < best) {
            best = bic;
            sel.lag_order = p;
        }
    }
    return sel;
}

namespace detail {

// Distinct nonzero values among `vals`, merging neighbours closer than tol.
inline int count_distinct_nonzero(std::vector<double>& vals, double tol) {
    vals.erase(std::remove(vals.begin(), vals.end(), 0.0), vals.end());
    if (vals.empty()) return 0;
    std::sort(vals.begin(), vals.end());
    int groups = 1;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] - vals[i - 1] >= tol) ++groups;
    return groups;
}

}  // namespace detail

/// Degrees of freedom: for every coefficient entry and every upper-triangular
/// inverse-covariance entry, the number of distinct nonzero values across
/// classes (values closer than `merge_tol` count once).
inline int degrees_of_freedom(const std::vector<Matrix>& coefficients, const std::vector<Matrix>& precisions,
                              double merge_tol = 1e-6) {
    int df = 0;
    std::vector<double> vals;
    const auto& b0 = coefficients.front();
    for (Eigen::Index c = 0; c < b0.cols(); ++c)
        for (Eigen::Index r = 0; r < b0.rows(); ++r) {
            vals.clear();
            for (const auto& b : coefficients) vals.push_back(b(r, c));
            df += detail::count_distinct_nonzero(vals, merge_tol);
        }
    const auto J = precisions.front().rows();
    for (Eigen::Index i = 0; i < J; ++i)
        for (Eigen::Index j = i; j < J; ++j) {
            vals.clear();
            for (const auto& om : precisions) vals.push_back(om(i, j));
            df += detail::count_distinct_nonzero(vals, merge_tol);
        }
    return df;
}

struct BicValue {
    double bic = 0.0;
    int df = 0;
};

/// sum_k [N log|Sigma_k| + log(N) df_k] with Sigma_k the residual covariance
/// at the fitted coefficients and df counted jointly over classes.
inline BicValue multiclass_bic(const std::vector<Matrix>& coefficients, const std::vector<Matrix>& precisions,
                               const std::vector<ClassGram>& grams, double merge_tol = 1e-6) {
    BicValue v;
    const auto cov = residual_covariances(coefficients, grams);
    const double N = static_cast<double>(grams.front().n);
    for (const auto& s : cov.s) v.bic += N * log_det_spd(s);
    v.df = degrees_of_freedom(coefficients, precisions, merge_tol);
    v.bic += std::log(N) * v.df;
    return v;
}

/// Penalty grid. lambda2 and lambda4 are given as ratios of lambda1 and
/// lambda3; lambda1 is walked from large to small with warm starts.
struct PenaltyGrid {
    std::vector<double> lambda1;
    std::vector<double> lambda2_ratio;
    std::vector<double> lambda3;
    std::vector<double> lambda4_ratio;

    std::size_t size() const {
        return lambda1.size() * lambda2_ratio.size() * lambda3.size() * lambda4_ratio.size();
    }
    void validate() const {
        if (size() == 0) throw ConfigError("penalty grid is empty");
        for (const auto* v : {&lambda1, &lambda2_ratio, &lambda3, &lambda4_ratio})
            for (double x : *v)
                if (!std::isfinite(x) || x < 0.0) throw ConfigError("penalty grid values must be finite and >= 0");
    }
};

struct GridOptions {
    int num_lambda1 = 10;
    double lambda1_min_ratio = 0.01;
    std::vector<double> lambda2_ratio{0.0, 0.25, 0.5, 1.0, 2.0};
    int num_lambda3 = 3;
    double lambda3_min_ratio = 0.01;
    std::vector<double> lambda4_ratio{0.0, 1.0};
};

inline std::vector<double> log_spaced_descending(double hi, double min_ratio, int count) {
    std::vector<double> out;
    if (count == 1) return {hi};
    for (int i = 0; i < count; ++i)
        out.push_back(hi * std::pow(min_ratio, static_cast<double>(i) / static_cast<double>(count - 1)));
    return out;
}

/// Top of the default lambda1 path: the larger of lambda1_max and the
/// gradient bound at B = 0 under the null-model precision diag(n / yy_ii),
/// padded by 0.1%.
inline double lambda1_grid_top(const std::vector<ClassGram>& grams) {
    double m = lambda1_max(grams);
    for (const auto& g : grams) {
        const Vector w = static_cast<double>(g.n) * g.yy.diagonal().cwiseInverse();
        m = std::max(m, 2.0 * (w.asDiagonal() * g.yx).cwiseAbs().maxCoeff());
    }
    return 1.001 * m;
}

inline PenaltyGrid default_grid(const std::vector<ClassGram>& grams, const GridOptions& o = {}) {
    PenaltyGrid g;
    g.lambda1 = log_spaced_descending(lambda1_grid_top(grams), o.lambda1_min_ratio, o.num_lambda1);
    g.lambda2_ratio = o.lambda2_ratio;
    g.lambda3 = log_spaced_descending(lambda3_max(grams), o.lambda3_min_ratio, o.num_lambda3);
    g.lambda4_ratio = o.lambda4_ratio;
    return g;
}

inline PenaltyGrid default_grid(const ReturnPanel& panel, int lag_order, const GridOptions& o = {}) {
    return default_grid(make_grams(build_lagged_design(panel, lag_order)), o);
}

struct GridRow {
    PenaltyConfig penalty;
    double bic = 0.0;
    int df = 0;
    int nonzero = 0;  // nonzero coefficient entries over all classes
    bool converged = false;
};

struct PenaltySelection {
    PenaltyConfig penalty;
    MultiClassVarFit fit;
    std::vector<GridRow> table;  // grid order
    std::vector<SpgTraceRow> spg_trace;  // last B-step of the selected fit
};

/// Grid search minimizing the multi-class BIC. Each (lambda2 ratio, lambda3,
/// lambda4 ratio) combination is a path over lambda1 (descending, warm
/// started). Ties keep the earlier grid point.
inline PenaltySelection select_penalties(const ReturnPanel& panel, int lag_order, const PenaltyGrid& grid,
                                         const FitOptions& opts = {}, double merge_tol = 1e-6) {
    grid.validate();
    opts.validate();
    require_standardized(panel);
    const auto grams = make_grams(build_lagged_design(panel, lag_order));

    struct PathCombo {
        double r2, l3, r4;
    };
    std::vector<PathCombo> combos;
    for (double r2 : grid.lambda2_ratio)
        for (double l3 : grid.lambda3)
            for (double r4 : grid.lambda4_ratio) combos.push_back({r2, l3, r4});
    std::vector<double> l1 = grid.lambda1;
    std::sort(l1.begin(), l1.end(), std::greater<>());

    struct PathResult {
        std::vector<GridRow> rows;
        std::size_t best = 0;
        std::optional<AlternationResult> best_fit;
    };
    std::vector<PathResult> paths(combos.size());

    auto run_path = [&](std::size_t c) {
        const auto& cb = combos[c];
        PathResult pr;
        WarmStart warm;
        double best = std::numeric_limits<double>::infinity();
        for (double lambda1 : l1) {
            const PenaltyConfig pen{lambda1, cb.r2 * lambda1, cb.l3, cb.r4 * cb.l3};
            auto r = alternate(grams, pen, opts, warm.coefficients.empty() ? nullptr : &warm);
            const auto bic = multiclass_bic(r.coefficients, r.precisions, grams, merge_tol);
            GridRow row{pen, bic.bic, bic.df, 0, r.diagnostics.converged};
            for (const auto& b : r.coefficients) row.nonzero += static_cast<int>((b.array() != 0.0).count());
            pr.rows.push_back(row);
            warm = {r.coefficients, r.precisions, r.admm};
            if (bic.bic < best) {
                best = bic.bic;
                pr.best = pr.rows.size() - 1;
                pr.best_fit = std::move(r);
            }
        }
        paths[c] = std::move(pr);
    };

    const int workers = std::min<int>(opts.threads, static_cast<int>(combos.size()));
    if (workers <= 1) {
        for (std::size_t c = 0; c < combos.size(); ++c) run_path(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t c; (c = next.fetch_add(1)) < combos.size();) {
                    try {
                        run_path(c);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    PenaltySelection sel;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_path = 0;
    for (std::size_t c = 0; c < paths.size(); ++c) {
        const auto& row = paths[c].rows[paths[c].best];
        if (row.bic < best) {
            best = row.bic;
            best_path = c;
        }
    }
    for (auto& p : paths) sel.table.insert(sel.table.end(), p.rows.begin(), p.rows.end());
    auto& bp = paths[best_path];
    sel.penalty = bp.rows[bp.best].penalty;
    sel.spg_trace = bp.best_fit->last_spg_trace;
    sel.fit = make_fit(panel.index, lag_order, std::move(*bp.best_fit), sel.penalty);
    return sel;
}

}  // namespace mcvar
