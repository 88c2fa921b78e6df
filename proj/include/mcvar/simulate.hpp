#pragma once

#include "mcvar/common.hpp"
#include "mcvar/model.hpp"
#include "mcvar/panel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace mcvar {

using SupportMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Data-generating parameters: per-class J x (J*P) coefficients (same layout
/// as MultiClassVarFit) and innovation covariances.
struct VarTruth {
    std::vector<Matrix> coefficients;
    std::vector<Matrix> covariances;

    int lag_order() const {
        const auto& b = coefficients.at(0);
        return static_cast<int>(b.cols() / b.rows());
    }
};

struct SimulatedPanel {
    std::vector<Matrix> values;        // per class, T x J, not standardized
    std::vector<SupportMask> support;  // per class, nonzero pattern of B
};

/// Spectral radius of the VAR companion matrix.
inline double companion_spectral_radius(const Matrix& b) {
    const auto J = b.rows();
    const auto JP = b.cols();
    Matrix c = Matrix::Zero(JP, JP);
    c.topRows(J) = b;
    if (JP > J) c.bottomLeftCorner(JP - J, JP - J).setIdentity();
    Eigen::EigenSolver<Matrix> es(c, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Iterate y_t = sum_p B_p y_{t-p} + e_t with e_t ~ N(0, Sigma), discarding a
/// 200-step burn-in. The generator is owned by the call, so a fixed seed
/// gives bit-identical output.
inline SimulatedPanel simulate_panel(const VarTruth& truth, int T, std::uint64_t seed) {
    constexpr int kBurnIn = 200;
    const auto K = truth.coefficients.size();
    if (K == 0 || truth.covariances.size() != K) throw ConfigError("simulate: class count mismatch");
    if (T < 1) throw ConfigError("simulate: T must be positive");
    const auto J = truth.coefficients[0].rows();
    const int P = truth.lag_order();
    if (truth.coefficients[0].cols() != J * P) throw ConfigError("simulate: coefficient shape");

    std::vector<Matrix> chol;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& b = truth.coefficients[k];
        if (b.rows() != J || b.cols() != J * P) throw ConfigError("simulate: coefficient shapes differ");
        if (companion_spectral_radius(b) >= 1.0)
            throw ConfigError("simulate: unstable coefficients for class " + std::to_string(k) +
                              " (companion spectral radius >= 1)");
        Eigen::LLT<Matrix> llt(truth.covariances[k]);
        if (truth.covariances[k].rows() != J || llt.info() != Eigen::Success)
            throw ConfigError("simulate: covariance of class " + std::to_string(k) +
                              " is not positive definite");
        chol.push_back(llt.matrixL());
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SimulatedPanel out;
    const int total = kBurnIn + T;
    for (std::size_t k = 0; k < K; ++k) {
        const auto& b = truth.coefficients[k];
        Matrix y = Matrix::Zero(total + P, J);
        Vector z(J);
        for (int t = P; t < total + P; ++t) {
            for (Eigen::Index j = 0; j < J; ++j) z(j) = normal(rng);
            Vector mean = Vector::Zero(J);
            for (int p = 1; p <= P; ++p) mean += b.middleCols(J * (p - 1), J) * y.row(t - p).transpose();
            y.row(t) = (mean + chol[k] * z).transpose();
        }
        out.values.push_back(y.bottomRows(T));
        out.support.push_back(b.array() != 0.0);
    }
    return out;
}

/// Label a simulated block with a synthetic calendar and ids, then
/// standardize it.
inline ReturnPanel to_return_panel(const SimulatedPanel& sim, PanelIndex index = {}) {
    const auto K = sim.values.size();
    const auto J = static_cast<std::size_t>(sim.values.at(0).cols());
    const auto T = static_cast<std::size_t>(sim.values.at(0).rows());
    if (index.classes.empty())
        for (std::size_t k = 0; k < K; ++k) index.classes.push_back("C" + std::to_string(k + 1));
    if (index.series.empty())
        for (std::size_t j = 0; j < J; ++j) index.series.push_back({"S" + std::to_string(j + 1), "generic"});
    if (index.dates.empty()) {
        const std::chrono::sys_days start{Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{1}}};
        for (std::size_t t = 0; t < T; ++t) index.dates.emplace_back(start + std::chrono::days{static_cast<int>(t)});
    }
    return standardize(RawReturns{std::move(index), sim.values});
}

struct TruthOptions {
    int num_classes = 3;
    int num_series = 10;
    int lag_order = 1;
    double density = 0.1;      // fraction of nonzero coefficients
    double min_abs = 0.3;      // nonzero magnitudes uniform in [min_abs, max_abs]
    double max_abs = 0.5;
    bool shared = true;        // identical coefficients in every class
    double noise_corr = 0.3;   // Sigma_ij = noise_corr^|i-j|
    double max_radius = 0.9;   // rescale coefficients above this companion radius
};

/// Random sparse, stable coefficient matrices for test fixtures.
inline VarTruth random_sparse_truth(const TruthOptions& o, std::uint64_t seed) {
    if (o.num_classes < 1 || o.num_series < 1 || o.lag_order < 1)
        throw ConfigError("truth: dimensions must be positive");
    if (!(o.density > 0.0 && o.density <= 1.0)) throw ConfigError("truth: density must be in (0, 1]");
    const int J = o.num_series, P = o.lag_order;
    const int entries = J * J * P;
    const int nnz = std::max(1, static_cast<int>(std::lround(o.density * entries)));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(o.min_abs, o.max_abs);
    std::bernoulli_distribution coin(0.5);
    auto draw = [&] {
        std::vector<int> pos(static_cast<std::size_t>(entries));
        std::iota(pos.begin(), pos.end(), 0);
        std::shuffle(pos.begin(), pos.end(), rng);
        Matrix b = Matrix::Zero(J, J * P);
        for (int s = 0; s < nnz; ++s) {
            const int e = pos[static_cast<std::size_t>(s)];
            b(e % J, e / J) = (coin(rng) ? 1.0 : -1.0) * mag(rng);
        }
        const double r = companion_spectral_radius(b);
        if (r > o.max_radius) b *= o.max_radius / r;
        return b;
    };

    VarTruth truth;
    Matrix sigma(J, J);
    for (int i = 0; i < J; ++i)
        for (int j = 0; j < J; ++j) sigma(i, j) = std::pow(o.noise_corr, std::abs(i - j));
    Matrix shared = draw();
    for (int k = 0; k < o.num_classes; ++k) {
        truth.coefficients.push_back(o.shared ? shared : (k == 0 ? shared : draw()));
        truth.covariances.push_back(sigma);
    }
    return truth;
}

}  // namespace mcvar
