#include "mcvar/jgl.hpp"
#include "mcvar/model.hpp"
#include "mcvar/simulate.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace mcvar;

namespace {

std::vector<LaggedDesign> random_designs(std::mt19937_64& rng, int K, int J, int P, int T) {
    std::vector<LaggedDesign> out;
    for (int k = 0; k < K; ++k) out.push_back(build_lagged_design(oracle::random_matrix(rng, T, J), P));
    return out;
}

}  // namespace

TEST(CountParameters, Examples) {
    EXPECT_EQ(count_parameters(14, 3, 1), (ParameterCount{588, 315}));
    EXPECT_EQ(count_parameters(17, 5, 1), (ParameterCount{1445, 765}));
    EXPECT_EQ(count_parameters(1, 1, 1), (ParameterCount{1, 1}));
    EXPECT_EQ(count_parameters(4, 2, 3), (ParameterCount{96, 20}));
    EXPECT_THROW(count_parameters(0, 1, 1), ConfigError);
}

TEST(Objective, NullModelIsSumOfSquares) {
    std::mt19937_64 rng(1);
    const auto d = random_designs(rng, 3, 4, 1, 30);
    std::vector<Matrix> B(3, Matrix::Zero(4, 4)), Om(3, Matrix::Identity(4, 4));
    double ss = 0.0;
    for (const auto& x : d) ss += x.responses.squaredNorm();
    EXPECT_NEAR(objective(B, Om, d, PenaltyConfig{}), ss, 1e-10 * ss);
}

TEST(Objective, SingleClassReducesToResidualSumOfSquares) {
    std::mt19937_64 rng(2);
    const auto d = random_designs(rng, 1, 3, 2, 40);
    const Matrix b = oracle::normal_equations(d[0]);
    const double rss = (d[0].responses - d[0].predictors * b.transpose()).squaredNorm();
    EXPECT_NEAR(objective({b}, {Matrix::Identity(3, 3)}, d, PenaltyConfig{}), rss, 1e-10 * rss);
}

TEST(Objective, MatchesTermByTermSummation) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = random_designs(rng, 2, 2, 1, 6);  // N = 5
        std::vector<Matrix> B, Om;
        for (int k = 0; k < 2; ++k) {
            B.push_back(oracle::random_matrix(rng, 2, 2, 0.5));
            Om.push_back(oracle::random_spd(rng, 2));
        }
        const PenaltyConfig pen{0.7, 0.3, 0.4, 0.9};
        const double want = oracle::objective_by_terms(B, Om, d, 0.7, 0.3, 0.4, 0.9);
        EXPECT_NEAR(objective(B, Om, d, pen), want, 1e-10 * std::max(1.0, std::abs(want)));
        EXPECT_NEAR(objective(B, Om, make_grams(d), pen), want, 1e-10 * std::max(1.0, std::abs(want)));
    }
}

TEST(Objective, DecouplesWithoutFusion) {
    std::mt19937_64 rng(4);
    const auto d = random_designs(rng, 3, 3, 2, 25);
    std::vector<Matrix> B, Om;
    for (int k = 0; k < 3; ++k) {
        B.push_back(oracle::random_matrix(rng, 3, 6, 0.3));
        Om.push_back(oracle::random_spd(rng, 3));
    }
    const PenaltyConfig pen{1.3, 0.0, 0.8, 0.0};
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) sum += objective({B[k]}, {Om[k]}, {d[k]}, pen);
    EXPECT_NEAR(objective(B, Om, d, pen), sum, 1e-10 * std::abs(sum));
}

TEST(Objective, InvariantUnderSeriesPermutation) {
    std::mt19937_64 rng(5);
    const int J = 4, P = 2, K = 2;
    std::vector<Matrix> raw;
    std::vector<Matrix> B, Om;
    for (int k = 0; k < K; ++k) {
        raw.push_back(oracle::random_matrix(rng, 30, J));
        B.push_back(oracle::random_matrix(rng, J, J * P, 0.3));
        Om.push_back(oracle::random_spd(rng, J));
    }
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(J);
    perm.indices() << 2, 0, 3, 1;
    Eigen::PermutationMatrix<Eigen::Dynamic> big(J * P);
    for (int p = 0; p < P; ++p)
        for (int j = 0; j < J; ++j) big.indices()(p * J + j) = p * J + perm.indices()(j);
    std::vector<LaggedDesign> d, dp;
    std::vector<Matrix> Bp, Omp;
    for (int k = 0; k < K; ++k) {
        d.push_back(build_lagged_design(raw[k], P));
        dp.push_back(build_lagged_design(Matrix(raw[k] * perm.transpose()), P));
        Bp.push_back(perm * B[k] * big.transpose());
        Omp.push_back(perm * Om[k] * perm.transpose());
    }
    const PenaltyConfig pen{0.5, 0.2, 0.3, 0.1};
    const double a = objective(B, Om, d, pen), b = objective(Bp, Omp, dp, pen);
    EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
}

TEST(Objective, RejectsIndefinitePrecision) {
    std::mt19937_64 rng(6);
    const auto d = random_designs(rng, 1, 2, 1, 10);
    Matrix bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    EXPECT_THROW(objective({Matrix::Zero(2, 2)}, {bad}, d, PenaltyConfig{}), NumericError);
}

TEST(Simulate, WhiteNoiseHasNoAutocorrelation) {
    const int J = 3, T = 4000;
    VarTruth truth{{Matrix::Zero(J, J)}, {Matrix::Identity(J, J)}};
    const auto sim = simulate_panel(truth, T, 42);
    const Matrix& y = sim.values[0];
    for (int j = 0; j < J; ++j) {
        const Vector c = y.col(j).array() - y.col(j).mean();
        const double rho = c.head(T - 1).dot(c.tail(T - 1)) / c.squaredNorm();
        EXPECT_LT(std::abs(rho), 4.0 / std::sqrt(T));
    }
    EXPECT_FALSE(sim.support[0].any());
}

TEST(Simulate, Ar1VarianceMatchesFormula) {
    const int J = 2, T = 40000;
    VarTruth truth{{0.9 * Matrix::Identity(J, J)}, {Matrix::Identity(J, J)}};
    const auto sim = simulate_panel(truth, T, 9);
    for (int j = 0; j < J; ++j) {
        const Vector c = sim.values[0].col(j).array() - sim.values[0].col(j).mean();
        const double var = c.squaredNorm() / (T - 1);
        EXPECT_NEAR(var, 1.0 / (1.0 - 0.81), 0.1 / (1.0 - 0.81));
    }
}

TEST(Simulate, RejectsUnstableOrIndefinite) {
    VarTruth unstable{{1.05 * Matrix::Identity(2, 2)}, {Matrix::Identity(2, 2)}};
    EXPECT_THROW(simulate_panel(unstable, 10, 1), ConfigError);
    Matrix bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    VarTruth indefinite{{Matrix::Zero(2, 2)}, {bad}};
    EXPECT_THROW(simulate_panel(indefinite, 10, 1), ConfigError);
}

TEST(Simulate, BitReproducible) {
    const auto truth = random_sparse_truth(TruthOptions{}, 3);
    const auto a = simulate_panel(truth, 200, 77);
    const auto b = simulate_panel(truth, 200, 77);
    for (std::size_t k = 0; k < a.values.size(); ++k) EXPECT_EQ(a.values[k], b.values[k]);
    const auto c = simulate_panel(truth, 200, 78);
    EXPECT_NE(a.values[0], c.values[0]);
}

TEST(Simulate, ResidualCovarianceConvergesToTruth) {
    TruthOptions o;
    o.num_classes = 2;
    o.num_series = 4;
    o.lag_order = 2;
    o.density = 0.25;
    const auto truth = random_sparse_truth(o, 21);
    const auto sim = simulate_panel(truth, 20000, 5);
    std::vector<LaggedDesign> d;
    for (const auto& v : sim.values) d.push_back(build_lagged_design(v, 2));
    const auto cov = residual_covariances(truth.coefficients, d);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_LT((cov.s[k] - truth.covariances[k]).norm(), 0.1);
}

TEST(Simulate, RandomTruthIsSparseSharedAndStable) {
    const auto truth = random_sparse_truth(TruthOptions{}, 8);
    ASSERT_EQ(truth.coefficients.size(), 3u);
    EXPECT_EQ((truth.coefficients[0].array() != 0.0).count(), 10);
    EXPECT_EQ(truth.coefficients[0], truth.coefficients[2]);
    EXPECT_LE(companion_spectral_radius(truth.coefficients[0]), 0.9 + 1e-12);
}
