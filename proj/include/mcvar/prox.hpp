#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace mcvar {

/// sign(v) * max(|v| - t, 0)
inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

/// Exact proximal operator of the complete-graph fusion penalty:
///
///   argmin_x (rho/2) sum_k (x_k - a_k)^2 + lambda sum_{k<k'} |x_k - x_k'|.
///
/// The minimizer preserves the order of `a`. On the sorted sequence the
/// penalty is a weighted total variation with weight m(K-m) between sorted
/// positions m and m+1; under monotonicity that is linear in x, so the
/// problem reduces to isotonic regression of the shifted targets
/// a_(m) - (lambda/rho)(2m - K - 1), solved by pool-adjacent-violators.
inline std::vector<double> fused_prox_k(std::span<const double> a, double lambda, double rho) {
    const std::size_t K = a.size();
    std::vector<double> out(a.begin(), a.end());
    if (K < 2 || lambda <= 0.0) return out;
    const double shift = lambda / rho;

    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });

    // PAVA blocks: sum of inputs, sum of integer shift weights, size.
    struct Block {
        double sum;
        long long weight;
        std::size_t size;
        double mean(double shift) const {
            return (sum - shift * static_cast<double>(weight)) / static_cast<double>(size);
        }
    };
    std::vector<Block> blocks;
    blocks.reserve(K);
    for (std::size_t m = 0; m < K; ++m) {
        blocks.push_back({a[order[m]], 2 * static_cast<long long>(m + 1) - static_cast<long long>(K) - 1, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean(shift) >= blocks.back().mean(shift)) {
            const Block last = blocks.back();
            blocks.pop_back();
            blocks.back().sum += last.sum;
            blocks.back().weight += last.weight;
            blocks.back().size += last.size;
        }
    }
    std::size_t m = 0;
    for (const auto& b : blocks) {
        const double v = b.mean(shift);
        for (std::size_t i = 0; i < b.size; ++i) out[order[m++]] = v;
    }
    return out;
}

/// Proximal operator of lambda_fuse * sum_{k<k'} |x_k - x_k'| +
/// lambda_lasso * sum_k |x_k| with quadratic weight rho: fusion prox first,
/// then soft-thresholding by lambda_lasso / rho.
inline std::vector<double> fused_lasso_prox(std::span<const double> a, double lambda_lasso, double lambda_fuse,
                                            double rho) {
    auto x = fused_prox_k(a, lambda_fuse, rho);
    if (lambda_lasso > 0.0)
        for (auto& v : x) v = soft_threshold(v, lambda_lasso / rho);
    return x;
}

}  // namespace mcvar
