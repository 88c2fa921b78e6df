// Generated by tools/gen_adf_table.py from data/adf_tau_constant.csv.
#pragma once

#include <array>

namespace mcvar::detail {

inline constexpr std::array<double, 20> kAdfProbs{
    0.001, 0.005, 0.01, 0.025, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.975, 0.99, 0.995, 0.999};

inline constexpr std::array<double, 6> kAdfSampleSizes{
    25, 50, 100, 250, 500, 1000};

// Quantiles of the Dickey-Fuller tau statistic (constant, no trend);
// one row per sample size, one column per probability.
inline constexpr std::array<std::array<double, 20>, 6> kAdfQuantiles{{
    {-4.7299, -4.0227, -3.7244, -3.3240, -2.9898, -2.6314, -2.4057, -2.2344, -1.9646, -1.7400, -1.5357, -1.3286, -1.0983, -0.8044, -0.3722, -0.0029, 0.3269, 0.7036, 0.9708, 1.5489},
    {-4.3468, -3.8105, -3.5721, -3.2171, -2.9202, -2.5988, -2.3905, -2.2280, -1.9675, -1.7500, -1.5515, -1.3496, -1.1264, -0.8412, -0.4149, -0.0432, 0.2803, 0.6586, 0.9211, 1.4704},
    {-4.2334, -3.7222, -3.5003, -3.1656, -2.8900, -2.5788, -2.3762, -2.2176, -1.9676, -1.7571, -1.5596, -1.3592, -1.1341, -0.8492, -0.4209, -0.0559, 0.2602, 0.6147, 0.8563, 1.4057},
    {-4.1257, -3.6818, -3.4672, -3.1486, -2.8806, -2.5742, -2.3750, -2.2199, -1.9696, -1.7596, -1.5638, -1.3631, -1.1400, -0.8563, -0.4283, -0.0686, 0.2455, 0.6215, 0.8763, 1.3946},
    {-4.1421, -3.6552, -3.4459, -3.1309, -2.8707, -2.5708, -2.3765, -2.2216, -1.9729, -1.7630, -1.5653, -1.3665, -1.1447, -0.8676, -0.4412, -0.0763, 0.2361, 0.6074, 0.8681, 1.3611},
    {-4.1102, -3.6455, -3.4367, -3.1202, -2.8578, -2.5621, -2.3664, -2.2152, -1.9702, -1.7622, -1.5665, -1.3661, -1.1439, -0.8615, -0.4370, -0.0808, 0.2338, 0.6061, 0.8507, 1.3692},
}};

}  // namespace mcvar::detail
