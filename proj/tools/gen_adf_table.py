#!/usr/bin/env python3
"""Simulate finite-sample quantiles of the Dickey-Fuller tau statistic
(regression with constant, no trend) and write them as a CSV table.

    python3 tools/gen_adf_table.py > data/adf_tau_constant.csv
    python3 tools/gen_adf_table.py --header data/adf_tau_constant.csv \
        > include/mcvar/detail/adf_table.hpp
"""
import sys
import numpy as np

SAMPLE_SIZES = [25, 50, 100, 250, 500, 1000]
PROBS = [0.001, 0.005, 0.01, 0.025, 0.05, 0.10, 0.15, 0.20, 0.30, 0.40, 0.50,
         0.60, 0.70, 0.80, 0.90, 0.95, 0.975, 0.99, 0.995, 0.999]
REPS = 200_000
CHUNK = 10_000


def tau_draws(n, reps, rng):
    out = np.empty(reps)
    for start in range(0, reps, CHUNK):
        m = min(CHUNK, reps - start)
        y = np.cumsum(rng.standard_normal((m, n + 1)), axis=1)
        dy = np.diff(y, axis=1)
        ylag = y[:, :-1]
        x = ylag - ylag.mean(axis=1, keepdims=True)
        d = dy - dy.mean(axis=1, keepdims=True)
        sxx = np.sum(x * x, axis=1)
        phi = np.sum(x * d, axis=1) / sxx
        resid = d - phi[:, None] * x
        s2 = np.sum(resid * resid, axis=1) / (n - 2)
        out[start:start + m] = phi / np.sqrt(s2 / sxx)
    return out


def emit_header(csv_path):
    rows = [line.strip().split(",") for line in open(csv_path) if line.strip()]
    probs, body = rows[0][1:], rows[1:]
    print("// Generated by tools/gen_adf_table.py from data/adf_tau_constant.csv.")
    print("#pragma once\n\n#include <array>\n\nnamespace mcvar::detail {\n")
    print(f"inline constexpr std::array<double, {len(probs)}> kAdfProbs{{")
    print("    " + ", ".join(probs) + "};\n")
    print(f"inline constexpr std::array<double, {len(body)}> kAdfSampleSizes{{")
    print("    " + ", ".join(r[0] for r in body) + "};\n")
    print("// Quantiles of the Dickey-Fuller tau statistic (constant, no trend);")
    print("// one row per sample size, one column per probability.")
    print(f"inline constexpr std::array<std::array<double, {len(probs)}>, {len(body)}> kAdfQuantiles{{{{")
    for r in body:
        print("    {" + ", ".join(r[1:]) + "},")
    print("}};\n\n}  // namespace mcvar::detail")


def main():
    if len(sys.argv) == 3 and sys.argv[1] == "--header":
        emit_header(sys.argv[2])
        return
    rng = np.random.default_rng(20131101)
    print("n," + ",".join(f"{p:g}" for p in PROBS))
    for n in SAMPLE_SIZES:
        q = np.quantile(tau_draws(n, REPS, rng), PROBS)
        print(f"{n}," + ",".join(f"{v:.4f}" for v in q))


if __name__ == "__main__":
    main()
