// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "mcvar/mcvar.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace mcvar;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ReturnPanel simulated(const VarTruth& truth, int T, std::uint64_t seed) {
    return to_return_panel(simulate_panel(truth, T, seed));
}

std::vector<LaggedDesign> random_designs(std::mt19937_64& rng, int K, int J, int P, int T) {
    std::vector<LaggedDesign> d;
    for (int k = 0; k < K; ++k) d.push_back(build_lagged_design(oracle::random_matrix(rng, T, J), P));
    return d;
}

FitOptions tight_options() {
    FitOptions o;
    o.outer_tolerance = 1e-9;
    o.outer_max_iterations = 200;
    o.spg.tolerance = 1e-12;
    o.spg.max_iterations = 100000;
    o.admm.abs_tolerance = 1e-12;
    o.admm.rel_tolerance = 1e-11;
    o.admm.max_iterations = 100000;
    return o;
}

AdmmOptions tight_admm() {
    AdmmOptions o;
    o.abs_tolerance = 1e-12;
    o.rel_tolerance = 1e-10;
    o.max_iterations = 50000;
    return o;
}

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

Outcome c1_bookkeeping() {
    const auto c = count_parameters(14, 3, 1);
    return {c.coefficients == 588 && c.precision_elements == 315,
            "(" + std::to_string(c.coefficients) + ", " + std::to_string(c.precision_elements) + ")"};
}

Outcome c2_prox() {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 2.0);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::uniform_int_distribution<int> kk(1, 5);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double v = n(rng), t = u(rng);
        const double st = oracle::golden_min([&](double x) { return 0.5 * (x - v) * (x - v) + t * std::abs(x); },
                                             -20.0, 20.0);
        worst = std::max(worst, std::abs(soft_threshold(v, t) - st));

        const int K = kk(rng);
        std::vector<double> a(static_cast<std::size_t>(K));
        for (auto& x : a) x = n(rng);
        const double lf = u(rng), ll = u(rng), rho = 0.2 + u(rng);
        const auto want_f = oracle::fused_lasso_bruteforce(a, 0.0, lf, rho);
        const auto got_f = fused_prox_k(a, lf, rho);
        const auto want_fl = oracle::fused_lasso_bruteforce(a, ll, lf, rho);
        const auto got_fl = fused_lasso_prox(a, ll, lf, rho);
        for (std::size_t k = 0; k < a.size(); ++k)
            worst = std::max({worst, std::abs(got_f[k] - want_f[k]), std::abs(got_fl[k] - want_fl[k])});
    }
    return {worst <= 1e-6, "max abs error " + fmt("%.2e", worst)};
}

Outcome c3_gradients() {
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = random_designs(rng, 3, 4, 2, 20);
        std::vector<Matrix> om, b;
        for (int k = 0; k < 3; ++k) {
            om.push_back(oracle::random_spd(rng, 4));
            b.push_back(oracle::random_matrix(rng, 4, 8, 0.3));
        }
        const auto g = gls_grad(b, d, om);
        const auto fd = oracle::finite_difference(
            [&](const std::vector<Matrix>& x) { return objective(x, om, d, PenaltyConfig{}); }, b);
        worst = std::max(worst, oracle::rel_err(g, fd));

        const double l2 = 0.3, mu = 0.05;
        const auto sg = smooth_fusion_value_grad(b, l2, mu).gradient;
        const auto sfd = oracle::finite_difference(
            [&](const std::vector<Matrix>& x) { return smooth_fusion_value_grad(x, l2, mu).value; }, b);
        worst = std::max(worst, oracle::rel_err(sg, sfd));
    }
    return {worst <= 1e-5, "max relative error " + fmt("%.2e", worst)};
}

Outcome c4_reductions() {
    std::mt19937_64 rng(4);
    // (a)
    const auto one = random_designs(rng, 1, 4, 2, 80);
    const auto ols = spg_fit(one, {Matrix::Identity(4, 4)}, 0.0, 0.0, SpgOptions{});
    const double a = max_diff(ols.coefficients[0], oracle::normal_equations(one[0]));
    // (b)
    const auto grams = make_grams(random_designs(rng, 3, 4, 2, 40));
    const std::vector<Matrix> eye(3, Matrix::Identity(4, 4));
    double b = 0.0;
    for (double scale : {1.0, 1.5}) {
        const auto r = spg_fit(grams, eye, scale * lambda1_max(grams), 0.3, SpgOptions{});
        for (const auto& m : r.coefficients) b = std::max(b, m.cwiseAbs().maxCoeff());
    }
    // (c)
    TruthOptions o;
    o.num_series = 4;
    o.density = 0.25;
    o.shared = false;
    const auto panel = simulated(random_sparse_truth(o, 6), 150, 6);
    const PenaltyConfig pen{5.0, 0.0, 8.0, 0.0};
    const auto opts = tight_options();
    const auto joint = fit(panel, 1, pen, opts);
    double c = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        ReturnPanel single = panel;
        single.index.classes = {panel.index.classes[k]};
        single.values = {panel.values[k]};
        single.mean = {panel.mean[k]};
        single.sd = {panel.sd[k]};
        const auto s = fit(single, 1, pen, opts);
        c = std::max({c, max_diff(joint.coefficients[k], s.coefficients[0]),
                      max_diff(joint.precisions[k], s.precisions[0])});
    }
    return {a <= 1e-4 && b == 0.0 && c <= 1e-5,
            "(a) " + fmt("%.2e", a) + ", (b) max |B| " + fmt("%.1e", b) + ", (c) " + fmt("%.2e", c)};
}

Outcome c5_jgl() {
    std::mt19937_64 rng(5);
    double inv = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix s = oracle::random_spd(rng, 4);
        inv = std::max(inv, max_diff(admm_fgl({s}, {100.0}, 0.0, 0.0, tight_admm()).precisions[0], s.inverse()));
    }
    double kkt = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix base = oracle::random_spd(rng, 4);
        const std::vector<double> n{30.0, 40.0, 50.0};
        std::vector<Matrix> s;
        for (double nk : n) {
            const Matrix l = base.llt().matrixL();
            const Matrix x = oracle::random_matrix(rng, static_cast<int>(nk), 4) * l.transpose();
            s.push_back(x.transpose() * x / nk);
        }
        const auto r = admm_fgl(s, n, 4.0, 3.0, tight_admm());
        kkt = std::max(kkt, oracle::fgl_kkt_residual(r.precisions, s, n, 4.0, 3.0));
    }
    double theta = 0.0;
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int J = 1 + trial % 6;
        const Matrix a0 = oracle::random_matrix(rng, J, J);
        const Matrix a = 0.5 * (a0 + a0.transpose());
        const double rho = u(rng);
        const Matrix th = eigen_theta_update(a, rho);
        theta = std::max(theta, (rho * th - th.inverse() - rho * a).norm());
    }
    return {inv <= 1e-6 && kkt <= 1e-4 && theta <= 1e-8, "inverse " + fmt("%.2e", inv) + ", KKT " +
                                                             fmt("%.2e", kkt) + ", theta equation " +
                                                             fmt("%.2e", theta)};
}

Outcome c6_fusion_limit() {
    std::mt19937_64 rng(6);
    const auto d = random_designs(rng, 3, 3, 1, 60);
    std::vector<Matrix> om;
    for (int k = 0; k < 3; ++k) om.push_back(oracle::random_spd(rng, 3));
    const auto r = spg_fit(d, om, 0.0, 1e6, SpgOptions{});
    double bgap = 0.0;
    for (const auto& x : r.coefficients)
        for (const auto& y : r.coefficients) bgap = std::max(bgap, max_diff(x, y));

    std::vector<Matrix> s;
    for (int k = 0; k < 3; ++k) s.push_back(oracle::random_spd(rng, 3));
    const auto q = admm_fgl(s, {50.0, 60.0, 70.0}, 0.5, 1e6, tight_admm());
    double ogap = 0.0;
    for (const auto& x : q.precisions)
        for (const auto& y : q.precisions) ogap = std::max(ogap, max_diff(x, y));
    return {bgap < 1e-3 && ogap < 1e-6, "B discrepancy " + fmt("%.2e", bgap) + ", Omega discrepancy " +
                                            fmt("%.2e", ogap)};
}

Outcome c7_support_recovery() {
    TruthOptions o;  // K=3, J=10, P=1, shared 10% support
    double total = 0.0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto truth = random_sparse_truth(o, 7000 + static_cast<std::uint64_t>(seed));
        const auto panel = simulated(truth, 500, static_cast<std::uint64_t>(seed));
        const auto sel = select_penalties(panel, 1, default_grid(panel, 1, GridOptions{}));
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t k = 0; k < 3; ++k)
            for (Eigen::Index i = 0; i < 10; ++i)
                for (Eigen::Index j = 0; j < 10; ++j) {
                    const bool t = truth.coefficients[k](i, j) != 0.0;
                    const bool e = sel.fit.coefficients[k](i, j) != 0.0;
                    tp += t && e;
                    fp += !t && e;
                    fn += t && !e;
                }
        total += 2.0 * tp / (2.0 * tp + fp + fn);
    }
    const double mean = total / seeds;
    return {mean >= 0.8, "mean F1 " + fmt("%.3f", mean)};
}

Outcome c8_order_selection() {
    TruthOptions o;
    o.num_classes = 2;
    o.num_series = 4;
    o.density = 0.25;
    int hits1 = 0, hits2 = 0;
    for (int seed = 0; seed < 20; ++seed) {
        const auto t1 = random_sparse_truth(o, 8000 + static_cast<std::uint64_t>(seed));
        hits1 += select_order(simulated(t1, 500, static_cast<std::uint64_t>(seed)), 3).lag_order == 1;

        VarTruth t2 = t1;
        for (auto& b : t2.coefficients) {
            b = Matrix::Zero(4, 8);
            b.leftCols(4) = 0.3 * Matrix::Identity(4, 4);
            b.rightCols(4) = 0.4 * Matrix::Identity(4, 4);
        }
        hits2 += select_order(simulated(t2, 1000, static_cast<std::uint64_t>(seed)), 3).lag_order == 2;
    }
    return {hits1 >= 18 && hits2 >= 18,
            "VAR(1) " + std::to_string(hits1) + "/20, VAR(2) " + std::to_string(hits2) + "/20"};
}

Outcome c9_network_statistics() {
    auto net = [](std::vector<SeriesInfo> nodes, std::vector<std::pair<int, int>> edges) {
        EffectNetwork n;
        n.nodes = std::move(nodes);
        for (auto [s, t] : edges) n.edges.push_back({s, t, 1.0});
        return n;
    };
    std::vector<SeriesInfo> typed;
    for (int i = 0; i < 2; ++i) typed.push_back({"e" + std::to_string(i), "energy"});
    for (int i = 0; i < 5; ++i) typed.push_back({"a" + std::to_string(i), "agriculture"});
    const auto te = type_effects(net(typed, {{2, 3}, {3, 4}, {5, 6}, {6, 2}, {0, 4}}));
    const bool types = std::abs(te.proportions(1, 1) - 0.20) < 1e-12 && std::abs(te.proportions(0, 1) - 0.10) < 1e-12;

    std::vector<SeriesInfo> four;
    for (int i = 0; i < 4; ++i) four.push_back({"n" + std::to_string(i), "t"});
    const auto se = shared_effects({net(four, {{0, 1}, {1, 2}}), net(four, {{1, 2}, {2, 3}, {3, 0}})});
    const bool shared = *se[0][1] == 0.5 && std::abs(*se[1][0] - 1.0 / 3.0) < 1e-12 && *se[0][0] == 1.0;

    const auto c = connectedness(net(four, {{0, 1}, {0, 2}, {0, 3}}));
    bool star = c.out(0) == 1.0 && c.in(0) == 0.0 && c.total(0) == 1.0;
    for (int i = 1; i < 4; ++i)
        star = star && c.out(i) == 0.0 && c.in(i) == 1.0 && std::abs(c.total(i) - 1.0 / 3.0) < 1e-12;
    return {types && shared && star, std::string("type effects ") + (types ? "ok" : "wrong") + ", shared effects " +
                                         (shared ? "ok" : "wrong") + ", star graph " + (star ? "ok" : "wrong")};
}

Outcome c10_outer_monotonicity() {
    double worst = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int seed = 0; seed < 10; ++seed) {
        TruthOptions o;
        o.num_series = 5;
        const auto panel = simulated(random_sparse_truth(o, 10000 + static_cast<std::uint64_t>(seed)), 120,
                                     static_cast<std::uint64_t>(seed));
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::uniform_real_distribution<double> u(0.5, 6.0);
        FitOptions opts;
        opts.outer_tolerance = 1e-7;
        const auto f = fit(panel, 1, PenaltyConfig{u(rng), u(rng), u(rng), u(rng)}, opts);
        const double slack = smoothing_gap(3, 25, opts.spg.mu) + 1e-8;
        const auto& tr = f.diagnostics.objective_trace;
        for (std::size_t i = 1; i < tr.size(); ++i) {
            worst = std::max(worst, tr[i] - tr[i - 1]);
            ok = ok && tr[i] <= tr[i - 1] + slack;
        }
    }
    return {ok, "largest increase " + fmt("%.2e", worst)};
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(MCVAR_CLI_PATH) + " " + args + " >>" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file() || e.path().filename() == "cli.log") continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        files[fs::relative(e.path(), root).string()] = s.str();
    }
    return files;
}

Outcome c11_determinism() {
    const fs::path base = fs::temp_directory_path() / "mcvar_acceptance_e2e";
    fs::remove_all(base);
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* name : {"a", "b"}) {
        const fs::path d = base / name;
        fs::create_directories(d);
        const auto log = d / "cli.log";
        const std::string p = d.string();
        int code = run_cli("simulate --seed 11 --classes 3 --series 6 --t 300 --out-dir " + p + "/sim", log);
        if (code == 0) code = run_cli("preprocess --input " + p + "/sim/prices.csv --out-dir " + p + "/pre", log);
        if (code == 0)
            code = run_cli("fit --threads 1 --p 1 --grid default --input " + p + "/pre/returns.csv --out-dir " + p +
                               "/fit",
                           log);
        if (code == 0) code = run_cli("network --input " + p + "/fit/fit.json --out-dir " + p + "/net", log);
        if (code != 0) return {false, std::string("pipeline run ") + name + " exited " + std::to_string(code)};
        runs.push_back(snapshot(d));
    }
    fs::remove_all(base);
    const bool same = runs[0] == runs[1];
    return {same && runs[0].size() > 10, std::to_string(runs[0].size()) + " artifacts, " +
                                             (same ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"dimension bookkeeping", c1_bookkeeping},
        {"prox oracles", c2_prox},
        {"gradient check", c3_gradients},
        {"solver reductions", c4_reductions},
        {"JGL correctness", c5_jgl},
        {"fusion limit", c6_fusion_limit},
        {"support recovery", c7_support_recovery},
        {"order selection", c8_order_selection},
        {"network statistics", c9_network_statistics},
        {"outer-loop monotonicity", c10_outer_monotonicity},
        {"end-to-end determinism", c11_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
