// mcvar: preprocess price panels, fit sparse multi-class VAR models and
// export commodity-effect networks.

#include "mcvar/mcvar.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace mcvar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;

void log(const std::string& msg) { std::cerr << "mcvar: " << msg << '\n'; }

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, sep);)
        if (!trim(item).empty()) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number '" + s + "' for " + what);
    }
}

// Flat key=value file; '#' starts a comment line.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::map<std::string, std::string> out;
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

// Options the user did not pass take their value from the config file.
void apply_config(CLI::App& sub, const std::string& path) {
    if (path.empty()) return;
    auto cfg = read_config(path);
    for (CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        auto it = cfg.find(name);
        if (it == cfg.end()) continue;
        if (opt->count() == 0) {
            for (const auto& v : opt->get_items_expected_max() > 1 ? split(it->second, ',')
                                                                    : std::vector<std::string>{it->second})
                opt->add_result(v);
            opt->run_callback();
        }
        cfg.erase(it);
    }
    cfg.erase("config");
    if (!cfg.empty()) throw ConfigError("unknown config key '" + cfg.begin()->first + "'");
}

// 64-bit FNV-1a over the effective parameters, paths excluded.
std::string config_hash(const CLI::App& sub) {
    static const std::vector<std::string> skip{"help", "input", "out-dir", "config", "threads"};
    std::string text = sub.get_name();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += r + ",";
        } else {
            value = opt->get_default_str();
        }
        text += ";" + name + "=" + value;
    }
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void require_path(const std::string& value, const char* flag) {
    if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

class Output {
public:
    Output(const std::string& dir, std::string header) : dir_(dir), header_(std::move(header)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
    }

    std::ofstream open(const std::string& name, bool table = true) const {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
        if (table) out << header_ << '\n';
        return out;
    }

private:
    fs::path dir_;
    std::string header_;
};

std::string file_stem(const std::string& id) {
    std::string out;
    for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
    return out.empty() ? "class" : out;
}

// ---------------------------------------------------------------- preprocess

struct PreprocessArgs {
    std::string input, out_dir, config, types;
    bool forward_fill = false;
    int adf_max_lag = -1;
};

int run_preprocess(CLI::App& sub, const PreprocessArgs& a) {
    require_path(a.input, "--input");
    require_path(a.out_dir, "--out-dir");
    Output out(a.out_dir, std::string("# mcvar ") + kVersion + " config=" + config_hash(sub));
    LoadOptions lo;
    lo.forward_fill = a.forward_fill;
    lo.allowed_types = split(a.types, ',');
    const auto prices = load_panel(a.input, lo);
    if (a.forward_fill) log("forward-filled " + std::to_string(prices.filled_cells) + " missing cells");
    const auto returns = standardize(log_diff(prices));
    const auto& idx = returns.index;
    log("K=" + std::to_string(idx.num_classes()) + " J=" + std::to_string(idx.num_series()) +
        " T=" + std::to_string(returns.num_observations()));

    {
        auto f = out.open("returns.csv");
        write_returns_csv(f, returns);
    }
    {
        auto f = out.open("standardization.csv");
        f << "class,series,type,mean,sd\n";
        for (std::size_t k = 0; k < idx.num_classes(); ++k)
            for (std::size_t j = 0; j < idx.num_series(); ++j)
                f << idx.classes[k] << ',' << idx.series[j].id << ',' << idx.series[j].type << ','
                  << num(returns.mean[k](static_cast<Eigen::Index>(j))) << ','
                  << num(returns.sd[k](static_cast<Eigen::Index>(j))) << '\n';
    }

    auto adf = out.open("adf.csv");
    adf << "class,series,type,statistic,p_value,lags,nobs,reject_1,reject_5,reject_10\n";
    int tested = 0, rej1 = 0, rej5 = 0, rej10 = 0;
    const std::optional<int> max_lag = a.adf_max_lag >= 0 ? std::optional<int>(a.adf_max_lag) : std::nullopt;
    for (std::size_t k = 0; k < idx.num_classes(); ++k)
        for (std::size_t j = 0; j < idx.num_series(); ++j) {
            adf << idx.classes[k] << ',' << idx.series[j].id << ',' << idx.series[j].type << ',';
            const Vector col = returns.values[k].col(static_cast<Eigen::Index>(j));
            try {
                const auto r = adf_test(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                        max_lag);
                adf << detail::fixed(r.statistic, 4) << ',' << detail::fixed(r.p_value, 4) << ',' << r.lags << ','
                    << r.nobs << ',' << r.reject_1 << ',' << r.reject_5 << ',' << r.reject_10 << '\n';
                ++tested;
                rej1 += r.reject_1;
                rej5 += r.reject_5;
                rej10 += r.reject_10;
            } catch (const std::exception& e) {
                log("ADF skipped for " + idx.label(k, j) + ": " + e.what());
                adf << "NA,NA,NA,NA,NA,NA,NA\n";
            }
        }
    std::ostringstream summary;
    summary << "ADF unit-root rejections: " << rej1 << '/' << tested << " at 1%, " << rej5 << '/' << tested
            << " at 5%, " << rej10 << '/' << tested << " at 10%";
    std::cout << summary.str() << '\n';
    auto s = out.open("adf_summary.txt");
    s << summary.str() << '\n';
    return kExitOk;
}

// ----------------------------------------------------------------------- fit

struct FitArgs {
    std::string input, out_dir, config, grid;
    int p = 0, p_max = 4, threads = 1, outer_max = 25;
    std::uint64_t seed = 0;
    double lambda[4] = {0, 0, 0, 0};
    double tol_outer = 1e-4, mu = 1e-4;
};

PenaltyGrid parse_grid(const std::string& spec, const std::vector<ClassGram>& grams) {
    GridOptions go;
    std::vector<double> lambda1, lambda3;
    std::optional<std::vector<double>> r2, r4;
    if (spec != "default") {
        for (const auto& item : split(spec, ';')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ConfigError("grid entry '" + item + "' is not key=values");
            const std::string key = trim(item.substr(0, eq));
            std::vector<double> vals;
            for (const auto& v : split(item.substr(eq + 1), ',')) vals.push_back(to_double(v, "--grid " + key));
            if (vals.empty()) throw ConfigError("grid entry '" + key + "' has no values");
            if (key == "lambda1") lambda1 = vals;
            else if (key == "lambda2_ratio") r2 = vals;
            else if (key == "lambda3") lambda3 = vals;
            else if (key == "lambda4_ratio") r4 = vals;
            else if (key == "n_lambda1") go.num_lambda1 = static_cast<int>(vals[0]);
            else if (key == "n_lambda3") go.num_lambda3 = static_cast<int>(vals[0]);
            else if (key == "lambda1_min_ratio") go.lambda1_min_ratio = vals[0];
            else if (key == "lambda3_min_ratio") go.lambda3_min_ratio = vals[0];
            else throw ConfigError("unknown grid key '" + key + "'");
        }
    }
    if (go.num_lambda1 < 1 || go.num_lambda3 < 1) throw ConfigError("grid sizes must be >= 1");
    if (r2) go.lambda2_ratio = *r2;
    if (r4) go.lambda4_ratio = *r4;
    auto grid = default_grid(grams, go);
    if (!lambda1.empty()) grid.lambda1 = lambda1;
    if (!lambda3.empty()) grid.lambda3 = lambda3;
    return grid;
}

int run_fit(CLI::App& sub, const FitArgs& a) {
    require_path(a.input, "--input");
    require_path(a.out_dir, "--out-dir");
    const bool explicit_penalty = sub.count("--lambda1") + sub.count("--lambda2") + sub.count("--lambda3") +
                                      sub.count("--lambda4") > 0;
    if (explicit_penalty && sub.count("--grid") > 0)
        throw ConfigError("--lambda1..4 and --grid are mutually exclusive");
    if (sub.count("--p") > 0 && sub.count("--p-max") > 0) throw ConfigError("--p and --p-max are mutually exclusive");

    Output out(a.out_dir, std::string("# mcvar ") + kVersion + " config=" + config_hash(sub));
    std::ofstream logf = out.open("fit.log", false);
    auto note = [&](const std::string& m) {
        log(m);
        logf << m << '\n';
    };

    const auto panel = load_returns(a.input);
    require_standardized(panel);

    int P = a.p;
    if (sub.count("--p") == 0) {
        const auto sel = select_order(panel, a.p_max);
        P = sel.lag_order;
        auto f = out.open("order.csv");
        f << "p,bic\n";
        for (std::size_t i = 0; i < sel.bic.size(); ++i) f << i + 1 << ',' << num(sel.bic[i]) << '\n';
    }
    if (P < 1) throw ConfigError("--p must be >= 1");
    note("selected P=" + std::to_string(P));

    FitOptions opts;
    opts.outer_tolerance = a.tol_outer;
    opts.outer_max_iterations = a.outer_max;
    opts.spg.mu = a.mu;
    opts.threads = a.threads;
    opts.validate();

    MultiClassVarFit fitted;
    std::vector<SpgTraceRow> trace;
    if (explicit_penalty) {
        const PenaltyConfig pen{a.lambda[0], a.lambda[1], a.lambda[2], a.lambda[3]};
        pen.validate();
        const auto grams = make_grams(build_lagged_design(panel, P));
        auto r = alternate(grams, pen, opts);
        trace = r.last_spg_trace;
        fitted = make_fit(panel.index, P, std::move(r), pen);
    } else {
        const auto grams = make_grams(build_lagged_design(panel, P));
        const auto grid = parse_grid(a.grid.empty() ? "default" : a.grid, grams);
        note("penalty grid with " + std::to_string(grid.size()) + " points");
        auto sel = select_penalties(panel, P, grid, opts);
        auto g = out.open("grid.csv");
        g << "lambda1,lambda2,lambda3,lambda4,bic,df,nonzero,converged,selected\n";
        for (const auto& r : sel.table)
            g << num(r.penalty.lambda1) << ',' << num(r.penalty.lambda2) << ',' << num(r.penalty.lambda3) << ','
              << num(r.penalty.lambda4) << ',' << num(r.bic) << ',' << r.df << ',' << r.nonzero << ','
              << r.converged << ',' << (r.penalty == sel.penalty) << '\n';
        trace = std::move(sel.spg_trace);
        fitted = std::move(sel.fit);
    }
    const auto& pen = fitted.penalty;
    note("penalty lambda1=" + num(pen.lambda1) + " lambda2=" + num(pen.lambda2) + " lambda3=" + num(pen.lambda3) +
         " lambda4=" + num(pen.lambda4));

    {
        auto f = out.open("fit.json", false);
        write_fit_json(f, fitted);
    }
    {
        auto f = out.open("convergence.csv");
        f << "outer_iteration,objective\n";
        const auto& tr = fitted.diagnostics.objective_trace;
        for (std::size_t i = 0; i < tr.size(); ++i) f << i + 1 << ',' << num(tr[i]) << '\n';
    }
    {
        auto f = out.open("spg_trace.csv");
        write_spg_trace_csv(f, trace);
    }
    if (!fitted.diagnostics.converged) {
        note("outer iteration cap reached without convergence (" +
             std::to_string(fitted.diagnostics.outer_iterations) + " iterations)");
        return kExitNotConverged;
    }
    note("converged after " + std::to_string(fitted.diagnostics.outer_iterations) + " outer iterations");
    return kExitOk;
}

// ------------------------------------------------------------------- network

struct NetworkArgs {
    std::string input, out_dir, config;
    std::vector<std::string> formats;
};

int run_network(CLI::App& sub, const NetworkArgs& a) {
    require_path(a.input, "--input");
    require_path(a.out_dir, "--out-dir");
    bool dot = a.formats.empty(), json = a.formats.empty(), csv = a.formats.empty();
    for (const auto& f : a.formats) {
        if (f == "dot") dot = true;
        else if (f == "json") json = true;
        else if (f == "csv") csv = true;
        else throw ConfigError("unknown --format '" + f + "' (expected dot, json or csv)");
    }
    Output out(a.out_dir, std::string("# mcvar ") + kVersion + " config=" + config_hash(sub));
    const auto fitted = read_fit_json(a.input);
    const auto nets = build_networks(fitted);
    const double max_abs = max_abs_weight(nets);
    for (const auto& n : nets) {
        for (const auto& [s, t] : n.cancelled)
            log("warning: class " + n.class_id + ": effects of " + n.nodes[static_cast<std::size_t>(s)].id + " on " +
                n.nodes[static_cast<std::size_t>(t)].id + " cancel across lags");
        const std::string stem = file_stem(n.class_id);
        if (dot) {
            auto f = out.open(stem + ".dot", false);
            write_dot(f, n, max_abs);
        }
        if (json) {
            auto f = out.open(stem + ".json", false);
            f << network_to_json(n).dump(2) << '\n';
        }
    }
    if (csv) {
        const std::pair<const char*, ConnectednessKind> kinds[] = {
            {"in", ConnectednessKind::in}, {"out", ConnectednessKind::out}, {"total", ConnectednessKind::total}};
        for (const auto& [name, kind] : kinds) {
            auto f = out.open(std::string("connectedness_") + name + ".csv");
            write_connectedness_csv(f, nets, kind);
        }
        {
            auto f = out.open("shared_effects.csv");
            write_shared_effects_csv(f, nets);
        }
        const auto types = node_types(nets.front());
        for (const auto& n : nets) {
            auto f = out.open("type_effects_" + file_stem(n.class_id) + ".csv");
            write_type_effects_csv(f, type_effects(n, types));
        }
    }
    std::size_t edges = 0;
    for (const auto& n : nets) edges += n.edges.size();
    log(std::to_string(nets.size()) + " networks, " + std::to_string(edges) + " edges");
    return kExitOk;
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
    std::string out_dir, config;
    std::uint64_t seed = 1;
    int classes = 3, series = 10, p = 1, t = 500;
    double density = 0.1, noise_corr = 0.3;
    bool distinct = false;
};

int run_simulate(CLI::App& sub, const SimulateArgs& a) {
    require_path(a.out_dir, "--out-dir");
    Output out(a.out_dir, std::string("# mcvar ") + kVersion + " config=" + config_hash(sub));
    TruthOptions o;
    o.num_classes = a.classes;
    o.num_series = a.series;
    o.lag_order = a.p;
    o.density = a.density;
    o.noise_corr = a.noise_corr;
    o.shared = !a.distinct;
    if (a.t < 2) throw ConfigError("--t must be >= 2");
    const auto truth = random_sparse_truth(o, a.seed);
    const auto sim = simulate_panel(truth, a.t, a.seed + 1);

    static const char* kTypes[] = {"energy", "metal", "agriculture"};
    std::vector<std::string> classes;
    std::vector<SeriesInfo> series;
    for (int k = 0; k < a.classes; ++k) classes.push_back("C" + std::to_string(k + 1));
    for (int j = 0; j < a.series; ++j) {
        char id[16];
        std::snprintf(id, sizeof id, "S%02d", j + 1);
        series.push_back({id, kTypes[j % 3]});
    }
    const std::chrono::sys_days start{Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{1}}};
    {
        auto f = out.open("prices.csv");
        f << "date,class,series,type,price\n";
        for (int k = 0; k < a.classes; ++k)
            for (int j = 0; j < a.series; ++j) {
                double logp = std::log(100.0);
                for (int t = 0; t <= a.t; ++t) {
                    if (t > 0) logp += 0.01 * sim.values[static_cast<std::size_t>(k)](t - 1, j);
                    f << format_date(Date{start + std::chrono::days{t}}) << ',' << classes[static_cast<std::size_t>(k)]
                      << ',' << series[static_cast<std::size_t>(j)].id << ',' << series[static_cast<std::size_t>(j)].type
                      << ',' << num(std::exp(logp)) << '\n';
                }
            }
    }
    nlohmann::ordered_json doc;
    doc["seed"] = a.seed;
    doc["classes"] = classes;
    doc["series"] = nlohmann::ordered_json::array();
    for (const auto& s : series) doc["series"].push_back({{"id", s.id}, {"type", s.type}});
    doc["lag_order"] = a.p;
    doc["coefficients"] = nlohmann::ordered_json::array();
    doc["covariances"] = nlohmann::ordered_json::array();
    const auto J = static_cast<Eigen::Index>(a.series);
    for (std::size_t k = 0; k < truth.coefficients.size(); ++k) {
        nlohmann::ordered_json lags = nlohmann::ordered_json::array();
        for (int p = 0; p < a.p; ++p) {
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (Eigen::Index r = 0; r < J; ++r) {
                std::vector<double> row;
                for (Eigen::Index c = 0; c < J; ++c) row.push_back(truth.coefficients[k](r, J * p + c));
                rows.push_back(row);
            }
            lags.push_back(rows);
        }
        doc["coefficients"].push_back(lags);
        nlohmann::ordered_json cov = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < J; ++r) {
            std::vector<double> row;
            for (Eigen::Index c = 0; c < J; ++c) row.push_back(truth.covariances[k](r, c));
            cov.push_back(row);
        }
        doc["covariances"].push_back(cov);
    }
    auto f = out.open("truth.json", false);
    f << doc.dump(2) << '\n';
    log("simulated K=" + std::to_string(a.classes) + " J=" + std::to_string(a.series) + " T=" + std::to_string(a.t));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse multi-class VAR estimation and commodity-effect networks", "mcvar"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    PreprocessArgs pa;
    auto* pre = app.add_subcommand("preprocess", "Log-difference, standardize and ADF-test a price panel");
    pre->add_option("--input", pa.input, "Long-format price CSV");
    pre->add_option("--out-dir", pa.out_dir, "Output directory");
    pre->add_option("--config", pa.config, "Flat key=value configuration file");
    pre->add_flag("--forward-fill", pa.forward_fill, "Carry the last price forward into missing cells");
    pre->add_option("--types", pa.types, "Comma-separated accepted commodity types");
    pre->add_option("--adf-max-lag", pa.adf_max_lag, "Upper bound on the ADF lag order");

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Select the lag order and penalties, fit the model");
    fit_cmd->add_option("--input", fa.input, "Preprocessed returns CSV");
    fit_cmd->add_option("--out-dir", fa.out_dir, "Output directory");
    fit_cmd->add_option("--config", fa.config, "Flat key=value configuration file");
    fit_cmd->add_option("--p", fa.p, "Lag order (skips order selection)");
    fit_cmd->add_option("--p-max", fa.p_max, "Largest lag order considered by BIC");
    for (int i = 0; i < 4; ++i)
        fit_cmd->add_option("--lambda" + std::to_string(i + 1), fa.lambda[i], "Penalty weight");
    fit_cmd->add_option("--grid", fa.grid,
                        "'default' or key=v1,v2;... with keys lambda1, lambda2_ratio, lambda3, lambda4_ratio, "
                        "n_lambda1, n_lambda3, lambda1_min_ratio, lambda3_min_ratio");
    fit_cmd->add_option("--threads", fa.threads, "Worker threads for the grid search");
    fit_cmd->add_option("--seed", fa.seed, "Random seed");
    fit_cmd->add_option("--tol-outer", fa.tol_outer, "Outer relative tolerance");
    fit_cmd->add_option("--max-outer", fa.outer_max, "Outer iteration cap");
    fit_cmd->add_option("--mu", fa.mu, "Fusion smoothing parameter");

    NetworkArgs na;
    auto* net = app.add_subcommand("network", "Export networks and connectedness tables from a fit");
    net->add_option("--input", na.input, "Fit JSON");
    net->add_option("--out-dir", na.out_dir, "Output directory");
    net->add_option("--config", na.config, "Flat key=value configuration file");
    net->add_option("--format", na.formats, "dot, json or csv (repeatable; default all)");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Write a synthetic price panel with known sparse structure");
    sim->add_option("--out-dir", sa.out_dir, "Output directory");
    sim->add_option("--config", sa.config, "Flat key=value configuration file");
    sim->add_option("--seed", sa.seed, "Random seed");
    sim->add_option("--classes", sa.classes, "Number of classes");
    sim->add_option("--series", sa.series, "Number of series");
    sim->add_option("--p", sa.p, "Lag order");
    sim->add_option("--t", sa.t, "Number of returns per series");
    sim->add_option("--density", sa.density, "Fraction of nonzero coefficients");
    sim->add_option("--noise-corr", sa.noise_corr, "Innovation correlation decay");
    sim->add_flag("--distinct", sa.distinct, "Draw separate coefficients for each class");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    CLI::App* active = pre->parsed() ? pre : fit_cmd->parsed() ? fit_cmd : net->parsed() ? net : sim;
    try {
        if (pre->parsed()) {
            apply_config(*pre, pa.config);
            return run_preprocess(*pre, pa);
        }
        if (fit_cmd->parsed()) {
            apply_config(*fit_cmd, fa.config);
            return run_fit(*fit_cmd, fa);
        }
        if (net->parsed()) {
            apply_config(*net, na.config);
            return run_network(*net, na);
        }
        apply_config(*sim, sa.config);
        return run_simulate(*sim, sa);
    } catch (const ConfigError& e) {
        std::cerr << "mcvar: configuration error: " << e.what() << "\n\n" << active->help();
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        std::cerr << "mcvar: configuration error: " << e.what() << "\n\n" << active->help();
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "mcvar: data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "mcvar: numerical error: " << e.what() << '\n';
        return kExitData;
    }
}
