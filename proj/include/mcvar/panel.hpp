#pragma once

#include "mcvar/common.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace mcvar {

using Date = std::chrono::year_month_day;

/// Parse a strict ISO-8601 calendar date (YYYY-MM-DD).
inline std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::size_t pos, std::size_t len, auto& out) {
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        return ec == std::errc{} && ptr == text.data() + pos + len;
    };
    if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
    Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

inline std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

/// Identifiers shared by every panel type: class labels, typed series and
/// the calendar index. Series order is identical across classes.
struct PanelIndex {
    std::vector<std::string> classes;
    std::vector<SeriesInfo> series;
    std::vector<Date> dates;

    std::size_t num_classes() const { return classes.size(); }
    std::size_t num_series() const { return series.size(); }
    std::size_t num_dates() const { return dates.size(); }

    std::string label(std::size_t k, std::size_t j) const {
        return classes.at(k) + "/" + series.at(j).id;
    }
};

/// Raw prices. `values[k]` is T_raw x J (rows are dates).
struct PricePanel {
    PanelIndex index;
    std::vector<Matrix> values;
    std::size_t filled_cells = 0;  // cells carried forward at load time

    void validate() const;
};

/// Log-differenced but not yet standardized returns, same layout as the
/// price panel with one date fewer.
struct RawReturns {
    PanelIndex index;
    std::vector<Matrix> values;
};

/// Standardized returns: every (class, series) column has sample mean 0
/// and sample standard deviation 1. `mean[k]` / `sd[k]` hold the moments
/// removed from class k.
struct ReturnPanel {
    PanelIndex index;
    std::vector<Matrix> values;
    std::vector<Vector> mean;
    std::vector<Vector> sd;

    std::size_t num_observations() const {
        return values.empty() ? 0 : static_cast<std::size_t>(values.front().rows());
    }
    bool is_standardized(double tol = 1e-8) const;
};

inline void PricePanel::validate() const {
    const auto J = index.num_series();
    const auto T = index.num_dates();
    if (values.size() != index.num_classes())
        throw DataError("price panel: class count does not match value blocks");
    for (std::size_t i = 1; i < T; ++i)
        if (!(index.dates[i - 1] < index.dates[i]))
            throw DataError("price panel: dates must be strictly increasing");
    for (std::size_t k = 0; k < values.size(); ++k) {
        const auto& v = values[k];
        if (static_cast<std::size_t>(v.rows()) != T || static_cast<std::size_t>(v.cols()) != J)
            throw DataError("price panel: inconsistent dimensions for class " + index.classes[k]);
        for (Eigen::Index t = 0; t < v.rows(); ++t)
            for (Eigen::Index j = 0; j < v.cols(); ++j)
                if (!(std::isfinite(v(t, j)) && v(t, j) > 0.0))
                    throw DataError("non-positive price for " + index.label(k, j) + " on " +
                                    format_date(index.dates[t]));
    }
}

inline bool ReturnPanel::is_standardized(double tol) const {
    for (const auto& v : values) {
        const auto T = v.rows();
        if (T < 2) return false;
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            const double m = v.col(j).mean();
            const double var = (v.col(j).array() - m).square().sum() / static_cast<double>(T - 1);
            if (std::abs(m) > tol || std::abs(std::sqrt(var) - 1.0) > tol) return false;
        }
    }
    return true;
}

struct LoadOptions {
    bool forward_fill = false;
    /// Accepted commodity-type labels; empty accepts any non-empty label.
    std::vector<std::string> allowed_types;
    /// Name of the value column (`price` for raw input, `return` for
    /// preprocessed files).
    std::string value_column = "price";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, const std::string& where) {
    // strtod accepts "nan"/"inf"; callers reject non-finite values.
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size())
        throw DataError("unparseable number '" + tmp + "' at " + where);
    return v;
}

template <class Container, class T>
std::size_t index_of_or_append(Container& c, const T& value) {
    auto it = std::find(c.begin(), c.end(), value);
    if (it != c.end()) return static_cast<std::size_t>(it - c.begin());
    c.push_back(value);
    return c.size() - 1;
}

}  // namespace detail

/// Read a long-format panel (`date,class,series,type,<value>`). Columns may
/// appear in any order; lines starting with '#' are comments. Classes and
/// series keep their order of first appearance.
inline PricePanel load_panel(std::istream& in, const LoadOptions& opts = {}) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            auto t = detail::trim(line);
            if (t.empty() || t.front() == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line()) throw DataError("empty panel file");

    const auto header = detail::split_csv_line(line);
    auto column = [&](std::string_view name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_date = column("date"), c_class = column("class"),
                      c_series = column("series"), c_type = column("type"),
                      c_value = column(opts.value_column);

    PricePanel panel;
    auto& idx = panel.index;
    std::vector<std::string> series_ids;
    std::map<std::string, std::string> series_type;
    std::vector<std::vector<bool>> present;  // [class][series]
    std::map<std::tuple<std::size_t, std::size_t, Date>, double> cells;

    while (next_line()) {
        const auto f = detail::split_csv_line(line);
        const std::string where = "line " + std::to_string(line_no);
        if (f.size() != header.size()) throw DataError("wrong field count at " + where);
        auto date = parse_date(f[c_date]);
        if (!date) throw DataError("unparseable date '" + std::string(f[c_date]) + "' at " + where);
        const std::string cls(f[c_class]), sid(f[c_series]), type(f[c_type]);
        if (cls.empty() || sid.empty()) throw DataError("empty class or series at " + where);
        if (type.empty() ||
            (!opts.allowed_types.empty() &&
             std::find(opts.allowed_types.begin(), opts.allowed_types.end(), type) ==
                 opts.allowed_types.end()))
            throw DataError("unknown commodity type '" + type + "' at " + where);
        const double value = detail::parse_double(f[c_value], where);
        if (!std::isfinite(value)) throw DataError("non-finite value at " + where);
        if (opts.value_column == "price" && value <= 0.0)
            throw DataError("non-positive price for " + cls + "/" + sid + " at " + where);

        auto [it, inserted] = series_type.emplace(sid, type);
        if (!inserted && it->second != type)
            throw DataError("series " + sid + " has conflicting types '" + it->second + "' and '" +
                            type + "'");
        const auto k = detail::index_of_or_append(idx.classes, cls);
        const auto j = detail::index_of_or_append(series_ids, sid);
        if (present.size() <= k) present.resize(k + 1);
        if (present[k].size() <= j) present[k].resize(j + 1, false);
        present[k][j] = true;
        if (!cells.emplace(std::make_tuple(k, j, *date), value).second)
            throw DataError("duplicate cell " + cls + "/" + sid + " on " + std::string(f[c_date]));
    }
    if (idx.classes.empty()) throw DataError("panel has no data rows");

    const std::size_t K = idx.classes.size(), J = series_ids.size();
    for (std::size_t k = 0; k < K; ++k) {
        present[k].resize(J, false);
        for (std::size_t j = 0; j < J; ++j)
            if (!present[k][j])
                throw DataError("inconsistent series set: class " + idx.classes[k] + " lacks series " +
                                series_ids[j]);
    }
    for (const auto& sid : series_ids) idx.series.push_back({sid, series_type[sid]});

    for (const auto& [key, v] : cells) idx.dates.push_back(std::get<2>(key));
    std::sort(idx.dates.begin(), idx.dates.end());
    idx.dates.erase(std::unique(idx.dates.begin(), idx.dates.end()), idx.dates.end());
    const std::size_t T = idx.dates.size();

    panel.values.assign(K, Matrix::Constant(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(J),
                                            std::numeric_limits<double>::quiet_NaN()));
    std::map<Date, std::size_t> date_pos;
    for (std::size_t t = 0; t < T; ++t) date_pos[idx.dates[t]] = t;
    for (const auto& [key, v] : cells) {
        const auto& [k, j, d] = key;
        panel.values[k](static_cast<Eigen::Index>(date_pos[d]), static_cast<Eigen::Index>(j)) = v;
    }

    for (std::size_t k = 0; k < K; ++k) {
        auto& v = panel.values[k];
        for (Eigen::Index j = 0; j < v.cols(); ++j)
            for (Eigen::Index t = 0; t < v.rows(); ++t) {
                if (!std::isnan(v(t, j))) continue;
                const std::string cell = idx.label(k, static_cast<std::size_t>(j)) + " on " +
                                         format_date(idx.dates[static_cast<std::size_t>(t)]);
                if (!opts.forward_fill) throw DataError("missing cell " + cell);
                if (t == 0) throw DataError("missing leading cell " + cell + " cannot be forward-filled");
                v(t, j) = v(t - 1, j);
                ++panel.filled_cells;
            }
    }
    return panel;
}

inline PricePanel load_panel(const std::string& path, const LoadOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return load_panel(in, opts);
}

/// r_t = ln(p_t / p_{t-1}) for every series; drops the first date.
inline RawReturns log_diff(const PricePanel& panel) {
    panel.validate();
    if (panel.index.num_dates() < 2) throw DataError("log_diff needs at least two dates");
    RawReturns out;
    out.index = panel.index;
    out.index.dates.erase(out.index.dates.begin());
    for (const auto& p : panel.values) {
        const auto T = p.rows();
        out.values.push_back((p.bottomRows(T - 1).array() / p.topRows(T - 1).array()).log().matrix());
    }
    return out;
}

struct StandardizedSeries {
    Vector values;
    double mean = 0.0;
    double sd = 0.0;
};

/// Centre and scale one series to sample mean 0 and sample sd 1 (divisor
/// n - 1). `name` only decorates the error message.
inline StandardizedSeries standardize_series(const Eigen::Ref<const Vector>& x,
                                             const std::string& name = "series") {
    const auto n = x.size();
    if (n < 2) throw DataError("standardize: " + name + " has fewer than two observations");
    StandardizedSeries s;
    s.mean = x.mean();
    s.sd = std::sqrt((x.array() - s.mean).square().sum() / static_cast<double>(n - 1));
    if (!(s.sd > 1e-12)) throw DataError("zero-variance series " + name);
    s.values = (x.array() - s.mean) / s.sd;
    return s;
}

inline ReturnPanel standardize(const RawReturns& raw) {
    ReturnPanel out;
    out.index = raw.index;
    for (std::size_t k = 0; k < raw.values.size(); ++k) {
        const auto& v = raw.values[k];
        Matrix z(v.rows(), v.cols());
        Vector m(v.cols()), sd(v.cols());
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            auto s = standardize_series(v.col(j), raw.index.label(k, static_cast<std::size_t>(j)));
            z.col(j) = s.values;
            m(j) = s.mean;
            sd(j) = s.sd;
        }
        out.values.push_back(std::move(z));
        out.mean.push_back(std::move(m));
        out.sd.push_back(std::move(sd));
    }
    return out;
}

inline ReturnPanel standardize(const ReturnPanel& panel) {
    return standardize(RawReturns{panel.index, panel.values});
}

/// Write returns in the long schema with a `return` value column. Values are
/// printed with round-trip precision.
inline void write_returns_csv(std::ostream& out, const ReturnPanel& panel) {
    out << "date,class,series,type,return\n";
    char buf[40];
    const auto& idx = panel.index;
    for (std::size_t k = 0; k < idx.num_classes(); ++k)
        for (std::size_t j = 0; j < idx.num_series(); ++j)
            for (std::size_t t = 0; t < idx.num_dates(); ++t) {
                std::snprintf(buf, sizeof buf, "%.17g",
                              panel.values[k](static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)));
                out << format_date(idx.dates[t]) << ',' << idx.classes[k] << ',' << idx.series[j].id
                    << ',' << idx.series[j].type << ',' << buf << '\n';
            }
}

/// Read a preprocessed returns file. The stored moments are not part of the
/// file; they are recomputed (mean 0, sd 1 for a standardized file).
inline ReturnPanel load_returns(std::istream& in) {
    LoadOptions opts;
    opts.value_column = "return";
    PricePanel p = load_panel(in, opts);
    ReturnPanel out;
    out.index = std::move(p.index);
    out.values = std::move(p.values);
    for (const auto& v : out.values) {
        Vector m = v.colwise().mean().transpose();
        Vector sd(v.cols());
        for (Eigen::Index j = 0; j < v.cols(); ++j)
            sd(j) = std::sqrt((v.col(j).array() - m(j)).square().sum() /
                              static_cast<double>(std::max<Eigen::Index>(v.rows() - 1, 1)));
        out.mean.push_back(std::move(m));
        out.sd.push_back(std::move(sd));
    }
    return out;
}

inline ReturnPanel load_returns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return load_returns(in);
}

}  // namespace mcvar
