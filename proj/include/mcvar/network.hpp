#pragma once

#include "mcvar/common.hpp"
#include "mcvar/model.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mcvar {

struct Edge {
    int source = 0;  // affecting series i
    int target = 0;  // affected series j
    double weight = 0.0;

    int sign() const { return weight > 0.0 ? 1 : -1; }
};

/// Directed commodity-effect network of one class. No self-loops; an edge
/// is present iff its weight is nonzero.
struct EffectNetwork {
    std::string class_id;
    std::vector<SeriesInfo> nodes;
    std::vector<Edge> edges;
    /// (source, target) pairs with nonzero lag coefficients whose sum over
    /// lags is exactly zero.
    std::vector<std::pair<int, int>> cancelled;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
};

/// Edge i -> j iff sum_p B_p(j, i) != 0 for i != j; the weight is that sum.
inline EffectNetwork build_network(const MultiClassVarFit& fit, std::size_t k) {
    if (k >= fit.num_classes()) throw ConfigError("build_network: class index out of range");
    EffectNetwork net;
    net.class_id = k < fit.classes.size() ? fit.classes[k] : "C" + std::to_string(k + 1);
    const auto J = fit.num_series();
    if (static_cast<Eigen::Index>(fit.series.size()) == J) {
        net.nodes = fit.series;
    } else {
        for (Eigen::Index j = 0; j < J; ++j) net.nodes.push_back({"S" + std::to_string(j + 1), ""});
    }
    Matrix total = Matrix::Zero(J, J);
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> any = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(J, J, false);
    for (int p = 1; p <= fit.lag_order; ++p) {
        const Matrix b = fit.lag_block(k, p);
        total += b;
        any = any || (b.array() != 0.0);
    }
    for (Eigen::Index i = 0; i < J; ++i)
        for (Eigen::Index j = 0; j < J; ++j) {
            if (i == j) continue;
            const double w = total(j, i);
            if (w != 0.0)
                net.edges.push_back({static_cast<int>(i), static_cast<int>(j), w});
            else if (any(j, i))
                net.cancelled.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    return net;
}

inline std::vector<EffectNetwork> build_networks(const MultiClassVarFit& fit) {
    std::vector<EffectNetwork> out;
    for (std::size_t k = 0; k < fit.num_classes(); ++k) out.push_back(build_network(fit, k));
    return out;
}

struct Connectedness {
    Vector in;     // nu_i / nu_max
    Vector out;    // eta_i / eta_max
    Vector total;  // mu_i / mu_max
};

/// In-, out- and total-degree, each divided by its maximum over the class's
/// nodes. A measure whose maximum is zero is reported as all zeros.
inline Connectedness connectedness(const EffectNetwork& net) {
    const int J = net.num_nodes();
    Vector in = Vector::Zero(J), out = Vector::Zero(J);
    for (const auto& e : net.edges) {
        if (e.source == e.target) continue;
        in(e.target) += 1.0;
        out(e.source) += 1.0;
    }
    const Vector total = in + out;
    auto scale = [](const Vector& v) -> Vector {
        const double m = v.size() ? v.maxCoeff() : 0.0;
        return m > 0.0 ? Vector(v / m) : Vector(Vector::Zero(v.size()));
    };
    return {scale(in), scale(out), scale(total)};
}

/// Row-major K x K table; std::nullopt marks a class without edges.
using SharedEffects = std::vector<std::vector<std::optional<double>>>;

/// Entry (a, b): share of the edges of class a that are also edges of
/// class b, comparing (source, target) pairs.
inline SharedEffects shared_effects(const std::vector<EffectNetwork>& nets) {
    std::vector<std::set<std::pair<int, int>>> sets;
    for (const auto& n : nets) {
        if (n.nodes.size() != nets.front().nodes.size() ||
            !std::equal(n.nodes.begin(), n.nodes.end(), nets.front().nodes.begin(),
                        [](const SeriesInfo& a, const SeriesInfo& b) { return a.id == b.id; }))
            throw DataError("shared_effects: networks have different node sets");
        std::set<std::pair<int, int>> s;
        for (const auto& e : n.edges) s.emplace(e.source, e.target);
        sets.push_back(std::move(s));
    }
    SharedEffects out(nets.size(), std::vector<std::optional<double>>(nets.size()));
    for (std::size_t a = 0; a < sets.size(); ++a) {
        if (sets[a].empty()) continue;
        for (std::size_t b = 0; b < sets.size(); ++b) {
            const auto common = std::count_if(sets[a].begin(), sets[a].end(),
                                              [&](const auto& e) { return sets[b].count(e) > 0; });
            out[a][b] = static_cast<double>(common) / static_cast<double>(sets[a].size());
        }
    }
    return out;
}

struct TypeEffects {
    std::vector<std::string> types;
    Matrix counts;       // edges from type a (row) to type b (column)
    Matrix possible;     // m_a m_b, or m_a (m_a - 1) on the diagonal
    Matrix proportions;  // counts / possible, 0 where nothing is possible
};

/// Distinct node types in order of first appearance.
inline std::vector<std::string> node_types(const EffectNetwork& net) {
    std::vector<std::string> out;
    for (const auto& n : net.nodes)
        if (std::find(out.begin(), out.end(), n.type) == out.end()) out.push_back(n.type);
    return out;
}

/// Within-type (diagonal) and spillover (off-diagonal) edge proportions.
/// `types` fixes the row/column order; empty means order of appearance.
inline TypeEffects type_effects(const EffectNetwork& net, std::vector<std::string> types = {}) {
    if (types.empty()) types = node_types(net);
    std::vector<int> node_type;
    for (const auto& n : net.nodes) {
        auto it = std::find(types.begin(), types.end(), n.type);
        if (n.type.empty() || it == types.end()) throw DataError("type_effects: untyped node " + n.id);
        node_type.push_back(static_cast<int>(it - types.begin()));
    }
    const auto T = static_cast<Eigen::Index>(types.size());
    TypeEffects te;
    te.types = types;
    te.counts = Matrix::Zero(T, T);
    te.possible = Matrix::Zero(T, T);
    te.proportions = Matrix::Zero(T, T);
    Vector members = Vector::Zero(T);
    for (int t : node_type) members(t) += 1.0;
    for (Eigen::Index a = 0; a < T; ++a)
        for (Eigen::Index b = 0; b < T; ++b)
            te.possible(a, b) = a == b ? members(a) * (members(a) - 1.0) : members(a) * members(b);
    for (const auto& e : net.edges) {
        if (e.source == e.target) continue;
        te.counts(node_type[static_cast<std::size_t>(e.source)], node_type[static_cast<std::size_t>(e.target)]) += 1.0;
    }
    for (Eigen::Index a = 0; a < T; ++a)
        for (Eigen::Index b = 0; b < T; ++b)
            if (te.possible(a, b) > 0.0) te.proportions(a, b) = te.counts(a, b) / te.possible(a, b);
    return te;
}

}  // namespace mcvar
