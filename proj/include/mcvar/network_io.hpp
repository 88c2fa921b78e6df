#pragma once

#include "mcvar/network.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace mcvar {

namespace detail {

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

}  // namespace detail

inline double max_abs_weight(const std::vector<EffectNetwork>& nets) {
    double m = 0.0;
    for (const auto& n : nets)
        for (const auto& e : n.edges) m = std::max(m, std::abs(e.weight));
    return m;
}

/// Graphviz digraph. Edge width is 0.5 + 3.5 |w| / max_abs (range [0.5, 4]);
/// positive effects are blue, negative ones red.
inline void write_dot(std::ostream& out, const EffectNetwork& net, double max_abs) {
    out << "digraph " << detail::quoted(net.class_id) << " {\n";
    for (const auto& n : net.nodes)
        out << "  " << detail::quoted(n.id) << " [type=" << detail::quoted(n.type) << "];\n";
    char w[40];
    for (const auto& e : net.edges) {
        const double pen = max_abs > 0.0 ? 0.5 + 3.5 * std::abs(e.weight) / max_abs : 4.0;
        std::snprintf(w, sizeof w, "%.17g", e.weight);
        out << "  " << detail::quoted(net.nodes[static_cast<std::size_t>(e.source)].id) << " -> "
            << detail::quoted(net.nodes[static_cast<std::size_t>(e.target)].id) << " [weight=\"" << w
            << "\", penwidth=" << detail::fixed(pen, 3) << ", color=" << (e.weight > 0.0 ? "blue" : "red")
            << "];\n";
    }
    out << "}\n";
}

inline nlohmann::ordered_json network_to_json(const EffectNetwork& net) {
    nlohmann::ordered_json doc;
    doc["class"] = net.class_id;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : net.nodes) doc["nodes"].push_back({{"id", n.id}, {"type", n.type}});
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : net.edges)
        doc["edges"].push_back({{"source", net.nodes[static_cast<std::size_t>(e.source)].id},
                                {"target", net.nodes[static_cast<std::size_t>(e.target)].id},
                                {"weight", e.weight},
                                {"sign", e.sign()}});
    return doc;
}

enum class ConnectednessKind { in, out, total };

/// Rows are commodities, columns are classes.
inline void write_connectedness_csv(std::ostream& out, const std::vector<EffectNetwork>& nets,
                                    ConnectednessKind kind) {
    out << "series,type";
    for (const auto& n : nets) out << ',' << n.class_id;
    out << '\n';
    std::vector<Vector> cols;
    for (const auto& n : nets) {
        auto c = connectedness(n);
        cols.push_back(kind == ConnectednessKind::in ? c.in : kind == ConnectednessKind::out ? c.out : c.total);
    }
    const auto& nodes = nets.front().nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out << nodes[i].id << ',' << nodes[i].type;
        for (const auto& c : cols) out << ',' << detail::fixed(c(static_cast<Eigen::Index>(i)), 4);
        out << '\n';
    }
}

/// Rows: the class whose edges are counted; columns: the class they are
/// looked up in. Classes without edges produce "NA" rows.
inline void write_shared_effects_csv(std::ostream& out, const std::vector<EffectNetwork>& nets) {
    const auto table = shared_effects(nets);
    out << "class";
    for (const auto& n : nets) out << ',' << n.class_id;
    out << '\n';
    for (std::size_t a = 0; a < nets.size(); ++a) {
        out << nets[a].class_id;
        for (const auto& v : table[a]) out << ',' << (v ? detail::fixed(*v, 2) : std::string("NA"));
        out << '\n';
    }
}

inline void write_type_effects_csv(std::ostream& out, const TypeEffects& te) {
    out << "from\\to";
    for (const auto& t : te.types) out << ',' << t;
    out << '\n';
    for (std::size_t a = 0; a < te.types.size(); ++a) {
        out << te.types[a];
        for (std::size_t b = 0; b < te.types.size(); ++b)
            out << ',' << detail::fixed(te.proportions(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), 2);
        out << '\n';
    }
}

}  // namespace mcvar
