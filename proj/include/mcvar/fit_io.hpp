#pragma once

#include "mcvar/model.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace mcvar {

/// Fit document:
///
///   { "format": "mcvar-fit", "version": 1,
///     "dimensions": {"classes": K, "series": J, "lag_order": P},
///     "classes": [...], "series": [{"id": .., "type": ..}, ...],
///     "coefficients": [class][lag][row][col],
///     "precisions_lower": [class][row][col <= row],
///     "penalty": {"lambda1": .., ..., "lambda4": ..},
///     "diagnostics": {"objective_trace": [...], "outer_iterations": n, "converged": b} }
///
/// Doubles are written in shortest round-trip form, so reading a written
/// document reproduces the fit exactly.
inline nlohmann::ordered_json fit_to_json(const MultiClassVarFit& fit) {
    using nlohmann::ordered_json;
    const auto J = fit.num_series();
    ordered_json doc;
    doc["format"] = "mcvar-fit";
    doc["version"] = 1;
    doc["dimensions"] = {{"classes", fit.num_classes()}, {"series", J}, {"lag_order", fit.lag_order}};
    doc["classes"] = fit.classes;
    doc["series"] = ordered_json::array();
    for (const auto& s : fit.series) doc["series"].push_back({{"id", s.id}, {"type", s.type}});

    doc["coefficients"] = ordered_json::array();
    for (std::size_t k = 0; k < fit.num_classes(); ++k) {
        ordered_json lags = ordered_json::array();
        for (int p = 1; p <= fit.lag_order; ++p) {
            const Matrix b = fit.lag_block(k, p);
            ordered_json rows = ordered_json::array();
            for (Eigen::Index r = 0; r < J; ++r) {
                ordered_json row = ordered_json::array();
                for (Eigen::Index c = 0; c < J; ++c) row.push_back(b(r, c));
                rows.push_back(std::move(row));
            }
            lags.push_back(std::move(rows));
        }
        doc["coefficients"].push_back(std::move(lags));
    }
    doc["precisions_lower"] = ordered_json::array();
    for (const auto& om : fit.precisions) {
        ordered_json rows = ordered_json::array();
        for (Eigen::Index r = 0; r < J; ++r) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index c = 0; c <= r; ++c) row.push_back(om(r, c));
            rows.push_back(std::move(row));
        }
        doc["precisions_lower"].push_back(std::move(rows));
    }
    doc["penalty"] = {{"lambda1", fit.penalty.lambda1},
                      {"lambda2", fit.penalty.lambda2},
                      {"lambda3", fit.penalty.lambda3},
                      {"lambda4", fit.penalty.lambda4}};
    doc["diagnostics"] = {{"objective_trace", fit.diagnostics.objective_trace},
                          {"outer_iterations", fit.diagnostics.outer_iterations},
                          {"converged", fit.diagnostics.converged}};
    return doc;
}

inline MultiClassVarFit fit_from_json(const nlohmann::ordered_json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "mcvar-fit") throw DataError("not an mcvar fit document");
        const auto& dims = doc.at("dimensions");
        const auto K = dims.at("classes").get<std::size_t>();
        const auto J = dims.at("series").get<Eigen::Index>();
        MultiClassVarFit fit;
        fit.lag_order = dims.at("lag_order").get<int>();
        fit.classes = doc.at("classes").get<std::vector<std::string>>();
        for (const auto& s : doc.at("series"))
            fit.series.push_back({s.at("id").get<std::string>(), s.at("type").get<std::string>()});
        const auto& coefs = doc.at("coefficients");
        const auto& precs = doc.at("precisions_lower");
        if (coefs.size() != K || precs.size() != K) throw DataError("fit document: class count mismatch");
        for (std::size_t k = 0; k < K; ++k) {
            Matrix b(J, J * fit.lag_order);
            const auto& lags = coefs.at(k);
            if (lags.size() != static_cast<std::size_t>(fit.lag_order))
                throw DataError("fit document: lag count mismatch");
            for (int p = 0; p < fit.lag_order; ++p)
                for (Eigen::Index r = 0; r < J; ++r) {
                    const auto& row = lags.at(static_cast<std::size_t>(p)).at(static_cast<std::size_t>(r));
                    if (row.size() != static_cast<std::size_t>(J)) throw DataError("fit document: ragged block");
                    for (Eigen::Index c = 0; c < J; ++c) b(r, J * p + c) = row.at(static_cast<std::size_t>(c)).get<double>();
                }
            fit.coefficients.push_back(std::move(b));
            Matrix om(J, J);
            for (Eigen::Index r = 0; r < J; ++r) {
                const auto& row = precs.at(k).at(static_cast<std::size_t>(r));
                if (row.size() != static_cast<std::size_t>(r + 1)) throw DataError("fit document: ragged precision");
                for (Eigen::Index c = 0; c <= r; ++c) om(r, c) = om(c, r) = row.at(static_cast<std::size_t>(c)).get<double>();
            }
            fit.precisions.push_back(std::move(om));
        }
        const auto& pen = doc.at("penalty");
        fit.penalty = {pen.at("lambda1").get<double>(), pen.at("lambda2").get<double>(),
                       pen.at("lambda3").get<double>(), pen.at("lambda4").get<double>()};
        const auto& diag = doc.at("diagnostics");
        fit.diagnostics.objective_trace = diag.at("objective_trace").get<std::vector<double>>();
        fit.diagnostics.outer_iterations = diag.at("outer_iterations").get<int>();
        fit.diagnostics.converged = diag.at("converged").get<bool>();
        fit.validate();
        return fit;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed fit document: ") + e.what());
    }
}

inline void write_fit_json(std::ostream& out, const MultiClassVarFit& fit) {
    out << fit_to_json(fit).dump(2) << '\n';
}

inline MultiClassVarFit read_fit_json(std::istream& in) {
    nlohmann::ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed fit document: ") + e.what());
    }
    return fit_from_json(doc);
}

inline MultiClassVarFit read_fit_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return read_fit_json(in);
}

}  // namespace mcvar
