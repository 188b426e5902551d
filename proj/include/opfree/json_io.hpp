#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "atoms.hpp"
#include "complex_matrix.hpp"
#include "covering.hpp"
#include "errors.hpp"
#include "jacobi.hpp"
#include "measure.hpp"
#include "opval.hpp"

namespace opfree {

using Json = nlohmann::json;

// Strict JSON mapping for the library types. Parsers reject unknown keys and
// anything of the wrong shape with SchemaError; complex numbers travel as
// [re, im] pairs everywhere.

namespace detail {

inline void require_keys(const Json& obj, const std::string& who,
                         std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw SchemaError(who + ": expected a JSON object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        if (!known) throw SchemaError(who + ": unknown key \"" + item.key() + "\"");
    }
    for (const char* k : keys)
        if (!obj.contains(k)) throw SchemaError(who + ": missing key \"" + k + "\"");
}

inline double json_double(const Json& v, const std::string& who) {
    if (!v.is_number()) throw SchemaError(who + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw SchemaError(who + ": non-finite number");
    return x;
}

inline std::vector<double> json_double_vector(const Json& v, const std::string& who) {
    if (!v.is_array()) throw SchemaError(who + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(json_double(e, who));
    return out;
}

inline Complex json_complex(const Json& v, const std::string& who) {
    if (!v.is_array() || v.size() != 2)
        throw SchemaError(who + ": complex values are [re, im] pairs");
    return Complex(json_double(v[0], who), json_double(v[1], who));
}

inline ComplexMatrix json_complex_matrix(const Json& v, const std::string& who,
                                         std::size_t n) {
    if (!v.is_array() || v.size() != n)
        throw SchemaError(who + ": expected " + std::to_string(n) + " matrix rows");
    ComplexMatrix m(n);
    for (std::size_t r = 0; r < n; ++r) {
        const Json& row = v[r];
        if (!row.is_array() || row.size() != n)
            throw SchemaError(who + ": row " + std::to_string(r + 1) + " must have " +
                              std::to_string(n) + " entries");
        for (std::size_t c = 0; c < n; ++c) m(r, c) = json_complex(row[c], who);
    }
    return m;
}

} // namespace detail

using MeasureSpec = std::variant<DiscreteMeasure, MomentSequence>;

inline MeasureSpec parse_measure(const Json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw SchemaError("measure: expected an object with a \"type\" string");
    const std::string type = j["type"].get<std::string>();
    if (type == "discrete") {
        detail::require_keys(j, "measure", {"type", "points", "weights"});
        return discrete_measure(detail::json_double_vector(j["points"], "measure.points"),
                                detail::json_double_vector(j["weights"], "measure.weights"));
    }
    if (type == "moments") {
        detail::require_keys(j, "measure", {"type", "moments", "support_bound"});
        return moment_sequence(detail::json_double_vector(j["moments"], "measure.moments"),
                               detail::json_double(j["support_bound"], "measure.support_bound"));
    }
    throw SchemaError("measure: unknown type \"" + type + "\"");
}

inline JacobiCoefficients parse_jacobi(const Json& j) {
    detail::require_keys(j, "jacobi", {"alphas", "omegas", "exhausted"});
    if (!j["exhausted"].is_boolean())
        throw SchemaError("jacobi: \"exhausted\" must be a boolean");
    return jacobi_coefficients(detail::json_double_vector(j["alphas"], "jacobi.alphas"),
                               detail::json_double_vector(j["omegas"], "jacobi.omegas"),
                               j["exhausted"].get<bool>());
}

inline SemicircularModel parse_model(const Json& j) {
    detail::require_keys(j, "model", {"dim", "mean", "kraus"});
    if (!j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0)
        throw SchemaError("model: \"dim\" must be a positive integer");
    const std::size_t n = j["dim"].get<std::size_t>();
    ComplexMatrix mean = detail::json_complex_matrix(j["mean"], "model.mean", n);
    if (!j["kraus"].is_array() || j["kraus"].empty())
        throw SchemaError("model: \"kraus\" must be a nonempty array of matrices");
    std::vector<ComplexMatrix> ops;
    ops.reserve(j["kraus"].size());
    std::size_t idx = 0;
    for (const auto& op : j["kraus"]) {
        ++idx;
        ops.push_back(detail::json_complex_matrix(
            op, "model.kraus[" + std::to_string(idx) + "]", n));
    }
    return semicircular_model(std::move(mean), kraus_map(std::move(ops)));
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.dim(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json to_json(const DiscreteMeasure& m) {
    return Json{{"type", "discrete"}, {"points", m.points}, {"weights", m.weights}};
}

inline Json to_json(const JacobiCoefficients& jc) {
    return Json{{"alphas", jc.alphas}, {"omegas", jc.omegas}, {"exhausted", jc.exhausted}};
}

inline Json to_json(const SemicircularModel& model) {
    Json kraus = Json::array();
    for (const ComplexMatrix& op : model.variance.kraus_ops) kraus.push_back(to_json(op));
    return Json{{"dim", model.dim}, {"mean", to_json(model.mean)}, {"kraus", std::move(kraus)}};
}

inline Json to_json(const AtomReport& report) {
    Json raw = Json::array();
    for (Complex v : report.raw_estimates) raw.push_back(to_json(v));
    return Json{{"location", report.location},
                {"mass", report.mass},
                {"epsilons", report.epsilons},
                {"raw_estimates", std::move(raw)},
                {"truncated", report.truncated}};
}

inline Json to_json(const NilpotencyReport& report) {
    Json idx;
    if (report.eta_index) idx = *report.eta_index;
    return Json{{"all_nilpotent", report.all_nilpotent},
                {"all_commute", report.all_commute},
                {"eta_index", std::move(idx)},
                {"forward_consistent", report.forward_consistent},
                {"reverse_consistent", report.reverse_consistent}};
}

inline Json to_json(const CoveringDecomposition& cd) {
    Json comps = Json::array();
    for (const DiscreteMeasure& c : cd.components) comps.push_back(to_json(c));
    return Json{{"components", std::move(comps)}, {"mixture", to_json(cd.mixture)}};
}

} // namespace opfree
