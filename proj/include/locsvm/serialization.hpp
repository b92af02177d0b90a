#pragma once

#include <string>

#include "json.hpp"
#include "locsvm/audit.hpp"
#include "locsvm/composer.hpp"

namespace locsvm {

using Json = nlohmann::json;

namespace detail {

inline Json to_array(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Json to_rows(const Points& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_array(m.row(i).transpose()));
    return a;
}

inline Vector vector_from(const Json& j, const char* what) {
    if (!j.is_array()) throw InputError(std::string(what) + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InputError(std::string(what) + ": expected numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

inline Points rows_from(const Json& j, Eigen::Index cols, const char* what) {
    if (!j.is_array()) throw InputError(std::string(what) + ": expected an array of rows");
    Points m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vector r = vector_from(j[i], what);
        if (r.size() != cols) throw InputError(std::string(what) + ": row has wrong dimension");
        m.row(static_cast<Eigen::Index>(i)) = r.transpose();
    }
    return m;
}

inline const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return j.at(key);
}

}  // namespace detail

inline Json to_json(const Kernel& k) {
    Json j{{"family", std::string(family_name(k.family))}, {"input_dim", k.input_dim}};
    if (k.family == KernelFamily::GaussianRBF) j["gamma"] = k.gamma;
    if (k.family == KernelFamily::Polynomial) {
        j["degree"] = k.degree;
        j["offset"] = k.offset;
    }
    return j;
}

inline Kernel kernel_from_json(const Json& j) {
    const auto family = parse_kernel_family(detail::field(j, "family").get<std::string>());
    const int dim = detail::field(j, "input_dim").get<int>();
    switch (family) {
        case KernelFamily::GaussianRBF: return Kernel::gaussian_rbf(detail::field(j, "gamma").get<double>(), dim);
        case KernelFamily::Linear: return Kernel::linear(dim);
        case KernelFamily::Polynomial:
            return Kernel::polynomial(detail::field(j, "degree").get<int>(), j.value("offset", 0.0), dim);
    }
    throw InputError("unreachable kernel family");
}

inline Json to_json(const LocalModel& m) {
    Json j;
    j["region_id"] = m.region_id ? Json(*m.region_id) : Json("global");
    j["lambda"] = m.lambda;
    j["kernel"] = to_json(m.kernel);
    j["loss"] = std::string(loss_name(m.loss));
    j["anchors"] = detail::to_rows(m.anchor_points);
    j["anchor_weights"] = detail::to_array(m.anchor_weights);
    j["alpha"] = detail::to_array(m.coefficients);
    return j;
}

inline LocalModel local_model_from_json(const Json& j) {
    LocalModel m;
    const Json& rid = detail::field(j, "region_id");
    if (rid.is_string()) {
        if (rid.get<std::string>() != "global") throw InputError("region_id must be an integer or \"global\"");
    } else {
        m.region_id = rid.get<int>();
    }
    m.lambda = detail::field(j, "lambda").get<double>();
    if (!(m.lambda > 0.0)) throw InputError("model lambda must be positive");
    m.kernel = kernel_from_json(detail::field(j, "kernel"));
    m.loss = parse_loss(detail::field(j, "loss").get<std::string>());
    m.anchor_points = detail::rows_from(detail::field(j, "anchors"), m.kernel.input_dim, "anchors");
    m.coefficients = detail::vector_from(detail::field(j, "alpha"), "alpha");
    m.anchor_weights = j.contains("anchor_weights") ? detail::vector_from(j.at("anchor_weights"), "anchor_weights")
                                                    : Vector::Constant(m.coefficients.size(),
                                                                       m.coefficients.size() ? 1.0 / m.coefficients.size() : 0.0);
    if (m.coefficients.size() != m.anchor_points.rows() || m.anchor_weights.size() != m.coefficients.size()) {
        throw InputError("model: alpha, anchors and anchor_weights lengths differ");
    }
    return m;
}

inline Json to_json(const RegionPartition& p) {
    Json regions = Json::array();
    for (const auto& r : p.regions) {
        regions.push_back({{"id", r.id}, {"center", detail::to_array(r.center)}, {"radius", r.radius}});
    }
    return {{"regions", regions}, {"tau", p.overlap_factor}, {"min_region_size", p.min_region_size}};
}

/// Partition JSON with the weight scheme's kind and bandwidth inlined.
inline Json to_json(const WeightScheme& s) {
    Json j = to_json(s.partition);
    j["kind"] = std::string(weight_kind_name(s.kind));
    j["h"] = s.bandwidth;
    return j;
}

inline WeightScheme scheme_from_json(const Json& j) {
    WeightScheme s;
    s.kind = parse_weight_kind(detail::field(j, "kind").get<std::string>());
    s.bandwidth = j.value("h", 1.0);
    s.partition.overlap_factor = j.value("tau", 0.0);
    s.partition.min_region_size = j.value("min_region_size", 1);
    int expected = 1;
    for (const auto& r : detail::field(j, "regions")) {
        RegionPredicate reg;
        reg.id = detail::field(r, "id").get<int>();
        if (reg.id != expected++) throw InputError("partition: region ids must run 1..B in order");
        reg.center = detail::vector_from(detail::field(r, "center"), "center");
        reg.radius = detail::field(r, "radius").get<double>();
        if (!(reg.radius >= 0.0)) throw InputError("partition: negative radius");
        s.partition.regions.push_back(std::move(reg));
    }
    if (s.partition.regions.empty()) throw InputError("partition: no regions");
    return s;
}

inline Json to_json(const ComposedModel& m) {
    Json locals = Json::array();
    for (const auto& l : m.locals) locals.push_back(to_json(l));
    return {{"format", "locsvm-composed-model"},
            {"version", 1},
            {"loss", std::string(loss_name(m.loss))},
            {"partition", to_json(m.scheme)},
            {"scheme", {{"kind", std::string(weight_kind_name(m.scheme.kind))}, {"h", m.scheme.bandwidth}}},
            {"locals", locals},
            {"null_region_ids", m.null_region_ids}};
}

inline ComposedModel composed_model_from_json(const Json& j) {
    if (j.value("format", std::string{}) != "locsvm-composed-model") throw InputError("not a composed model file");
    ComposedModel m;
    m.loss = parse_loss(detail::field(j, "loss").get<std::string>());
    m.scheme = scheme_from_json(detail::field(j, "partition"));
    if (j.contains("scheme")) {
        m.scheme.kind = parse_weight_kind(detail::field(j.at("scheme"), "kind").get<std::string>());
        m.scheme.bandwidth = j.at("scheme").value("h", m.scheme.bandwidth);
    }
    for (const auto& l : detail::field(j, "locals")) m.locals.push_back(local_model_from_json(l));
    if (m.locals.size() != m.scheme.size()) throw InputError("model: number of locals differs from number of regions");
    for (std::size_t b = 0; b < m.locals.size(); ++b) {
        if (m.locals[b].region_id != static_cast<int>(b) + 1) throw InputError("model: locals must be ordered by region id");
    }
    m.null_region_ids = j.value("null_region_ids", std::vector<int>{});
    return m;
}

inline Json to_json(const BoundReport& r) {
    Json terms = Json::array();
    for (const auto& t : r.terms) {
        terms.push_back({{"region_id", t.id},
                         {"weight_sup", t.weight_sup},
                         {"lambda", t.lambda},
                         {"kernel_sup", t.kernel_sup},
                         {"kernel_sup_exact", t.kernel_sup_exact},
                         {"term", 2.0 * r.lipschitz * t.value()}});
    }
    return terms;
}

namespace detail {
inline Json keyed(const std::map<int, double>& m) {
    Json j = Json::object();
    for (const auto& [k, v] : m) j[std::to_string(k)] = v;
    return j;
}
}  // namespace detail

inline Json to_json(const AuditReport& r) {
    Json ladder = Json::array();
    Json points = Json::array();
    for (const auto& p : r.points) {
        Json rungs = Json::array();
        for (const auto& s : p.ladder) rungs.push_back({{"eps", s.eps}, {"sup", s.sup}, {"h_norms", detail::keyed(s.h_norms)}});
        points.push_back({{"z", {{"x", detail::to_array(p.z.x)}, {"y", p.z.y}}},
                          {"touched_regions", p.touched_regions},
                          {"if_sup", p.if_sup},
                          {"richardson_sup", p.richardson_sup},
                          {"second_order", p.second_order},
                          {"slack", p.slack},
                          {"if_bound_tv", p.if_bound_tv},
                          {"tv", detail::keyed(p.tv)},
                          {"ladder", rungs},
                          {"ladder_ratios", p.ladder_ratios},
                          {"ladder_converging", p.ladder_converging},
                          {"decomposition_residual", p.decomposition_residual},
                          {"if_ok", p.if_ok},
                          {"h_norm_ok", p.h_norm_ok}});
    }
    // worst case over the audited points, rung by rung
    if (!r.points.empty()) {
        for (std::size_t k = 0; k < r.points.front().ladder.size(); ++k) {
            double sup = 0.0;
            std::map<int, double> h;
            for (const auto& p : r.points) {
                sup = std::max(sup, p.ladder[k].sup);
                for (const auto& [id, v] : p.ladder[k].h_norms) h[id] = std::max(h[id], v);
            }
            ladder.push_back({{"eps", r.points.front().ladder[k].eps}, {"sup", sup}, {"h_norms", detail::keyed(h)}});
        }
    }
    Json empirical{{"if_sup", r.if_sup},
                   {"maxbias_sup", r.maxbias ? Json(r.maxbias->empirical_max) : Json(nullptr)},
                   {"decomposition_residual", r.decomposition_residual},
                   {"ladder", ladder},
                   {"points", points},
                   {"coverage_violations", r.coverage_violations},
                   {"sup_is_lower_bound", true}};
    return {{"if_bound_rough", r.bounds.if_bound_rough},
            {"if_bound_tv", r.if_bound_tv},
            {"maxbias_eps", r.maxbias_eps},
            {"maxbias_bound", r.maxbias_bound},
            {"per_region_terms", to_json(r.bounds)},
            {"empirical", empirical},
            {"satisfied", {{"if", r.if_satisfied()}, {"maxbias", r.maxbias_satisfied()}}},
            {"warnings", r.warnings}};
}

}  // namespace locsvm
