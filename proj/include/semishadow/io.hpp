#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "semishadow/pseudo_orbit.hpp"
#include "semishadow/recurrence.hpp"
#include "semishadow/shadowing.hpp"
#include "semishadow/splitting.hpp"

namespace semishadow {

using Json = nlohmann::json;

inline Json vector_to_json(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back(Json::array({v[i].real(), v[i].imag()}));
    return arr;
}

inline Vector vector_from_json(const Json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = Complex(j[i][0].get<double>(), j[i][1].get<double>());
    return v;
}

// Pseudo-orbit layout: {points: [[[re,im],...],...], durations: [...],
// delta, R, decaying, seed?}.
inline Json to_json(const PseudoOrbit& p) {
    Json j;
    j["points"] = Json::array();
    for (const auto& x : p.points) j["points"].push_back(vector_to_json(x));
    j["durations"] = p.durations;
    j["delta"] = p.delta;
    j["R"] = p.R;
    j["decaying"] = p.decaying;
    if (p.seed) j["seed"] = *p.seed;
    return j;
}

inline PseudoOrbit orbit_from_json(const Json& j) {
    PseudoOrbit p;
    for (const auto& pt : j.at("points")) p.points.push_back(vector_from_json(pt));
    p.durations = j.at("durations").get<std::vector<double>>();
    p.delta = j.at("delta").get<double>();
    p.R = j.at("R").get<double>();
    p.decaying = j.at("decaying").get<bool>();
    if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
    p.rebuild_times();
    return p;
}

// Certificate layout: {method, epsilon, sup_error, tail_sup, pass_eps,
// pass_limit, samples: [[t, err], ...]} plus a detail object.
inline Json to_json(const ShadowCertificate& c) {
    Json j;
    j["method"] = to_string(c.method);
    j["epsilon"] = c.epsilon;
    j["sup_error"] = c.sup_error;
    j["tail_sup"] = c.tail_sup;
    j["pass_eps"] = c.pass_eps;
    j["pass_limit"] = c.pass_limit;
    Json samples = Json::array();
    for (std::size_t i = 0; i < c.sample_times.size(); ++i)
        samples.push_back(Json::array({c.sample_times[i], c.errors[i]}));
    j["samples"] = std::move(samples);
    Json detail;
    detail["shadow_point"] = vector_to_json(c.shadow_point);
    if (std::isfinite(c.limit_bound)) detail["limit_bound"] = c.limit_bound;
    if (!c.errors_ambient.empty()) {
        detail["sup_error_ambient"] = c.sup_error_ambient;
        Json amb = Json::array();
        for (std::size_t i = 0; i < c.sample_times.size(); ++i)
            amb.push_back(Json::array({c.sample_times[i], c.errors_ambient[i]}));
        detail["samples_ambient"] = std::move(amb);
    }
    if (c.rank_deficient) detail["rank_deficient"] = true;
    j["detail"] = std::move(detail);
    return j;
}

inline Json to_json(const HyperbolicSplitting& s) {
    Json j;
    j["dim"] = s.dim();
    j["stable_dim"] = s.stable_dim();
    j["unstable_dim"] = s.unstable_dim();
    j["gap"] = s.gap;
    j["margin"] = s.margin;
    if (s.stable) {
        j["K_M"] = s.K_M;
        j["lambda_M"] = s.lambda_M;
        j["horizon_M"] = s.horizon_M;
    }
    if (s.unstable) {
        j["K_N"] = s.K_N;
        j["lambda_N"] = s.lambda_N;
        j["horizon_N"] = s.horizon_N;
    }
    return j;
}

inline Json to_json(const SplittingResiduals& r) {
    return Json{{"idempotent", r.idempotent},
                {"complementarity", r.complementarity},
                {"cross", r.cross},
                {"commute", r.commute},
                {"decay_margin_M", r.decay_margin_M},
                {"decay_margin_N", r.decay_margin_N}};
}

inline Json adjacency_to_json(const ChainGraph& g) {
    Json j;
    j["delta"] = g.delta;
    j["R"] = g.R;
    j["t_max"] = g.t_max;
    j["times"] = g.times;
    Json nodes = Json::array();
    for (const auto& x : g.nodes) nodes.push_back(vector_to_json(x));
    j["nodes"] = std::move(nodes);
    j["adjacency"] = g.adjacency;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << body;
}

/// trace.csv: one (t, err) row per verification sample.
inline std::string trace_csv(const ShadowCertificate& c) {
    std::string body = "t,err\n";
    char buf[64];
    for (std::size_t i = 0; i < c.sample_times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", c.sample_times[i], c.errors[i]);
        body += buf;
    }
    return body;
}

/// chain_edges.csv: one row per directed edge.
inline std::string chain_edges_csv(const ChainGraph& g) {
    std::string body = "from,to\n";
    for (std::size_t i = 0; i < g.adjacency.size(); ++i)
        for (int j : g.adjacency[i])
            body += std::to_string(i) + "," + std::to_string(j) + "\n";
    return body;
}

}  // namespace semishadow
