#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "semishadow/io.hpp"
#include "semishadow/models.hpp"
#include "semishadow/recurrence.hpp"
#include "semishadow/shadowing.hpp"
#include "semishadow/splitting.hpp"

namespace semishadow {

inline constexpr const char* kConfigSchema = "semishadow-config/1";
inline constexpr const char* kReportSchema = "semishadow-report/1";

namespace cfg {

inline void check_keys(const Json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

inline double number(const Json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
    return obj.at(key).get<double>();
}

inline int integer(const Json& obj, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number_integer())
        throw ConfigError(std::string(key) + " must be an integer");
    return obj.at(key).get<int>();
}

inline std::string text(const Json& obj, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) throw ConfigError(std::string(key) + " must be a string");
    return obj.at(key).get<std::string>();
}

}  // namespace cfg

/// A configured model instance. Exactly one concrete pointer is set; `matrix`
/// additionally aliases generator-backed models.
struct ModelHandle {
    std::string kind;
    std::shared_ptr<Semigroup> semigroup;
    std::shared_ptr<MatrixSemigroup> matrix;
    std::shared_ptr<TransportSemigroup> transport;
    std::shared_ptr<GhShiftSemigroup> gh;
    Json resolved;
};

inline ModelHandle build_model(const Json& model_cfg) {
    cfg::check_keys(model_cfg, "model",
                    {"kind", "rate", "n", "length", "theta", "cells", "step", "half_window",
                     "convention", "generator"});
    ModelHandle h;
    h.kind = cfg::text(model_cfg, "kind", "");
    if (h.kind == "scalar") {
        Complex rate(-1.0, 0.0);
        if (model_cfg.contains("rate")) {
            const Json& r = model_cfg.at("rate");
            if (r.is_number()) rate = Complex(r.get<double>(), 0.0);
            else rate = Complex(r.at(0).get<double>(), r.at(1).get<double>());
        }
        h.matrix = std::make_shared<MatrixSemigroup>(make_scalar(rate));
        h.resolved = {{"kind", "scalar"}, {"rate", Json::array({rate.real(), rate.imag()})}};
    } else if (h.kind == "heat") {
        const int n = cfg::integer(model_cfg, "n", 32);
        const double length = cfg::number(model_cfg, "length", std::numbers::pi);
        h.matrix = std::make_shared<MatrixSemigroup>(make_heat(n, length));
        h.resolved = {{"kind", "heat"}, {"n", n}, {"length", length}};
    } else if (h.kind == "transport") {
        const double theta = cfg::number(model_cfg, "theta", 1.0);
        const int cells = cfg::integer(model_cfg, "cells", 64);
        const double step = cfg::number(model_cfg, "step", 0.25);
        h.transport = std::make_shared<TransportSemigroup>(make_transport(theta, cells, step));
        h.resolved = {{"kind", "transport"}, {"theta", theta}, {"cells", cells}, {"step", step}};
    } else if (h.kind == "rotation") {
        const double theta = cfg::number(model_cfg, "theta", 1.0);
        h.matrix = std::make_shared<MatrixSemigroup>(make_rotation(theta));
        h.resolved = {{"kind", "rotation"}, {"theta", theta}};
    } else if (h.kind == "ghshift") {
        const int hw = cfg::integer(model_cfg, "half_window", 32);
        const double step = cfg::number(model_cfg, "step", 0.5);
        const std::string conv = cfg::text(model_cfg, "convention", "auto");
        WeightConvention c;
        if (conv == "auto") c = verify_gh_convention(hw, step);
        else if (conv == "growing") c = WeightConvention::Growing;
        else if (conv == "decaying") c = WeightConvention::Decaying;
        else throw ConfigError("convention must be auto, growing or decaying");
        h.gh = std::make_shared<GhShiftSemigroup>(make_gh_shift(hw, step, c));
        h.resolved = {{"kind", "ghshift"},
                      {"half_window", hw},
                      {"step", step},
                      {"convention", to_string(c)}};
    } else if (h.kind == "matrix") {
        if (!model_cfg.contains("generator"))
            throw ConfigError("matrix model needs a generator");
        const Json& rows = model_cfg.at("generator");
        const auto n = static_cast<Eigen::Index>(rows.size());
        Matrix a(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
                throw ConfigError("generator must be square");
            for (Eigen::Index j = 0; j < n; ++j) {
                const Json& e = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                a(i, j) = e.is_number() ? Complex(e.get<double>(), 0.0)
                                        : Complex(e.at(0).get<double>(), e.at(1).get<double>());
            }
        }
        h.matrix = std::make_shared<MatrixSemigroup>(std::move(a));
        h.resolved = {{"kind", "matrix"}, {"generator", rows}};
    } else {
        throw ConfigError("unknown model kind '" + h.kind + "'");
    }
    if (h.matrix) h.semigroup = h.matrix;
    if (h.transport) h.semigroup = h.transport;
    if (h.gh) h.semigroup = h.gh;
    return h;
}

inline Vector default_start(const ModelHandle& h) {
    const Eigen::Index n = h.semigroup->dim();
    if (h.kind == "heat") {
        // First Dirichlet mode, unit norm.
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = std::sin((i + 1) * std::numbers::pi / static_cast<double>(n + 1));
        return v / v.norm();
    }
    if (h.kind == "ghshift") return basis_vector(n, h.gh->pos(-3));
    return basis_vector(n, 0);
}

struct ExperimentResult {
    int exit_code = 0;
    Json report;
};

namespace detail_exp {

inline std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct OrbitSpec {
    int length = 100;
    double duration = 0.0;  // 0: choose max(R, grid) automatically
    std::string jump_kind = "constant";
    double delta = -1.0;  // <0: derive from the solver's admissible delta
    double rho = 0.5;
    std::string direction = "random";
    std::optional<Vector> x0;
};

inline OrbitSpec parse_orbit(const Json& config) {
    OrbitSpec s;
    if (!config.contains("orbit")) return s;
    const Json& o = config.at("orbit");
    cfg::check_keys(o, "orbit", {"length", "duration", "jump", "x0"});
    s.length = cfg::integer(o, "length", s.length);
    s.duration = cfg::number(o, "duration", s.duration);
    if (o.contains("jump")) {
        const Json& j = o.at("jump");
        cfg::check_keys(j, "orbit.jump", {"kind", "delta", "rho", "direction"});
        s.jump_kind = cfg::text(j, "kind", s.jump_kind);
        if (s.jump_kind != "zero" && s.jump_kind != "constant" && s.jump_kind != "decaying")
            throw ConfigError("jump kind must be zero, constant or decaying");
        s.delta = cfg::number(j, "delta", s.delta);
        s.rho = cfg::number(j, "rho", s.rho);
        s.direction = cfg::text(j, "direction", s.direction);
    }
    if (o.contains("x0")) s.x0 = vector_from_json(o.at("x0"));
    return s;
}

/// Round a duration up to the model's grid so minimum-duration contracts hold.
inline double snap_duration_up(const Semigroup& sg, double t) {
    auto g = sg.time_grid();
    if (!g) return t;
    return *g * std::ceil(t / *g - kGridTol);
}

inline JumpRule make_rule(const OrbitSpec& s, double admissible_delta, Eigen::Index dim,
                          std::function<double(const Vector&)> norm_fn = {}) {
    JumpRule rule;
    if (s.jump_kind == "zero") rule.kind = JumpRule::Kind::Zero;
    if (s.jump_kind == "constant") rule.kind = JumpRule::Kind::Constant;
    if (s.jump_kind == "decaying") rule.kind = JumpRule::Kind::Decaying;
    rule.delta = (s.delta >= 0.0) ? s.delta : admissible_delta;
    rule.rho = s.rho;
    rule.norm_fn = std::move(norm_fn);
    if (s.direction == "axis") rule.direction = basis_vector(dim, 0);
    else if (s.direction != "random") throw ConfigError("jump direction must be random or axis");
    return rule;
}

}  // namespace detail_exp

/// Run one experiment. Writes report.json (always, also on solver failure)
/// plus command-specific artifacts into out_dir. Returns the process exit
/// code: 0 success, 1 solver failure. Configuration errors throw ConfigError
/// before anything is written (exit code 2 in the CLI).
inline ExperimentResult run_experiment(const std::string& command, const Json& config_in,
                                       const std::string& out_dir, bool no_timestamp = false) {
    Json config = config_in.is_null() ? Json::object() : config_in;
    cfg::check_keys(config, "config",
                    {"schema", "seed", "epsilon", "model", "orbit", "sampling", "split",
                     "spectrum", "chain", "rotation_demo", "gh_demo"});
    if (config.contains("schema") && config.at("schema") != kConfigSchema)
        throw ConfigError("unsupported config schema");
    const auto seed = static_cast<std::uint64_t>(cfg::number(config, "seed", 0.0));
    double epsilon = cfg::number(config, "epsilon", 0.1);
    int per_leg = 8;
    if (config.contains("sampling")) {
        cfg::check_keys(config.at("sampling"), "sampling", {"per_leg"});
        per_leg = cfg::integer(config.at("sampling"), "per_leg", per_leg);
    }
    double margin = 0.9, gap_tol = 1e-9, horizon = 0.0;
    if (config.contains("split")) {
        cfg::check_keys(config.at("split"), "split", {"margin", "gap_tol", "horizon"});
        margin = cfg::number(config.at("split"), "margin", margin);
        gap_tol = cfg::number(config.at("split"), "gap_tol", gap_tol);
        horizon = cfg::number(config.at("split"), "horizon", horizon);
    }

    std::filesystem::create_directories(out_dir);
    Json report;
    report["schema"] = kReportSchema;
    report["command"] = command;
    if (!no_timestamp) report["timestamp"] = detail_exp::timestamp_now();

    Json resolved = config;
    resolved["schema"] = kConfigSchema;
    resolved["seed"] = seed;
    resolved["epsilon"] = epsilon;

    auto finish = [&](int code) {
        report["status"] = (code == 0) ? "ok" : "error";
        report["config"] = resolved;
        write_text_file(out_dir + "/report.json", report.dump(2) + "\n");
        return ExperimentResult{code, report};
    };

    try {
        if (command == "spectrum") {
            ModelHandle model = build_model(config.contains("model") ? config.at("model")
                                                                     : Json{{"kind", "scalar"}});
            resolved["model"] = model.resolved;
            Json res;
            if (model.matrix) {
                const Vector& ev = model.matrix->spectrum();
                Json evs = Json::array();
                for (Eigen::Index i = 0; i < ev.size(); ++i)
                    evs.push_back(Json::array({ev[i].real(), ev[i].imag()}));
                res["generator_spectrum"] = std::move(evs);
                Json mods = Json::array();
                for (Eigen::Index i = 0; i < ev.size(); ++i)
                    mods.push_back(std::exp(ev[i].real()));
                res["time_one_moduli"] = std::move(mods);
                const auto check = check_hyperbolic(*model.matrix, gap_tol);
                res["hyperbolic"] = check.hyperbolic;
                res["gap"] = check.gap;
                double omega_max = 100.0;
                int n_samples = 41;
                if (config.contains("spectrum")) {
                    cfg::check_keys(config.at("spectrum"), "spectrum", {"omega_max", "samples"});
                    omega_max = cfg::number(config.at("spectrum"), "omega_max", omega_max);
                    n_samples = cfg::integer(config.at("spectrum"), "samples", n_samples);
                }
                const auto sc =
                    check_spectral_condition(*model.matrix->generator(), omega_max, n_samples);
                res["no_imaginary_spectrum"] = sc.no_imaginary_spectrum;
                res["min_re_abs"] = sc.min_re_abs;
                if (std::isfinite(sc.resolvent_sup)) {
                    res["resolvent_sup"] = sc.resolvent_sup;
                    res["resolvent_sup_omega"] = sc.sup_omega;
                }
            } else {
                // Lattice models: spectrum of the step map, moduli mapped to t = 1.
                Matrix step = model.gh ? model.gh->periodic_step_matrix()
                                       : model.semigroup->time_map(*model.semigroup->time_grid());
                const auto check =
                    check_hyperbolic_map(step, *model.semigroup->time_grid(), gap_tol);
                res["hyperbolic"] = check.hyperbolic;
                res["gap"] = check.gap;
                if (model.gh) res["representation"] = "periodic_closure";
            }
            report["result"] = std::move(res);
            return finish(0);
        }

        if (command == "split") {
            ModelHandle model = build_model(config.contains("model")
                                                ? config.at("model")
                                                : Json{{"kind", "matrix"},
                                                       {"generator", {{-1.0, 0.0}, {0.0, 2.0}}}});
            resolved["model"] = model.resolved;
            Json res;
            if (model.gh) {
                res["structural"] = true;
                res["stable_coordinates"] = "lattice indices j < 0";
                res["unstable_coordinates"] = "lattice indices j >= 0";
                res["K"] = 1.0;
                res["lambda"] = 1.0;
                res["convention"] = to_string(model.gh->convention());
            } else if (model.matrix) {
                const auto split = compute_splitting(*model.matrix, horizon, margin);
                res["splitting"] = to_json(split);
                res["residuals"] = to_json(splitting_residuals(*model.matrix, split));
            } else {
                throw ConfigError("split needs a generator-backed or shift model");
            }
            report["result"] = std::move(res);
            return finish(0);
        }

        if (command == "shadow" || command == "oracle") {
            ModelHandle model = build_model(config.contains("model") ? config.at("model")
                                                                     : Json{{"kind", "scalar"}});
            resolved["model"] = model.resolved;
            auto spec = detail_exp::parse_orbit(config);
            const Vector x0 = spec.x0 ? *spec.x0 : default_start(model);

            ShadowCertificate constructive;
            PseudoOrbit orbit;
            Json res;

            if (model.gh)
                throw ConfigError("use conjecture-probe for the shift model");

            std::function<double(const Vector&)> coupled_fn;
            if (model.transport) {
                const double theta = model.transport->theta();
                const RateBound bound =
                    (theta > 0.0)
                        ? RateBound(1.0, theta, RateDirection::ForwardContraction)
                        : RateBound(1.0, -theta, RateDirection::InverseContraction);
                double duration, delta;
                if (theta > 0.0) {
                    auto dr = delta_for_epsilon_stable(bound, epsilon, 1.0);
                    duration = detail_exp::snap_duration_up(
                        *model.transport, spec.duration > 0.0 ? spec.duration : dr.R);
                    delta = dr.delta;
                } else {
                    duration = detail_exp::snap_duration_up(
                        *model.transport, spec.duration > 0.0 ? spec.duration : 1.0);
                    delta = delta_for_epsilon_unstable(bound, epsilon);
                }
                orbit = from_perturbed_orbit(*model.transport, x0, spec.length, duration,
                                             detail_exp::make_rule(spec, delta, x0.size()), seed);
                constructive = (theta > 0.0)
                                   ? shadow_stable(orbit, *model.transport, bound, epsilon,
                                                   per_leg)
                                   : shadow_unstable(orbit, *model.transport, bound, epsilon,
                                                     0.0, per_leg);
                res["solver"] = (theta > 0.0) ? "stable" : "unstable_series";
            } else {
                const Vector& ev = model.matrix->spectrum();
                bool any_stable = false, any_unstable = false, any_neutral = false;
                for (Eigen::Index i = 0; i < ev.size(); ++i) {
                    if (ev[i].real() < -gap_tol) any_stable = true;
                    else if (ev[i].real() > gap_tol) any_unstable = true;
                    else any_neutral = true;
                }
                if (any_neutral)
                    throw NotHyperbolic("generator spectrum touches the imaginary axis");
                if (any_stable && any_unstable) {
                    const auto split = compute_splitting(*model.matrix, horizon, margin);
                    auto dr = delta_for_epsilon_stable(stable_rate(split), epsilon, 1.0);
                    const double delta =
                        std::min(dr.delta, delta_for_epsilon_unstable(unstable_rate(split),
                                                                      epsilon));
                    const double duration = spec.duration > 0.0 ? spec.duration
                                                                : std::max(dr.R, 1.0);
                    coupled_fn = [split](const Vector& v) { return coupled_norm(v, split); };
                    orbit = from_perturbed_orbit(
                        *model.matrix, x0, spec.length, duration,
                        detail_exp::make_rule(spec, delta, x0.size(), coupled_fn), seed);
                    constructive =
                        shadow_hyperbolic(orbit, *model.matrix, split, epsilon, per_leg);
                    res["solver"] = "hyperbolic_combined";
                    res["splitting"] = to_json(split);
                } else if (any_stable) {
                    const RateBound bound = certify_contraction(*model.matrix, margin);
                    auto dr = delta_for_epsilon_stable(bound, epsilon, 1.0);
                    const double duration = spec.duration > 0.0 ? spec.duration : dr.R;
                    orbit = from_perturbed_orbit(*model.matrix, x0, spec.length, duration,
                                                 detail_exp::make_rule(spec, dr.delta, x0.size()),
                                                 seed);
                    constructive = shadow_stable(orbit, *model.matrix, bound, epsilon, per_leg);
                    res["solver"] = "stable";
                    res["K"] = bound.K;
                    res["lambda"] = bound.lambda;
                } else {
                    const RateBound bound = certify_inverse_contraction(*model.matrix, margin);
                    const double delta = delta_for_epsilon_unstable(bound, epsilon);
                    const double duration = spec.duration > 0.0 ? spec.duration : 1.0;
                    orbit = from_perturbed_orbit(*model.matrix, x0, spec.length, duration,
                                                 detail_exp::make_rule(spec, delta, x0.size()),
                                                 seed);
                    constructive =
                        shadow_unstable(orbit, *model.matrix, bound, epsilon, 0.0, per_leg);
                    res["solver"] = "unstable_series";
                    res["K"] = bound.K;
                    res["lambda"] = bound.lambda;
                }
            }

            res["certificate"] = to_json(constructive);
            write_text_file(out_dir + "/orbit.json", to_json(orbit).dump(2) + "\n");
            if (command == "oracle") {
                const auto oracle = brute_force_shadow(orbit, *model.semigroup,
                                                       constructive.sample_times, epsilon);
                res["oracle_certificate"] = to_json(oracle);
                res["oracle_within_constructive"] =
                    oracle.sup_error <= constructive.sup_error + 1e-9;
                write_text_file(out_dir + "/trace.csv", trace_csv(oracle));
            } else {
                write_text_file(out_dir + "/trace.csv", trace_csv(constructive));
            }
            report["result"] = std::move(res);
            return finish(constructive.pass_eps ? 0 : 1);
        }

        if (command == "chainrec") {
            ModelHandle model = build_model(config.contains("model")
                                                ? config.at("model")
                                                : Json{{"kind", "matrix"},
                                                       {"generator", {{-1.0, 0.0}, {0.0, 1.0}}}});
            resolved["model"] = model.resolved;
            Json c = config.contains("chain") ? config.at("chain") : Json::object();
            cfg::check_keys(c, "chain", {"grid", "extent", "step", "count", "radius", "delta",
                                         "R", "t_max", "times", "spacing"});
            const std::string grid = cfg::text(c, "grid", "square");
            const double delta = cfg::number(c, "delta", 0.02);
            const double R = cfg::number(c, "R", 1.0);
            const double t_max = cfg::number(c, "t_max", 20.0);
            const int times = cfg::integer(c, "times", 32);
            const std::string spacing = cfg::text(c, "spacing", "log");
            std::vector<Vector> nodes;
            if (grid == "square")
                nodes = square_grid(cfg::number(c, "extent", 1.0), cfg::number(c, "step", 0.1));
            else if (grid == "circle")
                nodes = circle_grid(cfg::number(c, "radius", 1.0), cfg::integer(c, "count", 32));
            else
                throw ConfigError("chain grid must be square or circle");
            const auto graph = build_chain_graph(*model.semigroup, std::move(nodes), delta, R,
                                                 t_max, times, spacing == "log");
            const auto recurrent = chain_recurrent_set(graph);
            Json res;
            res["nodes"] = graph.nodes.size();
            res["recurrent"] = recurrent;
            Json pts = Json::array();
            for (int i : recurrent) pts.push_back(vector_to_json(graph.nodes[static_cast<std::size_t>(i)]));
            res["recurrent_points"] = std::move(pts);
            report["result"] = std::move(res);
            write_text_file(out_dir + "/chain_edges.csv", chain_edges_csv(graph));
            write_text_file(out_dir + "/chain_graph.json", adjacency_to_json(graph).dump(2) + "\n");
            return finish(0);
        }

        if (command == "demo-heat") {
            Json model_cfg = config.contains("model") ? config.at("model")
                                                      : Json{{"kind", "heat"}, {"n", 32}};
            model_cfg["kind"] = "heat";
            ModelHandle model = build_model(model_cfg);
            resolved["model"] = model.resolved;
            epsilon = config.contains("epsilon") ? epsilon : 1e-2;
            resolved["epsilon"] = epsilon;
            Json res;
            double mu1 = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < model.matrix->spectrum().size(); ++i)
                mu1 = std::min(mu1, -model.matrix->spectrum()[i].real());
            res["smallest_decay_rate"] = mu1;
            res["continuum_value"] = 1.0;
            res["relative_gap"] = std::abs(mu1 - 1.0);
            const RateBound bound(1.0, mu1, RateDirection::ForwardContraction);
            auto dr = delta_for_epsilon_stable(bound, epsilon, 1.0);
            auto orbit = from_perturbed_orbit(*model.matrix, default_start(model), 60, dr.R,
                                              JumpRule::decaying(dr.delta, 0.5), seed);
            const auto cert = shadow_stable(orbit, *model.matrix, bound, epsilon, per_leg);
            res["certificate"] = to_json(cert);
            report["result"] = std::move(res);
            write_text_file(out_dir + "/trace.csv", trace_csv(cert));
            write_text_file(out_dir + "/orbit.json", to_json(orbit).dump(2) + "\n");
            return finish(cert.pass_eps && cert.pass_limit ? 0 : 1);
        }

        if (command == "demo-transport") {
            Json model_cfg = config.contains("model") ? config.at("model")
                                                      : Json{{"kind", "transport"}};
            model_cfg["kind"] = "transport";
            ModelHandle model = build_model(model_cfg);
            resolved["model"] = model.resolved;
            const double theta = model.transport->theta();
            Json res;
            double worst_norm_gap = 0.0;
            for (int k = 0; k <= 8; ++k) {
                const double t = k * model.transport->step();
                worst_norm_gap =
                    std::max(worst_norm_gap, std::abs(operator_norm_estimate(*model.transport, t) -
                                                      std::exp(-t * theta)));
                worst_norm_gap = std::max(
                    worst_norm_gap, std::abs(inverse_operator_norm_estimate(*model.transport, t) -
                                             std::exp(t * theta)));
            }
            res["norm_identity_gap"] = worst_norm_gap;
            const RateBound bound(1.0, std::abs(theta),
                                  theta > 0.0 ? RateDirection::ForwardContraction
                                              : RateDirection::InverseContraction);
            auto dr = theta > 0.0 ? delta_for_epsilon_stable(bound, epsilon, 1.0)
                                  : DeltaR{delta_for_epsilon_unstable(bound, epsilon), 1.0};
            const double duration = detail_exp::snap_duration_up(*model.transport, dr.R);
            auto orbit =
                from_perturbed_orbit(*model.transport, default_start(model), 60, duration,
                                     JumpRule::constant(dr.delta), seed);
            const auto cert = theta > 0.0
                                  ? shadow_stable(orbit, *model.transport, bound, epsilon,
                                                  per_leg)
                                  : shadow_unstable(orbit, *model.transport, bound, epsilon, 0.0,
                                                    per_leg);
            res["certificate"] = to_json(cert);
            report["result"] = std::move(res);
            write_text_file(out_dir + "/trace.csv", trace_csv(cert));
            return finish(cert.pass_eps ? 0 : 1);
        }

        if (command == "demo-rotation") {
            Json c = config.contains("rotation_demo") ? config.at("rotation_demo")
                                                      : Json::object();
            cfg::check_keys(c, "rotation_demo", {"theta", "delta_prime", "m"});
            const double theta = cfg::number(c, "theta", 1.0);
            const double dp = cfg::number(c, "delta_prime", 0.01);
            const int m = cfg::integer(c, "m", 30);
            const auto demo = rotation_no_shadowing_demo(theta, epsilon, dp, m);
            Json res;
            res["analytic_lower_bound"] = demo.analytic_lower_bound;
            res["numeric_lower_bound"] = demo.numeric_lower_bound;
            res["epsilon"] = demo.epsilon;
            res["certified_unshadowable"] = demo.certified;
            const auto check = check_hyperbolic(make_rotation(theta));
            res["hyperbolic"] = check.hyperbolic;
            res["gap"] = check.gap;
            report["result"] = std::move(res);
            write_text_file(out_dir + "/orbit.json", to_json(demo.orbit).dump(2) + "\n");
            return finish(demo.certified ? 0 : 1);
        }

        if (command == "demo-ghshift") {
            Json model_cfg = config.contains("model") ? config.at("model")
                                                      : Json{{"kind", "ghshift"}};
            model_cfg["kind"] = "ghshift";
            ModelHandle model = build_model(model_cfg);
            resolved["model"] = model.resolved;
            Json c = config.contains("gh_demo") ? config.at("gh_demo") : Json::object();
            cfg::check_keys(c, "gh_demo", {"support", "delta", "R"});
            const int support = cfg::integer(c, "support", 4);
            const double delta = cfg::number(c, "delta", 0.05);
            const double R = cfg::number(c, "R", 1.0);
            const auto demo = gh_recurrence_demo(*model.gh, support, delta, R);
            Json res;
            res["convention"] = to_string(model.gh->convention());
            res["chain_closed"] = demo.chain_closed;
            res["crossing_step"] = demo.crossing_step;
            res["forward_norms"] = demo.forward_norms;
            res["backward_norms"] = demo.backward_norms;
            res["closure_hyperbolic"] = demo.closure_check.hyperbolic;
            res["closure_gap"] = demo.closure_check.gap;
            res["truncation_invertible"] = demo.truncation_invertible;
            report["result"] = std::move(res);
            write_text_file(out_dir + "/orbit.json", to_json(demo.chain).dump(2) + "\n");
            return finish(demo.chain_closed && !demo.closure_check.hyperbolic ? 0 : 1);
        }

        if (command == "conjecture-probe") {
            // Shadowing experiment on the shift model through its structural
            // splitting. The outcome is reported, not asserted.
            Json model_cfg = config.contains("model") ? config.at("model")
                                                      : Json{{"kind", "ghshift"},
                                                             {"half_window", 48}};
            model_cfg["kind"] = "ghshift";
            ModelHandle model = build_model(model_cfg);
            resolved["model"] = model.resolved;
            const auto& gh = *model.gh;
            auto spec = detail_exp::parse_orbit(config);
            if (spec.length > 100) spec.length = 100;

            Vector x0 = Vector::Zero(gh.dim());
            x0[gh.pos(-3)] = Complex(1.0 / std::sqrt(2.0), 0.0);
            x0[gh.pos(+3)] = Complex(1.0 / std::sqrt(2.0), 0.0);
            if (spec.x0) x0 = *spec.x0;

            const RateBound fwd(1.0, 1.0, RateDirection::ForwardContraction);
            const RateBound bwd(1.0, 1.0, RateDirection::InverseContraction);
            auto dr = delta_for_epsilon_stable(fwd, epsilon, 1.0);
            const double delta = std::min(dr.delta, delta_for_epsilon_unstable(bwd, epsilon));
            const double duration = detail_exp::snap_duration_up(gh, std::max(dr.R, 1.0));
            // Keep the drifting support clear of the window edge for the whole run.
            const auto steps_per_leg =
                static_cast<int>(std::llround(duration / gh.step()));
            const int legs =
                std::max(4, std::min(spec.length, (gh.half_window() - 5) / steps_per_leg));
            auto rule = JumpRule::decaying(delta, spec.rho);
            Vector inject = Vector::Zero(gh.dim());
            inject[gh.pos(-2)] = Complex(1.0, 0.0);
            inject[gh.pos(+2)] = Complex(1.0, 0.0);
            rule.direction = inject / inject.norm();
            auto orbit = from_perturbed_orbit(gh, x0, legs, duration, rule, seed);

            // Mask projections onto the structural components.
            auto mask = [&](const PseudoOrbit& p, bool stable) {
                PseudoOrbit q = p;
                for (auto& pt : q.points)
                    for (long j = -gh.half_window(); j <= gh.half_window(); ++j)
                        if ((j < 0) != stable) pt[gh.pos(j)] = 0.0;
                return q;
            };
            const auto times = shadow_sample_times(orbit, gh, per_leg);
            auto pm = mask(orbit, true);
            auto pn = mask(orbit, false);
            const auto trace_m = detail::stable_error_trace(pm, gh, times);
            const auto trace_n = detail::unstable_error_trace(pn, gh, times, pn.legs());

            ShadowCertificate cert;
            cert.shadow_point = pm.points.front() + pn.points.front() + trace_n.tail_correction;
            cert.epsilon = epsilon;
            cert.method = ShadowMethod::hyperbolic_combined;
            cert.sample_times = times;
            for (std::size_t i = 0; i < times.size(); ++i) {
                cert.errors.push_back(
                    std::max(trace_m.errors[i].norm(), trace_n.errors[i].norm()));
                cert.errors_ambient.push_back((trace_m.errors[i] + trace_n.errors[i]).norm());
            }
            detail::fill_error_stats(cert);
            cert.sup_error_ambient = 0.0;
            for (double e : cert.errors_ambient)
                cert.sup_error_ambient = std::max(cert.sup_error_ambient, e);

            bool window_exit = gh.near_window_edge(cert.shadow_point);
            for (const auto& pt : orbit.points) window_exit |= gh.near_window_edge(pt);

            const auto oracle = brute_force_shadow(orbit, gh, times, epsilon);

            Json res;
            res["structural_certificate"] = to_json(cert);
            res["oracle_certificate"] = to_json(oracle);
            res["window_exit"] = window_exit;
            res["outcome"] = cert.pass_eps ? "structural shadow within epsilon"
                                           : "structural shadow exceeded epsilon";
            report["result"] = std::move(res);
            write_text_file(out_dir + "/trace.csv", trace_csv(cert));
            write_text_file(out_dir + "/orbit.json", to_json(orbit).dump(2) + "\n");
            return finish(0);  // reported, never asserted
        }

        throw ConfigError("unknown command '" + command + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        report["error"] = {{"type", "solver"}, {"message", e.what()}};
        return finish(1);
    }
}

}  // namespace semishadow
