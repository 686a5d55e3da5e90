#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semishadow/semigroup.hpp"

namespace semishadow {

/// Points x_i and leg durations t_i >= R with jump defects
/// h_i = x_{i+1} - T(t_i) x_i bounded by delta. The accumulated times
/// t̂_i = sum_{j<i} t_j index the piecewise trajectory x_0 * t.
struct PseudoOrbit {
    std::vector<Vector> points;     // n+1 states
    std::vector<double> durations;  // n legs
    double delta = 0.0;             // declared jump bound
    double R = 0.0;                 // declared minimum leg duration
    bool decaying = false;          // jumps declared to vanish along the orbit
    std::optional<std::uint64_t> seed;
    std::vector<double> t_hat;      // accumulated times, size n+1

    std::size_t legs() const { return durations.size(); }
    double horizon() const { return t_hat.empty() ? 0.0 : t_hat.back(); }

    void rebuild_times() {
        t_hat.assign(durations.size() + 1, 0.0);
        for (std::size_t i = 0; i < durations.size(); ++i) t_hat[i + 1] = t_hat[i] + durations[i];
    }
};

inline std::vector<Vector> recompute_jumps(const PseudoOrbit& p, const Semigroup& T) {
    std::vector<Vector> jumps;
    jumps.reserve(p.legs());
    for (std::size_t i = 0; i < p.legs(); ++i)
        jumps.push_back(p.points[i + 1] - T.apply(p.durations[i], p.points[i]));
    return jumps;
}

struct ValidationReport {
    bool valid = false;
    bool lengths_ok = false;
    bool durations_ok = false;
    bool grid_ok = false;
    bool jumps_ok = false;
    bool times_increasing = false;
    bool decay_ok = true;
    double max_jump = 0.0;
    int worst_jump_index = -1;
    double min_duration = 0.0;
    int worst_duration_index = -1;
    double tail_max_jump = 0.0;
    std::string message;  // first failure, empty when valid
};

/// Recompute every jump and check the pseudo-orbit invariants. Failures are
/// carried in the report, never thrown; off-grid durations suppress the jump
/// recomputation and surface as grid_ok = false.
inline ValidationReport validate(const PseudoOrbit& p, const Semigroup& T,
                                 double tail_tol = 1e-12) {
    ValidationReport r;
    r.lengths_ok = !p.points.empty() && p.points.size() == p.durations.size() + 1 &&
                   p.t_hat.size() == p.points.size();
    if (!r.lengths_ok) {
        r.message = "inconsistent points/durations/t_hat lengths";
        return r;
    }

    r.durations_ok = true;
    r.min_duration = p.durations.empty() ? 0.0 : p.durations[0];
    for (std::size_t i = 0; i < p.durations.size(); ++i) {
        if (p.durations[i] < r.min_duration || i == 0) {
            r.min_duration = p.durations[i];
            r.worst_duration_index = static_cast<int>(i);
        }
        if (p.durations[i] < p.R - 1e-12 || p.durations[i] <= 0.0) r.durations_ok = false;
    }
    if (!r.durations_ok)
        r.message = "duration below R at index " + std::to_string(r.worst_duration_index);

    r.times_increasing = true;
    for (std::size_t i = 0; i + 1 < p.t_hat.size(); ++i)
        if (!(p.t_hat[i] < p.t_hat[i + 1])) r.times_increasing = false;

    r.grid_ok = true;
    for (std::size_t i = 0; i < p.durations.size(); ++i)
        if (!T.on_grid(p.durations[i])) {
            r.grid_ok = false;
            if (r.message.empty())
                r.message = "off-grid duration at index " + std::to_string(i);
        }

    if (r.grid_ok) {
        auto jumps = recompute_jumps(p, T);
        r.jumps_ok = true;
        for (std::size_t i = 0; i < jumps.size(); ++i) {
            const double jn = jumps[i].norm();
            if (jn > r.max_jump) {
                r.max_jump = jn;
                r.worst_jump_index = static_cast<int>(i);
            }
        }
        if (r.max_jump > p.delta * (1.0 + 1e-12) + 1e-15) {
            r.jumps_ok = false;
            if (r.message.empty())
                r.message = "jump norm " + std::to_string(r.max_jump) + " exceeds delta at index " +
                            std::to_string(r.worst_jump_index);
        }
        if (p.decaying && !jumps.empty()) {
            for (std::size_t i = jumps.size() / 2; i < jumps.size(); ++i)
                r.tail_max_jump = std::max(r.tail_max_jump, jumps[i].norm());
            r.decay_ok = r.tail_max_jump <= std::max(tail_tol, r.max_jump / 10.0);
            if (!r.decay_ok && r.message.empty())
                r.message = "declared decaying but tail jumps do not shrink";
        }
    }

    r.valid = r.lengths_ok && r.durations_ok && r.grid_ok && r.jumps_ok && r.times_increasing &&
              r.decay_ok;
    return r;
}

/// Piecewise trajectory x_0 * t = T(t - t̂_i) x_i on the unique leg with
/// t̂_i <= t < t̂_{i+1}.
inline Vector evaluate_star(const PseudoOrbit& p, const Semigroup& T, double t) {
    if (t < 0.0 || t >= p.horizon())
        throw OutOfRange("time " + std::to_string(t) + " outside [0, " +
                         std::to_string(p.horizon()) + ")");
    const auto it = std::upper_bound(p.t_hat.begin(), p.t_hat.end(), t);
    const auto i = static_cast<std::size_t>(std::distance(p.t_hat.begin(), it)) - 1;
    return T.apply(t - p.t_hat[i], p.points[i]);
}

/// Prescription for generated jump defects. Sizes are measured in norm_fn
/// (ambient norm when empty); directions are uniform on the unit sphere or
/// fixed when `direction` is set.
struct JumpRule {
    enum class Kind { Zero, Constant, Decaying };
    Kind kind = Kind::Zero;
    double delta = 0.0;
    double rho = 0.5;  // per-step factor for Kind::Decaying
    std::optional<Vector> direction;
    std::function<double(const Vector&)> norm_fn;

    static JumpRule zero() { return {}; }
    static JumpRule constant(double delta) { return {Kind::Constant, delta, 0.5, {}, {}}; }
    static JumpRule decaying(double delta, double rho = 0.5) {
        return {Kind::Decaying, delta, rho, {}, {}};
    }
};

/// Evolve x0 under T with per-leg duration `duration` and inject jump defects
/// drawn from `rule`; deterministic per seed.
inline PseudoOrbit from_perturbed_orbit(const Semigroup& T, const Vector& x0, int n,
                                        double duration, const JumpRule& rule,
                                        std::uint64_t seed = 0) {
    if (n < 1) throw Error("pseudo-orbit needs at least one leg");
    if (duration <= 0.0) throw Error("leg duration must be positive");
    if (!T.on_grid(duration))
        throw OffGrid("leg duration " + std::to_string(duration) +
                      " is off the model's time grid");
    if (rule.kind != JumpRule::Kind::Zero && rule.delta < 0.0)
        throw Error("jump size must be nonnegative");

    std::mt19937_64 rng(seed);
    auto measure = rule.norm_fn ? rule.norm_fn : [](const Vector& v) { return v.norm(); };

    PseudoOrbit p;
    p.points.reserve(static_cast<std::size_t>(n) + 1);
    p.points.push_back(x0);
    p.durations.assign(static_cast<std::size_t>(n), duration);
    p.delta = (rule.kind == JumpRule::Kind::Zero) ? 0.0 : rule.delta;
    p.R = duration;
    p.decaying = (rule.kind != JumpRule::Kind::Constant) || rule.delta == 0.0;
    p.seed = seed;

    for (int i = 0; i < n; ++i) {
        Vector next = T.apply(duration, p.points.back());
        double size = 0.0;
        if (rule.kind == JumpRule::Kind::Constant) size = rule.delta;
        if (rule.kind == JumpRule::Kind::Decaying)
            size = rule.delta * std::pow(rule.rho, static_cast<double>(i));
        if (size > 0.0) {
            Vector dir = rule.direction ? *rule.direction : random_unit(T.dim(), rng);
            const double dn = measure(dir);
            if (dn <= 0.0) throw Error("jump direction has zero size in the chosen norm");
            next += (size / dn) * dir;
        }
        p.points.push_back(std::move(next));
    }
    p.rebuild_times();
    return p;
}

/// Constant chain (x_0, t_star) repeated n times; its actual jump defect is
/// ||T(t_star) x_0 - x_0||, recorded as delta.
inline PseudoOrbit periodic_chain(const Semigroup& T, const Vector& x0, double t_star, int n) {
    if (n < 1) throw Error("chain needs at least one leg");
    if (!T.on_grid(t_star)) throw OffGrid("t_star is off the model's time grid");
    PseudoOrbit p;
    p.points.assign(static_cast<std::size_t>(n) + 1, x0);
    p.durations.assign(static_cast<std::size_t>(n), t_star);
    p.delta = (T.apply(t_star, x0) - x0).norm();
    p.R = t_star;
    p.decaying = p.delta == 0.0;
    p.rebuild_times();
    return p;
}

}  // namespace semishadow
