#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "semishadow/models.hpp"
#include "semishadow/pseudo_orbit.hpp"
#include "semishadow/shadowing.hpp"
#include "semishadow/splitting.hpp"

namespace semishadow {

// ---------------------------------------------------------------------------
// Nonwandering probe
// ---------------------------------------------------------------------------

/// Probe points y in the eps_nbhd-ball around x (offsets scale with the
/// radius, deterministic per seed) and times t in [R, t_max]; true iff some
/// probe returns to the ball. False means "not detected at this resolution".
inline bool is_nonwandering(const Vector& x, const Semigroup& T, double eps_nbhd, double R,
                            double t_max, int n_probe = 16, int n_times = 128,
                            std::uint64_t seed = 0) {
    if (eps_nbhd <= 0.0 || R <= 0.0 || t_max < R) throw Error("invalid probe parameters");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vector> probes{x};
    for (int i = 1; i < n_probe; ++i)
        probes.push_back(x + eps_nbhd * unif(rng) * random_unit(T.dim(), rng));
    for (int k = 0; k < n_times; ++k) {
        double t = R + (t_max - R) * static_cast<double>(k) / std::max(1, n_times - 1);
        t = T.snap_to_grid(t);
        if (t < R || t > t_max) continue;
        for (const auto& y : probes)
            if ((T.apply(t, y) - x).norm() < eps_nbhd) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Chain graph and chain recurrent set
// ---------------------------------------------------------------------------

/// Sampled-grid chain reachability: edge i -> j present iff some tested
/// on-grid t in [R, t_max] has ||T(t) x_i - x_j|| < delta. A sound
/// under-approximation; missing edges are possible at coarse resolution.
struct ChainGraph {
    std::vector<Vector> nodes;
    std::vector<std::vector<int>> adjacency;
    double delta = 0.0, R = 0.0, t_max = 0.0;
    std::vector<double> times;
};

inline ChainGraph build_chain_graph(const Semigroup& T, std::vector<Vector> nodes, double delta,
                                    double R, double t_max, int n_times = 32,
                                    bool log_spacing = true) {
    if (delta <= 0.0 || R <= 0.0 || t_max < R) throw Error("invalid chain parameters");
    ChainGraph g;
    g.delta = delta;
    g.R = R;
    g.t_max = t_max;
    for (int k = 0; k < n_times; ++k) {
        const double u = static_cast<double>(k) / std::max(1, n_times - 1);
        double t = log_spacing ? R * std::pow(t_max / R, u) : R + (t_max - R) * u;
        t = T.snap_to_grid(t);
        if (t < R - 1e-12 || t > t_max + 1e-12) continue;
        if (g.times.empty() || t > g.times.back() + 1e-15) g.times.push_back(t);
    }
    g.nodes = std::move(nodes);
    const int n = static_cast<int>(g.nodes.size());
    g.adjacency.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i) {
        std::vector<bool> reached(static_cast<std::size_t>(n), false);
        for (double t : g.times) {
            const Vector img = T.apply(t, g.nodes[static_cast<std::size_t>(i)]);
            for (int j = 0; j < n; ++j)
                if (!reached[static_cast<std::size_t>(j)] &&
                    (img - g.nodes[static_cast<std::size_t>(j)]).norm() < delta)
                    reached[static_cast<std::size_t>(j)] = true;
        }
        for (int j = 0; j < n; ++j)
            if (reached[static_cast<std::size_t>(j)])
                g.adjacency[static_cast<std::size_t>(i)].push_back(j);
    }
    return g;
}

namespace detail {

/// Tarjan strongly connected components, iterative.
inline std::vector<int> scc_labels(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
        comp(static_cast<std::size_t>(n), -1);
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    std::vector<int> stack;
    int next_index = 0, next_comp = 0;

    struct Frame {
        int v;
        std::size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] != -1) continue;
        std::vector<Frame> call{{root, 0}};
        index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = next_index++;
        stack.push_back(root);
        on_stack[static_cast<std::size_t>(root)] = true;
        while (!call.empty()) {
            auto& f = call.back();
            const auto& edges = adj[static_cast<std::size_t>(f.v)];
            if (f.child < edges.size()) {
                const int w = edges[f.child++];
                if (index[static_cast<std::size_t>(w)] == -1) {
                    index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] =
                        next_index++;
                    stack.push_back(w);
                    on_stack[static_cast<std::size_t>(w)] = true;
                    call.push_back({w, 0});
                } else if (on_stack[static_cast<std::size_t>(w)]) {
                    low[static_cast<std::size_t>(f.v)] =
                        std::min(low[static_cast<std::size_t>(f.v)],
                                 index[static_cast<std::size_t>(w)]);
                }
            } else {
                if (low[static_cast<std::size_t>(f.v)] == index[static_cast<std::size_t>(f.v)]) {
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<std::size_t>(w)] = false;
                        comp[static_cast<std::size_t>(w)] = next_comp;
                    } while (w != f.v);
                    ++next_comp;
                }
                const int v = f.v;
                call.pop_back();
                if (!call.empty())
                    low[static_cast<std::size_t>(call.back().v)] =
                        std::min(low[static_cast<std::size_t>(call.back().v)],
                                 low[static_cast<std::size_t>(v)]);
            }
        }
    }
    return comp;
}

}  // namespace detail

/// Nodes lying on a cycle of the chain graph: members of a strongly connected
/// component with an internal edge (size >= 2 or a self-loop).
inline std::vector<int> chain_recurrent_set(const ChainGraph& g) {
    const auto comp = detail::scc_labels(g.adjacency);
    const int n = static_cast<int>(g.nodes.size());
    std::vector<int> comp_size(comp.size(), 0);
    for (int c : comp) ++comp_size[static_cast<std::size_t>(c)];
    std::vector<bool> self_loop(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i)
        for (int j : g.adjacency[static_cast<std::size_t>(i)])
            if (j == i) self_loop[static_cast<std::size_t>(i)] = true;
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
        if (self_loop[static_cast<std::size_t>(i)] ||
            comp_size[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])] >= 2)
            out.push_back(i);
    }
    return out;
}

inline std::vector<int> chain_recurrent_set(const Semigroup& T, std::vector<Vector> nodes,
                                            double delta, double R, double t_max,
                                            int n_times = 32, bool log_spacing = true) {
    return chain_recurrent_set(
        build_chain_graph(T, std::move(nodes), delta, R, t_max, n_times, log_spacing));
}

/// 2-D real grid [-extent, extent]^2 embedded into C^2.
inline std::vector<Vector> square_grid(double extent, double step) {
    std::vector<Vector> nodes;
    const int k = static_cast<int>(std::round(extent / step));
    for (int i = -k; i <= k; ++i)
        for (int j = -k; j <= k; ++j) {
            Vector v(2);
            v << Complex(i * step, 0.0), Complex(j * step, 0.0);
            nodes.push_back(std::move(v));
        }
    return nodes;
}

/// count points on the circle of given radius in C^2 (real embedding).
inline std::vector<Vector> circle_grid(double radius, int count) {
    std::vector<Vector> nodes;
    for (int i = 0; i < count; ++i) {
        const double a = 2.0 * std::numbers::pi * i / count;
        Vector v(2);
        v << Complex(radius * std::cos(a), 0.0), Complex(radius * std::sin(a), 0.0);
        nodes.push_back(std::move(v));
    }
    return nodes;
}

// ---------------------------------------------------------------------------
// Rotation unshadowability demonstration
// ---------------------------------------------------------------------------

/// Radius-drifting pseudo-orbit on the rotation model with full-period legs:
/// x_i = (1 + i delta') x_0, t_i = 2 pi / theta, jump norm exactly delta'.
/// Every true orbit has constant modulus, so its sup error is at least
/// max_i |r - r_i| >= m delta' / 2; a 1-D search over the modulus confirms
/// numerically.
struct RotationDemoResult {
    PseudoOrbit orbit;
    double analytic_lower_bound = 0.0;
    double numeric_lower_bound = 0.0;
    double epsilon = 0.0;
    double delta_prime = 0.0;
    int m = 0;
    bool certified = false;
};

inline RotationDemoResult rotation_no_shadowing_demo(double theta, double epsilon,
                                                     double delta_prime, int m) {
    if (theta == 0.0) throw ZeroTheta("rotation demo needs theta != 0");
    if (m < 1 || delta_prime < 0.0 || m * delta_prime < 3.0 * epsilon)
        throw ParameterTooSmall("need m * delta' >= 3 epsilon for a certified bound");

    const double period = 2.0 * std::numbers::pi / std::abs(theta);
    Vector u(2);
    u << Complex(1.0, 0.0), Complex(0.0, 0.0);

    RotationDemoResult out;
    out.epsilon = epsilon;
    out.delta_prime = delta_prime;
    out.m = m;
    PseudoOrbit& p = out.orbit;
    for (int i = 0; i <= m; ++i) p.points.push_back((1.0 + i * delta_prime) * u);
    p.durations.assign(static_cast<std::size_t>(m), period);
    p.delta = delta_prime;
    p.R = period;
    p.rebuild_times();

    out.analytic_lower_bound = m * delta_prime / 2.0;

    // T(t̂_i) is a full rotation, so the sup error of the orbit of r*u over
    // the leg starts is exactly max_i |r - r_i|; search r on a fine grid with
    // golden-section refinement.
    auto objective = [&](double r) {
        double worst = 0.0;
        for (int i = 0; i <= m; ++i)
            worst = std::max(worst, std::abs(r - (1.0 + i * delta_prime)));
        return worst;
    };
    double lo = 1.0 - m * delta_prime, hi = 1.0 + 2.0 * m * delta_prime;
    double best = std::numeric_limits<double>::infinity();
    double best_r = lo;
    for (int k = 0; k <= 2000; ++k) {
        const double r = lo + (hi - lo) * k / 2000.0;
        const double f = objective(r);
        if (f < best) {
            best = f;
            best_r = r;
        }
    }
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_r - (hi - lo) / 2000.0, b = best_r + (hi - lo) / 2000.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    for (int k = 0; k < 80; ++k) {
        if (objective(c) < objective(d)) b = d;
        else a = c;
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    out.numeric_lower_bound = objective((a + b) / 2.0);

    const bool analytic_exceeds = out.analytic_lower_bound > epsilon;
    const bool numeric_exceeds = out.numeric_lower_bound > epsilon;
    const bool agree = std::abs(out.numeric_lower_bound - out.analytic_lower_bound) <=
                       0.01 * std::max(out.analytic_lower_bound, 1e-300);
    out.certified = analytic_exceeds && numeric_exceeds && agree;
    return out;
}

// ---------------------------------------------------------------------------
// Weighted-shift recurrence demonstration
// ---------------------------------------------------------------------------

/// A nonzero state on the shift decays forward and backward (its support
/// crosses the origin and leaves through the decaying side), so a
/// (delta, R)-chain closes from u through 0 back to u. Per the collapse of
/// the chain recurrent set for hyperbolic problems, the model cannot be
/// hyperbolic; the spectral check on the invertible periodic closure agrees.
struct GhRecurrenceReport {
    std::vector<double> forward_norms;
    std::vector<double> backward_norms;
    int crossing_step = -1;
    PseudoOrbit chain;
    bool chain_closed = false;
    double chain_delta = 0.0, chain_R = 0.0;
    HyperbolicityCheck closure_check;
    bool truncation_invertible = true;
    double truncation_min_singular_value = 0.0;
};

inline GhRecurrenceReport gh_recurrence_demo(const GhShiftSemigroup& model, int support_j,
                                             double delta, double R) {
    const int m = model.half_window();
    if (std::abs(support_j) > m - 2)
        throw WindowExit("starting support must sit at least 2 cells inside the window");
    if (delta <= 0.0 || R <= 0.0) throw Error("chain parameters must be positive");
    const double h = model.step();

    GhRecurrenceReport out;
    out.chain_delta = delta;
    out.chain_R = R;

    const Vector u = basis_vector(model.dim(), model.pos(support_j));

    // Forward trace until the norm drops below delta/2; support moves left.
    Vector z = u;
    out.forward_norms.push_back(z.norm());
    int steps_forward = 0;
    while (z.norm() >= delta / 2.0) {
        if (model.near_window_edge(z))
            throw WindowExit("forward trace reached the window edge; enlarge the window");
        z = model.apply(h, z);
        ++steps_forward;
        out.forward_norms.push_back(z.norm());
        if (out.crossing_step < 0 && model.support(z).second < 0)
            out.crossing_step = steps_forward;
        if (steps_forward > 100000) throw Error("forward trace did not decay");
    }

    // Backward trace for the same number of steps; support moves right.
    Vector w = u;
    out.backward_norms.push_back(w.norm());
    for (int k = 0; k < steps_forward; ++k) {
        if (model.near_window_edge(w)) break;  // backward side decays immediately; trace what fits
        w = model.apply_inverse(h, w);
        out.backward_norms.push_back(w.norm());
    }

    // Re-entry point: v = eta e_{j0} with eta = weight ratio such that the
    // forward image after (j0 - support_j) steps is exactly u.
    int j0 = support_j + 1;
    double eta = 0.0;
    for (; j0 <= m - 2; ++j0) {
        eta = model.weight(j0) / model.weight(support_j);
        const double travel = (j0 - support_j) * h;
        if (eta < delta && travel >= R) break;
    }
    if (j0 > m - 2)
        throw WindowExit("window too small to host a re-entry point below delta; enlarge it");
    const Vector v = eta * basis_vector(model.dim(), model.pos(j0));

    // Chain u -> (decay) -> 0 -> (dwell) -> 0 -> (jump to v, grow) -> u.
    const double t_decay = std::max(steps_forward * h, model.snap_to_grid(R));
    const double t_dwell = model.snap_to_grid(R);
    const double t_grow = (j0 - support_j) * h;
    PseudoOrbit& chain = out.chain;
    chain.points = {u, Vector::Zero(model.dim()), v, u};
    chain.durations = {t_decay, t_dwell, t_grow};
    chain.delta = delta;
    chain.R = R;
    chain.rebuild_times();
    const auto report = validate(chain, model);
    out.chain_closed = report.valid;

    out.closure_check = check_hyperbolic_map(model.periodic_step_matrix(), h);
    Eigen::JacobiSVD<Matrix> svd(model.step_matrix());
    out.truncation_min_singular_value = svd.singularValues().minCoeff();
    out.truncation_invertible = out.truncation_min_singular_value > 1e-12;
    return out;
}

}  // namespace semishadow
