#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "semishadow/matrix_semigroup.hpp"
#include "semishadow/semigroup.hpp"

namespace semishadow {

// ---------------------------------------------------------------------------
// Heat model: Dirichlet Laplacian on (0, L) discretized by central differences
// on n interior points, generator A = (1/h^2) tridiag(1, -2, 1), h = L/(n+1).
// ---------------------------------------------------------------------------

inline MatrixSemigroup make_heat(int n, double length = std::numbers::pi) {
    if (n < 1) throw Error("heat model needs at least one interior point");
    if (length <= 0.0) throw Error("heat model needs a positive domain length");
    const double h = length / (n + 1);
    const double d = 1.0 / (h * h);
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = -2.0 * d;
        if (i > 0) a(i, i - 1) = d;
        if (i + 1 < n) a(i, i + 1) = d;
    }
    return MatrixSemigroup(std::move(a));
}

/// Eigenvalues of -A for the discrete Dirichlet Laplacian, ascending:
/// (2/h^2) (1 - cos(k pi / (n+1))), k = 1..n.
inline std::vector<double> heat_eigenvalues(int n, double length = std::numbers::pi) {
    const double h = length / (n + 1);
    std::vector<double> ev(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k)
        ev[static_cast<size_t>(k - 1)] =
            (2.0 / (h * h)) * (1.0 - std::cos(k * std::numbers::pi / (n + 1)));
    return ev;
}

// ---------------------------------------------------------------------------
// Transport model: decaying shift on a periodic ring of n cells with lattice
// step h. The time k*h map sends coordinate j to e^{-k h theta} times the
// value at j+k (mod n): an isometry times a scalar, invertible on-grid.
// ---------------------------------------------------------------------------

class TransportSemigroup final : public Semigroup {
public:
    TransportSemigroup(double theta, int n, double h) : theta_(theta), n_(n), h_(h) {
        if (theta == 0.0) throw ZeroTheta("transport model needs theta != 0");
        if (n < 2) throw Error("transport ring needs at least two cells");
        if (h <= 0.0) throw Error("transport grid step must be positive");
    }

    Eigen::Index dim() const override { return n_; }
    std::optional<double> time_grid() const override { return h_; }
    bool invertible() const override { return true; }
    double theta() const { return theta_; }
    double step() const { return h_; }

protected:
    Vector do_apply(double t, const Vector& x) const override {
        const long k = grid_steps(t);
        const double decay = std::exp(-t * theta_);
        Vector y(n_);
        for (Eigen::Index j = 0; j < n_; ++j) y[j] = decay * x[mod(j + k)];
        return y;
    }

    Vector do_apply_inverse(double t, const Vector& x) const override {
        const long k = grid_steps(t);
        const double grow = std::exp(t * theta_);
        Vector y(n_);
        for (Eigen::Index j = 0; j < n_; ++j) y[j] = grow * x[mod(j - k)];
        return y;
    }

private:
    Eigen::Index mod(long j) const {
        long r = j % n_;
        if (r < 0) r += n_;
        return static_cast<Eigen::Index>(r);
    }

    double theta_;
    Eigen::Index n_;
    double h_;
};

inline TransportSemigroup make_transport(double theta, int n, double h) {
    return TransportSemigroup(theta, n, h);
}

// ---------------------------------------------------------------------------
// Rotation model: multiplication by e^{i theta t} embedded in R^2, generator
// [[0, -theta], [theta, 0]]. Norm-preserving for every t.
// ---------------------------------------------------------------------------

inline MatrixSemigroup make_rotation(double theta) {
    if (theta == 0.0) throw ZeroTheta("rotation model needs theta != 0");
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = -theta;
    a(1, 0) = theta;
    return MatrixSemigroup(std::move(a));
}

// ---------------------------------------------------------------------------
// Weighted shift on the index window {-m, ..., m} with lattice step h and
// weights w_j = exp(sign * |j| h). The time-h map is (Tu)_j = (w_j / w_{j+1})
// u_{j+1} with u_{m+1} = 0: support travels left one cell per step and exits
// the window at -m. The declared splitting is M = {j < 0}, N = {j >= 0}.
// ---------------------------------------------------------------------------

enum class WeightConvention {
    Growing,   // w(x) = e^{|x|}
    Decaying,  // w(x) = e^{-|x|}
};

inline const char* to_string(WeightConvention c) {
    return c == WeightConvention::Growing ? "growing" : "decaying";
}

class GhShiftSemigroup final : public Semigroup {
public:
    GhShiftSemigroup(int half_window, double h, WeightConvention conv)
        : m_(half_window), h_(h), conv_(conv) {
        if (half_window < 4) throw WindowTooSmall("index window needs half width >= 4");
        if (h <= 0.0) throw Error("lattice step must be positive");
    }

    Eigen::Index dim() const override { return 2 * m_ + 1; }
    std::optional<double> time_grid() const override { return h_; }
    bool invertible() const override { return true; }  // truncated inverse; see do_apply_inverse

    int half_window() const { return static_cast<int>(m_); }
    double step() const { return h_; }
    WeightConvention convention() const { return conv_; }

    double weight(long j) const {
        const double s = (conv_ == WeightConvention::Growing) ? 1.0 : -1.0;
        return std::exp(s * std::abs(static_cast<double>(j)) * h_);
    }

    /// Array position of lattice index j in [-m, m].
    Eigen::Index pos(long j) const { return static_cast<Eigen::Index>(j + m_); }

    /// Coordinates of the forward-invariant component M (j < 0).
    std::vector<Eigen::Index> stable_positions() const {
        std::vector<Eigen::Index> v;
        for (long j = -m_; j < 0; ++j) v.push_back(pos(j));
        return v;
    }

    /// Coordinates of the backward-invariant component N (j >= 0).
    std::vector<Eigen::Index> unstable_positions() const {
        std::vector<Eigen::Index> v;
        for (long j = 0; j <= m_; ++j) v.push_back(pos(j));
        return v;
    }

    /// Dense one-step map with zero boundary (nilpotent: support exits at -m).
    Matrix step_matrix() const {
        Matrix t = Matrix::Zero(dim(), dim());
        for (long j = -m_; j < m_; ++j) t(pos(j), pos(j + 1)) = weight(j) / weight(j + 1);
        return t;
    }

    /// Invertible periodic closure: the exiting cell wraps to +m. The weights
    /// are symmetric in |j|, so the cycle of ratios telescopes to 1 and the
    /// closure's spectrum lies on the unit circle.
    Matrix periodic_step_matrix() const {
        Matrix t = step_matrix();
        t(pos(m_), pos(-m_)) = weight(m_) / weight(-m_);
        return t;
    }

    /// [jmin, jmax] lattice support of u above tol, or empty (jmin > jmax).
    std::pair<long, long> support(const Vector& u, double tol = 1e-14) const {
        long lo = m_ + 1, hi = -m_ - 1;
        for (long j = -m_; j <= m_; ++j) {
            if (std::abs(u[pos(j)]) > tol) {
                lo = std::min(lo, j);
                hi = std::max(hi, j);
            }
        }
        return {lo, hi};
    }

    /// True when the support is within `margin` cells of the window edge.
    bool near_window_edge(const Vector& u, long margin = 2, double tol = 1e-14) const {
        auto [lo, hi] = support(u, tol);
        if (lo > hi) return false;
        return lo <= -m_ + margin || hi >= m_ - margin;
    }

protected:
    Vector do_apply(double t, const Vector& x) const override {
        const long k = grid_steps(t);
        Vector y = Vector::Zero(dim());
        for (long j = -m_; j <= m_; ++j) {
            const long src = j + k;
            if (src <= m_) y[pos(j)] = (weight(j) / weight(src)) * x[pos(src)];
        }
        return y;
    }

    Vector do_apply_inverse(double t, const Vector& x) const override {
        const long k = grid_steps(t);
        Vector y = Vector::Zero(dim());
        for (long j = -m_; j <= m_; ++j) {
            const long src = j - k;
            if (src >= -m_) y[pos(j)] = (weight(j) / weight(src)) * x[pos(src)];
        }
        return y;
    }

private:
    long m_;
    double h_;
    WeightConvention conv_;
};

inline GhShiftSemigroup make_gh_shift(int half_window, double h,
                                      WeightConvention conv = WeightConvention::Decaying) {
    return GhShiftSemigroup(half_window, h, conv);
}

/// Decide which weight convention realizes the exact interior decay
/// identities: one step forward on a basis vector in M and one step backward
/// on a basis vector in N must both scale the norm by e^{-h}.
inline WeightConvention verify_gh_convention(int half_window, double h) {
    auto holds = [&](WeightConvention c) {
        GhShiftSemigroup sg(half_window, h, c);
        const double expected = std::exp(-h);
        for (long q : {3L, 4L, static_cast<long>(half_window) / 2}) {
            Vector em = basis_vector(sg.dim(), sg.pos(-q));
            Vector en = basis_vector(sg.dim(), sg.pos(+q));
            if (std::abs(sg.apply(h, em).norm() - expected) > 1e-12) return false;
            if (std::abs(sg.apply_inverse(h, en).norm() - expected) > 1e-12) return false;
        }
        return true;
    };
    const bool growing = holds(WeightConvention::Growing);
    const bool decaying = holds(WeightConvention::Decaying);
    if (growing == decaying)
        throw NeitherConventionHolds(
            "expected exactly one weight convention to satisfy the interior decay identities");
    return growing ? WeightConvention::Growing : WeightConvention::Decaying;
}

inline WeightConvention verify_gh_convention(const GhShiftSemigroup& model) {
    return verify_gh_convention(model.half_window(), model.step());
}

}  // namespace semishadow
