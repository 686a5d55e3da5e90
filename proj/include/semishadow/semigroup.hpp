#pragma once

#include <cmath>
#include <optional>

#include "semishadow/vec.hpp"

namespace semishadow {

inline constexpr double kGridTol = 1e-9;

/// One-parameter family t >= 0 of bounded linear maps with T(0) = I and
/// T(s+t) = T(s)T(t). Concrete subclasses supply the action; models living on
/// a time lattice expose time_grid() and reject off-grid times.
class Semigroup {
public:
    virtual ~Semigroup() = default;

    virtual Eigen::Index dim() const = 0;

    /// Lattice spacing h when the action is defined only for t = k*h.
    virtual std::optional<double> time_grid() const { return std::nullopt; }

    virtual bool invertible() const { return false; }

    /// Infinitesimal generator, when a dense matrix representation exists.
    virtual const Matrix* generator() const { return nullptr; }

    Vector apply(double t, const Vector& x) const {
        check_time(t);
        check_dim(x);
        return do_apply(t, x);
    }

    Vector apply_inverse(double t, const Vector& x) const {
        check_time(t);
        check_dim(x);
        if (!invertible()) throw NotInvertible("semigroup has no inverse action");
        return do_apply_inverse(t, x);
    }

    /// Dense matrix of the time t-map. Default assembles columns by applying
    /// the action to basis vectors.
    virtual Matrix time_map(double t) const {
        const Eigen::Index n = dim();
        Matrix m(n, n);
        for (Eigen::Index j = 0; j < n; ++j) m.col(j) = apply(t, basis_vector(n, j));
        return m;
    }

    bool on_grid(double t) const {
        auto h = time_grid();
        if (!h) return true;
        const double k = t / *h;
        return std::abs(k - std::round(k)) <= kGridTol * (1.0 + std::abs(k));
    }

    /// Nearest lattice time >= grid step (never rounds to zero for t > 0).
    double snap_to_grid(double t) const {
        auto h = time_grid();
        if (!h) return t;
        double k = std::round(t / *h);
        if (t > 0.0 && k < 1.0) k = 1.0;
        return k * *h;
    }

protected:
    virtual Vector do_apply(double t, const Vector& x) const = 0;

    virtual Vector do_apply_inverse(double /*t*/, const Vector& /*x*/) const {
        throw NotInvertible("semigroup has no inverse action");
    }

    void check_time(double t) const {
        if (t < 0.0) throw NegativeTime("time must be nonnegative, got " + std::to_string(t));
        if (!on_grid(t))
            throw OffGrid("time " + std::to_string(t) + " is not a multiple of the grid step " +
                          std::to_string(*time_grid()));
    }

    void check_dim(const Vector& x) const {
        if (x.size() != dim())
            throw DimensionMismatch("state dimension " + std::to_string(x.size()) +
                                    " does not match semigroup dimension " + std::to_string(dim()));
    }

    long grid_steps(double t) const {
        return static_cast<long>(std::llround(t / *time_grid()));
    }
};

/// Largest singular value of the explicit time t-map.
inline double operator_norm_estimate(const Semigroup& T, double t) {
    Matrix m = T.time_map(t);
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

}  // namespace semishadow
