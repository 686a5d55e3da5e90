#pragma once

#include "semishadow/expm.hpp"
#include "semishadow/semigroup.hpp"

namespace semishadow {

/// Semigroup T(t) = e^{tA} for a dense complex generator A. Always invertible
/// with T(t)^{-1} = e^{-tA}.
class MatrixSemigroup final : public Semigroup {
public:
    explicit MatrixSemigroup(Matrix generator, double cond_limit = 1e8)
        : engine_(std::move(generator), cond_limit) {}

    Eigen::Index dim() const override { return engine_.dim(); }
    bool invertible() const override { return true; }
    const Matrix* generator() const override { return &engine_.generator(); }

    const MatrixExponential& engine() const { return engine_; }

    /// sigma(A).
    const Vector& spectrum() const { return engine_.eigenvalues(); }

    Matrix time_map(double t) const override { return engine_.matrix(t); }

protected:
    Vector do_apply(double t, const Vector& x) const override { return engine_.apply(t, x); }
    Vector do_apply_inverse(double t, const Vector& x) const override {
        return engine_.apply(-t, x);
    }

private:
    MatrixExponential engine_;
};

/// Scalar semigroup T(t)x = e^{rate t} x as a 1x1 matrix model.
inline MatrixSemigroup make_scalar(Complex rate) {
    Matrix a(1, 1);
    a(0, 0) = rate;
    return MatrixSemigroup(std::move(a));
}

}  // namespace semishadow
