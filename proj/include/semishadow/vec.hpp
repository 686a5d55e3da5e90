#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>

#include "semishadow/errors.hpp"

namespace semishadow {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Hermitian (Euclidean) norm of a state vector.
inline double norm(const Vector& x) { return x.norm(); }

inline void require_same_dim(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("vector dimensions differ: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
}

/// Embed a real coordinate vector into the complex state space.
inline Vector embed_real(const RealVector& x) {
    Vector z(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) z[i] = Complex(x[i], 0.0);
    return z;
}

inline Vector basis_vector(Eigen::Index dim, Eigen::Index k) {
    Vector e = Vector::Zero(dim);
    e[k] = 1.0;
    return e;
}

/// Uniform direction on the unit sphere of C^dim (Gaussian deviates, normalized).
template <class Rng>
Vector random_unit(Eigen::Index dim, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(dim);
    double n2 = 0.0;
    do {
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
        n2 = v.norm();
    } while (n2 < 1e-12);
    return v / n2;
}

template <class Rng>
Vector random_in_ball(const Vector& center, double radius, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return center + radius * unif(rng) * random_unit(center.size(), rng);
}

}  // namespace semishadow
