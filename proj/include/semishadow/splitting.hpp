#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "semishadow/matrix_semigroup.hpp"

namespace semishadow {

struct HyperbolicityCheck {
    bool hyperbolic = false;
    double gap = 0.0;  // min distance of sigma(T(1)) to the unit circle
};

/// Distance of sigma(T(1)) = exp(sigma(A)) to the unit circle; hyperbolic
/// when it exceeds gap_tol.
inline HyperbolicityCheck check_hyperbolic(const MatrixSemigroup& T, double gap_tol = 1e-9) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < T.spectrum().size(); ++i)
        gap = std::min(gap, std::abs(std::exp(T.spectrum()[i].real()) - 1.0));
    return {gap > gap_tol, gap};
}

/// Same test for lattice models given their step map: sigma(T(1)) moduli are
/// |mu|^{1/h} for mu in sigma(T(h)).
inline HyperbolicityCheck check_hyperbolic_map(const Matrix& step, double h,
                                               double gap_tol = 1e-9) {
    Eigen::ComplexEigenSolver<Matrix> es(step, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw EigFailure("eigenvalue computation failed");
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double mod = std::pow(std::abs(es.eigenvalues()[i]), 1.0 / h);
        gap = std::min(gap, std::abs(mod - 1.0));
    }
    return {gap > gap_tol, gap};
}

struct SpectralConditionReport {
    bool no_imaginary_spectrum = false;
    double resolvent_sup = std::numeric_limits<double>::infinity();
    double min_re_abs = 0.0;
    double sup_omega = 0.0;  // frequency attaining the sup
};

/// Tests min |Re sigma(A)| > tol and estimates sup over sampled lambda = i w,
/// w in [-omega_max, omega_max] (log-spaced plus 0), of ||(lambda I - A)^{-1}||.
inline SpectralConditionReport check_spectral_condition(const Matrix& A, double omega_max,
                                                        int n_samples, double tol = 1e-9) {
    if (n_samples < 3) throw Error("resolvent sweep needs at least 3 samples");
    Eigen::ComplexEigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw EigFailure("eigenvalue computation failed");
    SpectralConditionReport r;
    r.min_re_abs = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        r.min_re_abs = std::min(r.min_re_abs, std::abs(es.eigenvalues()[i].real()));
    r.no_imaginary_spectrum = r.min_re_abs > tol;
    if (!r.no_imaginary_spectrum) return r;  // sup is infinite along the axis

    std::vector<double> omegas{0.0};
    const double lo = omega_max * 1e-4;
    for (int k = 0; k < n_samples; ++k) {
        const double w = lo * std::pow(omega_max / lo, static_cast<double>(k) / (n_samples - 1));
        omegas.push_back(w);
        omegas.push_back(-w);
    }
    const Matrix I = Matrix::Identity(A.rows(), A.cols());
    r.resolvent_sup = 0.0;
    for (double w : omegas) {
        Eigen::JacobiSVD<Matrix> svd(Complex(0.0, w) * I - A);
        const double smin = svd.singularValues().minCoeff();
        if (smin < tol)
            throw SingularResolvent("resolvent nearly singular at omega = " + std::to_string(w));
        if (1.0 / smin > r.resolvent_sup) {
            r.resolvent_sup = 1.0 / smin;
            r.sup_omega = w;
        }
    }
    return r;
}

/// One invariant component of a hyperbolic splitting in factored form:
/// map(t) = basis * e^{t B} * cobasis equals T(t) P on the component and
/// stays numerically clean for large t (the complementary modes never enter).
struct SpectralFactor {
    Matrix basis;    // n x k
    Matrix cobasis;  // k x n
    MatrixExponential block;

    Eigen::Index component_dim() const { return basis.cols(); }
    Matrix projection() const { return basis * cobasis; }
    Matrix map(double t) const { return basis * block.matrix(t) * cobasis; }
    Vector apply(double t, const Vector& x) const {
        return basis * block.apply(t, cobasis * x);
    }
};

/// X = M + N with T(t)-invariant ranges, forward decay on M and backward
/// decay on N: ||T(t) P_M|| <= K_M e^{-lambda_M t} and
/// ||T(t)^{-1} P_N|| <= K_N e^{-lambda_N t}.
struct HyperbolicSplitting {
    Matrix P_M, P_N;
    double K_M = 1.0, lambda_M = std::numeric_limits<double>::infinity();
    double K_N = 1.0, lambda_N = std::numeric_limits<double>::infinity();
    double gap = 0.0;
    double margin = 0.9;
    double horizon_M = 0.0, horizon_N = 0.0;
    std::optional<SpectralFactor> stable;    // T(t) P_M
    std::optional<SpectralFactor> unstable;  // exposes T(t) P_N; apply(-t, .) for the inverse

    Eigen::Index dim() const { return P_M.rows(); }
    Eigen::Index stable_dim() const { return stable ? stable->component_dim() : 0; }
    Eigen::Index unstable_dim() const { return unstable ? unstable->component_dim() : 0; }
};

/// max of the component norms, the norm in which combined shadowing bounds
/// are stated.
inline double coupled_norm(const Vector& x, const HyperbolicSplitting& s) {
    if (x.size() != s.dim())
        throw DimensionMismatch("vector dimension does not match the splitting");
    return std::max((s.P_M * x).norm(), (s.P_N * x).norm());
}

namespace detail {

/// Empirical decay constant: raw = sup over sampled t in [0, horizon] of
/// ||map(t)|| e^{lambda t}; returns 1 when the sup is the t = 0 value 1
/// (orthogonal component), otherwise raw rounded up 5%.
inline double certify_decay_constant(const std::function<Matrix(double)>& map, double lambda,
                                     double horizon, int samples) {
    double raw = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double u = static_cast<double>(i) / (samples - 1);
        const double t = horizon * u * u;  // cluster samples near 0 where the sup lives
        Eigen::JacobiSVD<Matrix> svd(map(t));
        raw = std::max(raw, svd.singularValues()(0) * std::exp(lambda * t));
    }
    if (raw <= 1.0 + 1e-9) return 1.0;
    return 1.05 * raw;
}

}  // namespace detail

/// Spectral splitting of a hyperbolic matrix semigroup: sigma(T(1)) is
/// partitioned by modulus (equivalently sigma(A) by real part), projections
/// are assembled from a reordered Schur form, decay rates take the given
/// margin of the spectral bounds, and the K constants are certified by
/// sampling on [0, horizon] (default 50 / lambda per component).
inline HyperbolicSplitting compute_splitting(const MatrixSemigroup& T, double horizon = 0.0,
                                             double margin = 0.9, int k_samples = 200) {
    if (margin <= 0.0 || margin >= 1.0) throw Error("margin must lie in (0,1)");
    const auto check = check_hyperbolic(T);
    if (!check.hyperbolic)
        throw NotHyperbolic("spectrum of T(1) meets the unit circle (gap " +
                            std::to_string(check.gap) + ")");
    const Matrix& A = *T.generator();
    const Eigen::Index n = A.rows();

    Eigen::ComplexSchur<Matrix> schur(A, /*computeU=*/true);
    if (schur.info() != Eigen::Success) throw EigFailure("Schur decomposition failed");
    Matrix Tm = schur.matrixT();
    Matrix Q = schur.matrixU();
    std::vector<int> group(static_cast<size_t>(n));
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        group[static_cast<size_t>(i)] = (Tm(i, i).real() < 0.0) ? 0 : 1;
        if (Tm(i, i).real() < 0.0) ++k;
    }
    detail::schur_reorder(Tm, Q, group);

    HyperbolicSplitting s;
    s.gap = check.gap;
    s.margin = margin;

    double min_stable_rate = std::numeric_limits<double>::infinity();
    double min_unstable_rate = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = Tm(i, i).real();
        if (re < 0.0) min_stable_rate = std::min(min_stable_rate, -re);
        else min_unstable_rate = std::min(min_unstable_rate, re);
    }

    if (k == 0) {
        s.P_M = Matrix::Zero(n, n);
        s.P_N = Matrix::Identity(n, n);
        s.unstable = SpectralFactor{Matrix::Identity(n, n), Matrix::Identity(n, n),
                                    MatrixExponential(A)};
    } else if (k == n) {
        s.P_M = Matrix::Identity(n, n);
        s.P_N = Matrix::Zero(n, n);
        s.stable = SpectralFactor{Matrix::Identity(n, n), Matrix::Identity(n, n),
                                  MatrixExponential(A)};
    } else {
        const Matrix A11 = Tm.topLeftCorner(k, k);
        const Matrix A22 = Tm.bottomRightCorner(n - k, n - k);
        const Matrix A12 = Tm.topRightCorner(k, n - k);
        // Block diagonalization: A11 Y - Y A22 = -A12.
        const Matrix Y = detail::sylvester_triangular(A11, A22, -A12);
        const Matrix Q1 = Q.leftCols(k);
        const Matrix Q2 = Q.rightCols(n - k);
        SpectralFactor stable{Q1, Q1.adjoint() - Y * Q2.adjoint(), MatrixExponential(A11)};
        SpectralFactor unstable{Q1 * Y + Q2, Q2.adjoint(), MatrixExponential(A22)};
        s.P_M = stable.projection();
        s.P_N = unstable.projection();
        s.stable = std::move(stable);
        s.unstable = std::move(unstable);
    }

    if (s.stable) {
        s.lambda_M = margin * min_stable_rate;
        s.horizon_M = (horizon > 0.0) ? horizon : 50.0 / s.lambda_M;
        auto map = [&](double t) { return s.stable->map(t); };
        s.K_M = detail::certify_decay_constant(map, s.lambda_M, s.horizon_M, k_samples);
    }
    if (s.unstable) {
        s.lambda_N = margin * min_unstable_rate;
        s.horizon_N = (horizon > 0.0) ? horizon : 50.0 / s.lambda_N;
        auto map = [&](double t) { return s.unstable->map(-t); };
        s.K_N = detail::certify_decay_constant(map, s.lambda_N, s.horizon_N, k_samples);
    }
    return s;
}

/// Residual diagnostics for a computed splitting, all scaled relative.
struct SplittingResiduals {
    double idempotent = 0.0;       // ||P^2 - P||
    double complementarity = 0.0;  // ||P_M + P_N - I||
    double cross = 0.0;            // ||P_M P_N||
    double commute = 0.0;          // max_t ||P T(t) - T(t) P|| / (1 + ||T(t)||)
    double decay_margin_M = 0.0;   // max_t ||T(t) P_M|| e^{lambda t} / K_M
    double decay_margin_N = 0.0;
};

inline SplittingResiduals splitting_residuals(const MatrixSemigroup& T,
                                              const HyperbolicSplitting& s,
                                              int n_samples = 40) {
    SplittingResiduals r;
    r.idempotent = std::max((s.P_M * s.P_M - s.P_M).norm(), (s.P_N * s.P_N - s.P_N).norm());
    r.complementarity = (s.P_M + s.P_N - Matrix::Identity(s.dim(), s.dim())).norm();
    r.cross = (s.P_M * s.P_N).norm();
    // Commutation is sampled where the forward map stays well scaled.
    const double t_max = std::min({4.0, s.stable ? s.horizon_M : 4.0,
                                   s.unstable ? 10.0 / std::max(s.lambda_N, 0.1) : 4.0});
    for (int i = 0; i < n_samples; ++i) {
        const double t = t_max * static_cast<double>(i) / (n_samples - 1);
        const Matrix E = T.time_map(t);
        const double scale = 1.0 + E.norm();
        r.commute = std::max(r.commute, (s.P_M * E - E * s.P_M).norm() / scale);
    }
    for (int i = 0; i < n_samples; ++i) {
        const double u = static_cast<double>(i) / (n_samples - 1);
        if (s.stable) {
            const double t = s.horizon_M * u * u;
            Eigen::JacobiSVD<Matrix> svd(s.stable->map(t));
            r.decay_margin_M = std::max(
                r.decay_margin_M, svd.singularValues()(0) * std::exp(s.lambda_M * t) / s.K_M);
        }
        if (s.unstable) {
            const double t = s.horizon_N * u * u;
            Eigen::JacobiSVD<Matrix> svd(s.unstable->map(-t));
            r.decay_margin_N = std::max(
                r.decay_margin_N, svd.singularValues()(0) * std::exp(s.lambda_N * t) / s.K_N);
        }
    }
    return r;
}

}  // namespace semishadow
