#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "semishadow/vec.hpp"

namespace semishadow {
namespace detail {

/// Swap the adjacent diagonal entries k and k+1 of the upper triangular T by a
/// unitary similarity, accumulating the rotation into Q (ztrexc-style).
inline void schur_swap_adjacent(Matrix& T, Matrix& Q, Eigen::Index k) {
    const Complex a = T(k, k);
    const Complex b = T(k + 1, k + 1);
    const Complex c = T(k, k + 1);
    // Eigenvector of [[a,c],[0,b]] for eigenvalue b is (c, b-a).
    const double scale = std::hypot(std::abs(c), std::abs(b - a));
    if (scale < 1e-300) {
        // Equal eigenvalues with no coupling: nothing to rotate.
        return;
    }
    Eigen::Matrix2cd g;
    const Complex v0 = c / scale, v1 = (b - a) / scale;
    g << v0, -std::conj(v1), v1, std::conj(v0);
    const Eigen::Index n = T.rows();
    T.block(k, k, 2, n - k) = g.adjoint() * T.block(k, k, 2, n - k);
    T.block(0, k, k + 2, 2) = T.block(0, k, k + 2, 2) * g;
    T(k + 1, k) = 0.0;
    Q.middleCols(k, 2) = Q.middleCols(k, 2) * g;
}

/// Reorder the Schur form so positions are sorted ascending by group id,
/// using only adjacent swaps (stable within a group).
inline void schur_reorder(Matrix& T, Matrix& Q, std::vector<int>& group) {
    const Eigen::Index n = T.rows();
    bool moved = true;
    while (moved) {
        moved = false;
        for (Eigen::Index k = 0; k + 1 < n; ++k) {
            if (group[k] > group[k + 1]) {
                schur_swap_adjacent(T, Q, k);
                std::swap(group[k], group[k + 1]);
                moved = true;
            }
        }
    }
}

/// Cluster eigenvalues whose pairwise distance is below tol (transitive
/// closure), returning a group id per position; ids are ordered by first
/// appearance along the diagonal.
inline std::vector<int> cluster_eigenvalues(const Vector& lambdas, double tol) {
    const Eigen::Index n = lambdas.size();
    std::vector<int> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(lambdas[i] - lambdas[j]) <= tol) parent[find(static_cast<int>(j))] = find(static_cast<int>(i));
    std::vector<int> id(static_cast<size_t>(n), -1);
    std::vector<int> order;
    for (Eigen::Index i = 0; i < n; ++i) {
        int r = find(static_cast<int>(i));
        if (id[r] < 0) {
            id[r] = static_cast<int>(order.size());
            order.push_back(r);
        }
    }
    std::vector<int> group(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) group[i] = id[find(static_cast<int>(i))];
    return group;
}

/// Solve A X - X B = C with A, B upper triangular and sigma(A), sigma(B)
/// disjoint, by forward column sweep and back-substitution.
inline Matrix sylvester_triangular(const Matrix& A, const Matrix& B, const Matrix& C) {
    const Eigen::Index p = A.rows(), q = B.rows();
    Matrix X(p, q);
    for (Eigen::Index c = 0; c < q; ++c) {
        Vector rhs = C.col(c);
        for (Eigen::Index r = 0; r < c; ++r) rhs += X.col(r) * B(r, c);
        // (A - B(c,c) I) x = rhs, upper triangular back-substitution.
        for (Eigen::Index i = p - 1; i >= 0; --i) {
            Complex s = rhs[i];
            for (Eigen::Index j = i + 1; j < p; ++j) s -= A(i, j) * X(j, c);
            X(i, c) = s / (A(i, i) - B(c, c));
        }
    }
    return X;
}

/// exp(M) for a small upper triangular block via diagonal shift plus scaling
/// and squaring of the Taylor series. The shift leaves a matrix dominated by
/// its nilpotent part, so convergence is fast.
inline Matrix exp_triangular_block(const Matrix& M) {
    const Eigen::Index b = M.rows();
    const Complex mu = M.diagonal().sum() / static_cast<double>(b);
    Matrix W = M - mu * Matrix::Identity(b, b);
    const double wn = W.cwiseAbs().rowwise().sum().maxCoeff();
    int s = 0;
    if (wn > 0.5) s = static_cast<int>(std::ceil(std::log2(wn / 0.5)));
    W /= std::pow(2.0, s);
    Matrix F = Matrix::Identity(b, b);
    Matrix term = Matrix::Identity(b, b);
    for (int k = 1; k <= 40; ++k) {
        term = (term * W) / static_cast<double>(k);
        F += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18 * F.cwiseAbs().maxCoeff()) break;
    }
    for (int k = 0; k < s; ++k) F = F * F;
    return std::exp(mu) * F;
}

}  // namespace detail

/// Action and dense form of e^{tA} for a dense complex generator A.
///
/// Uses the eigendecomposition when the eigenvector matrix is well enough
/// conditioned; otherwise falls back to the Schur form with a clustered
/// block Parlett recurrence, which remains accurate for defective A.
class MatrixExponential {
public:
    explicit MatrixExponential(Matrix A, double cond_limit = 1e8) : A_(std::move(A)) {
        if (A_.rows() != A_.cols()) throw DimensionMismatch("generator must be square");
        Eigen::ComplexEigenSolver<Matrix> es(A_, /*computeEigenvectors=*/true);
        if (es.info() == Eigen::Success) {
            Eigen::JacobiSVD<Matrix> svd(es.eigenvectors());
            const double smin = svd.singularValues().minCoeff();
            const double smax = svd.singularValues().maxCoeff();
            cond_ = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
            if (std::isfinite(cond_) && cond_ < cond_limit) {
                evals_ = es.eigenvalues();
                V_ = es.eigenvectors();
                Vinv_ = V_.partialPivLu().solve(Matrix::Identity(A_.rows(), A_.cols()));
                return;
            }
        }
        init_schur();
    }

    Eigen::Index dim() const { return A_.rows(); }
    const Matrix& generator() const { return A_; }
    const Vector& eigenvalues() const { return evals_; }
    bool used_schur() const { return schur_; }
    double eigenvector_condition() const { return cond_; }

    /// e^{tA} x; t may be negative (inverse action).
    Vector apply(double t, const Vector& x) const {
        if (!schur_) {
            Vector c = Vinv_ * x;
            for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::exp(t * evals_[i]);
            return V_ * c;
        }
        return Q_ * (exp_triangular(t) * (Q_.adjoint() * x));
    }

    /// Dense e^{tA}.
    Matrix matrix(double t) const {
        if (!schur_) {
            Matrix m = V_;
            for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) *= std::exp(t * evals_[j]);
            return m * Vinv_;
        }
        return Q_ * exp_triangular(t) * Q_.adjoint();
    }

private:
    void init_schur() {
        schur_ = true;
        Eigen::ComplexSchur<Matrix> schur(A_, /*computeU=*/true);
        if (schur.info() != Eigen::Success) throw EigFailure("Schur decomposition failed");
        T_ = schur.matrixT();
        Q_ = schur.matrixU();
        const double scale = std::max(1.0, T_.diagonal().cwiseAbs().maxCoeff());
        std::vector<int> group = detail::cluster_eigenvalues(T_.diagonal(), 0.1 * scale);
        detail::schur_reorder(T_, Q_, group);
        block_start_.clear();
        block_start_.push_back(0);
        for (Eigen::Index i = 1; i < T_.rows(); ++i)
            if (group[i] != group[i - 1]) block_start_.push_back(i);
        block_start_.push_back(T_.rows());
        evals_ = T_.diagonal();
    }

    /// exp(t T) for the reordered triangular factor: block diagonals by
    /// shifted Taylor, off-diagonal blocks by the Parlett recurrence.
    Matrix exp_triangular(double t) const {
        const Eigen::Index n = T_.rows();
        const Matrix S = t * T_;
        const auto nb = static_cast<Eigen::Index>(block_start_.size()) - 1;
        auto bs = [&](Eigen::Index b) { return block_start_[static_cast<size_t>(b)]; };
        auto bl = [&](Eigen::Index b) { return bs(b + 1) - bs(b); };
        Matrix F = Matrix::Zero(n, n);
        for (Eigen::Index b = 0; b < nb; ++b)
            F.block(bs(b), bs(b), bl(b), bl(b)) =
                detail::exp_triangular_block(S.block(bs(b), bs(b), bl(b), bl(b)));
        for (Eigen::Index d = 1; d < nb; ++d) {
            for (Eigen::Index i = 0; i + d < nb; ++i) {
                const Eigen::Index j = i + d;
                Matrix C = F.block(bs(i), bs(i), bl(i), bl(i)) * S.block(bs(i), bs(j), bl(i), bl(j)) -
                           S.block(bs(i), bs(j), bl(i), bl(j)) * F.block(bs(j), bs(j), bl(j), bl(j));
                for (Eigen::Index k = i + 1; k < j; ++k)
                    C += F.block(bs(i), bs(k), bl(i), bl(k)) * S.block(bs(k), bs(j), bl(k), bl(j)) -
                         S.block(bs(i), bs(k), bl(i), bl(k)) * F.block(bs(k), bs(j), bl(k), bl(j));
                F.block(bs(i), bs(j), bl(i), bl(j)) = detail::sylvester_triangular(
                    S.block(bs(i), bs(i), bl(i), bl(i)), S.block(bs(j), bs(j), bl(j), bl(j)), C);
            }
        }
        return F;
    }

    Matrix A_;
    bool schur_ = false;
    double cond_ = std::numeric_limits<double>::infinity();
    Vector evals_;
    Matrix V_, Vinv_;                    // eigendecomposition path
    Matrix Q_, T_;                       // Schur path
    std::vector<Eigen::Index> block_start_;
};

}  // namespace semishadow
