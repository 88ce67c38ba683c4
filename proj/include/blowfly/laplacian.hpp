#pragma once

#include "blowfly/grid.hpp"

#include <Eigen/SparseCore>

namespace blowfly {

/// Second-order Neumann Laplacian on a uniform grid. The boundary rows come
/// from mirrored ghost nodes, so (Lu)_0 = 2(u_1 - u_0)/h^2. Rows sum to zero
/// and W*L is symmetric for the trapezoid weight matrix W.
class DiscreteLaplacian {
public:
    explicit DiscreteLaplacian(const Grid1D& grid);

    int size() const noexcept { return static_cast<int>(diag_.size()); }

    /// Sub-, main and super-diagonal; lower()[i] couples row i+1 to column i.
    const RealField& lower() const noexcept { return lower_; }
    const RealField& diag() const noexcept { return diag_; }
    const RealField& upper() const noexcept { return upper_; }

    template <typename Scalar>
    Field<Scalar> apply(const Field<Scalar>& u) const {
        const int n = size();
        Field<Scalar> out(n);
        out[0] = diag_[0] * u[0] + upper_[0] * u[1];
        for (int i = 1; i < n - 1; ++i) {
            out[i] = lower_[i - 1] * u[i - 1] + diag_[i] * u[i] + upper_[i] * u[i + 1];
        }
        out[n - 1] = lower_[n - 2] * u[n - 2] + diag_[n - 1] * u[n - 1];
        return out;
    }

    Eigen::SparseMatrix<double> to_sparse() const;

private:
    RealField lower_;
    RealField diag_;
    RealField upper_;
};

DiscreteLaplacian assemble_laplacian(const Grid1D& grid);

/// Gaussian elimination without pivoting for tridiagonal systems, factored
/// once and reused. Intended for diagonally dominant or Laplacian-like
/// matrices (Crank-Nicolson, Newton Jacobians of the steady problem).
template <typename Scalar>
class TridiagonalLU {
public:
    using Vec = Field<Scalar>;

    TridiagonalLU() = default;

    TridiagonalLU(const Vec& lower, const Vec& diag, const Vec& upper) { factor(lower, diag, upper); }

    void factor(const Vec& lower, const Vec& diag, const Vec& upper) {
        const Eigen::Index n = diag.size();
        lower_ = lower;
        upper_ = upper;
        pivot_.resize(n);
        pivot_[0] = diag[0];
        for (Eigen::Index i = 1; i < n; ++i) {
            lower_[i - 1] = lower[i - 1] / pivot_[i - 1];
            pivot_[i] = diag[i] - lower_[i - 1] * upper[i - 1];
        }
    }

    /// Smallest |pivot|; zero means the elimination broke down.
    double min_abs_pivot() const { return pivot_.cwiseAbs().minCoeff(); }

    template <typename Rhs>
    Field<typename Rhs::Scalar> solve(const Eigen::MatrixBase<Rhs>& rhs) const {
        using Out = typename Rhs::Scalar;
        const Eigen::Index n = pivot_.size();
        Field<Out> x = rhs;
        for (Eigen::Index i = 1; i < n; ++i) x[i] -= lower_[i - 1] * x[i - 1];
        x[n - 1] /= pivot_[n - 1];
        for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = (x[i] - upper_[i] * x[i + 1]) / pivot_[i];
        return x;
    }

private:
    Vec lower_;
    Vec upper_;
    Vec pivot_;
};

/// Unique mean-zero z with L z = rhs under Neumann conditions. The right-hand
/// side must have zero quadrature mean to within 1e-8 (relative to its max
/// norm); any residual mean below that is projected out before solving.
/// Throws SolvabilityError otherwise.
template <typename Scalar>
Field<Scalar> solve_poisson_meanzero(const Field<Scalar>& rhs, const Grid1D& grid);

extern template Field<double> solve_poisson_meanzero<double>(const Field<double>&, const Grid1D&);
extern template Field<Complex> solve_poisson_meanzero<Complex>(const Field<Complex>&, const Grid1D&);

}  // namespace blowfly
