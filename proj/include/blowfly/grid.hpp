#pragma once

#include <Eigen/Core>

#include <complex>

namespace blowfly {

using RealField = Eigen::VectorXd;
using ComplexField = Eigen::VectorXcd;
using Complex = std::complex<double>;

template <typename Scalar>
using Field = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Uniform mesh x_i = i*h on [0, L] with trapezoid quadrature weights.
class Grid1D {
public:
    Grid1D(double length, int n_points);

    double length() const noexcept { return length_; }
    int size() const noexcept { return n_points_; }
    double spacing() const noexcept { return spacing_; }
    const RealField& nodes() const noexcept { return nodes_; }
    const RealField& weights() const noexcept { return weights_; }

    /// Trapezoid approximation of the integral over [0, L].
    template <typename Derived>
    typename Derived::Scalar integrate(const Eigen::MatrixBase<Derived>& f) const {
        using Scalar = typename Derived::Scalar;
        check_size(f.size());
        return weights_.template cast<Scalar>().dot(f.derived());
    }

    void check_size(Eigen::Index n) const;

private:
    double length_;
    int n_points_;
    double spacing_;
    RealField nodes_;
    RealField weights_;
};

/// (1/L) * trapezoid integral of the field.
template <typename Derived>
typename Derived::Scalar spatial_average(const Eigen::MatrixBase<Derived>& field, const Grid1D& grid) {
    return grid.integrate(field) / grid.length();
}

/// Squared L2 norm under trapezoid quadrature.
template <typename Derived>
double l2_norm_squared(const Eigen::MatrixBase<Derived>& field, const Grid1D& grid) {
    return grid.integrate(field.cwiseAbs2().eval());
}

}  // namespace blowfly
