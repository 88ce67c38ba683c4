#include "blowfly/laplacian.hpp"

#include "blowfly/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace blowfly {

DiscreteLaplacian::DiscreteLaplacian(const Grid1D& grid) {
    const int n = grid.size();
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    lower_ = RealField::Constant(n - 1, inv_h2);
    upper_ = RealField::Constant(n - 1, inv_h2);
    diag_ = RealField::Constant(n, -2.0 * inv_h2);
    upper_[0] = 2.0 * inv_h2;
    lower_[n - 2] = 2.0 * inv_h2;
}

Eigen::SparseMatrix<double> DiscreteLaplacian::to_sparse() const {
    const int n = size();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(3 * n);
    for (int i = 0; i < n; ++i) {
        entries.emplace_back(i, i, diag_[i]);
        if (i + 1 < n) {
            entries.emplace_back(i, i + 1, upper_[i]);
            entries.emplace_back(i + 1, i, lower_[i]);
        }
    }
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

DiscreteLaplacian assemble_laplacian(const Grid1D& grid) { return DiscreteLaplacian(grid); }

template <typename Scalar>
Field<Scalar> solve_poisson_meanzero(const Field<Scalar>& rhs, const Grid1D& grid) {
    grid.check_size(rhs.size());
    const int n = grid.size();
    const double scale = rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) return Field<Scalar>::Zero(n);

    const Scalar mean = spatial_average(rhs, grid);
    if (std::abs(mean) > 1e-8 * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "right-hand side has quadrature mean " << std::abs(mean) << "; a Neumann problem needs mean zero";
        throw SolvabilityError("hopf-spectrum", "solve_poisson_meanzero", os.str());
    }

    // Pin z_0 = 0 in place of the redundant first row, solve, then remove the mean.
    const DiscreteLaplacian lap(grid);
    RealField lower = lap.lower();
    RealField diag = lap.diag();
    RealField upper = lap.upper();
    diag[0] = 1.0;
    upper[0] = 0.0;

    Field<Scalar> b = (rhs.array() - mean).matrix();
    b[0] = Scalar(0);
    const TridiagonalLU<double> lu(lower, diag, upper);
    Field<Scalar> z = lu.solve(b);
    z.array() -= spatial_average(z, grid);
    return z;
}

template Field<double> solve_poisson_meanzero<double>(const Field<double>&, const Grid1D&);
template Field<Complex> solve_poisson_meanzero<Complex>(const Field<Complex>&, const Grid1D&);

}  // namespace blowfly
