#include "blowfly/grid.hpp"

#include "blowfly/errors.hpp"

#include <string>

namespace blowfly {

Grid1D::Grid1D(double length, int n_points)
    : length_(length), n_points_(n_points), spacing_(0.0) {
    if (!(length > 0.0)) {
        throw PreconditionError("core-model", "Grid1D", "domain length must be positive");
    }
    if (n_points < 3) {
        throw PreconditionError("core-model", "Grid1D", "need at least 3 nodes, got " + std::to_string(n_points));
    }
    spacing_ = length / (n_points - 1);
    nodes_.resize(n_points);
    for (int i = 0; i < n_points; ++i) nodes_[i] = i * spacing_;
    nodes_[n_points - 1] = length;

    weights_ = RealField::Constant(n_points, spacing_);
    weights_[0] = weights_[n_points - 1] = 0.5 * spacing_;
}

void Grid1D::check_size(Eigen::Index n) const {
    if (n != n_points_) {
        throw PreconditionError("core-model", "spatial_average",
                                "field has " + std::to_string(n) + " entries, grid has " +
                                    std::to_string(n_points_));
    }
}

}  // namespace blowfly
