#pragma once

#include "blowfly/model.hpp"

#include <optional>

namespace blowfly {

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    /// Starting iterate; defaults to the constant c0 (the small-r limit).
    std::optional<RealField> initial_guess;
};

/// Positive steady state u_r of the rescaled model.
struct SteadyState {
    RealField u;
    double r = 0.0;
    double residual_norm = 0.0;
    int newton_iterations = 0;
};

/// Lap_h u + r (p f(u) - delta u), nodewise.
RealField steady_residual(const RealField& u, const ModelParams& model);

/// Damped Newton with Armijo backtracking; steps that would make any node
/// nonpositive are halved. Requires c0 > 0 and r > 0.
SteadyState solve_steady_state(const ModelParams& model, const NewtonOptions& opts = {});

}  // namespace blowfly
