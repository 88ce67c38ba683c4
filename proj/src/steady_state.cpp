#include "blowfly/steady_state.hpp"

#include "blowfly/errors.hpp"
#include "blowfly/laplacian.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace blowfly {

RealField steady_residual(const RealField& u, const ModelParams& model) {
    model.grid.check_size(u.size());
    const DiscreteLaplacian lap(model.grid);
    const auto& c = model.coeffs;
    RealField out = lap.apply(u);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        out[i] += model.r * (c.p[i] * eval_nonlinearity(u[i], 0) - c.delta[i] * u[i]);
    }
    return out;
}

SteadyState solve_steady_state(const ModelParams& model, const NewtonOptions& opts) {
    const auto& c = model.coeffs;
    if (!(c.c0 > 0.0)) {
        std::ostringstream os;
        os << "c0 = " << c.c0 << " <= 0; no positive steady state";
        throw PreconditionError("steady-state", "solve_steady_state", os.str());
    }
    if (!(model.r > 0.0)) {
        throw PreconditionError("steady-state", "solve_steady_state", "r must be positive");
    }

    const int n = model.grid.size();
    const DiscreteLaplacian lap(model.grid);
    RealField u = opts.initial_guess ? *opts.initial_guess : RealField::Constant(n, c.c0);
    model.grid.check_size(u.size());
    if ((u.array() <= 0.0).any()) {
        throw PreconditionError("steady-state", "solve_steady_state", "initial guess must be positive");
    }

    // Round-off floor of the discrete residual: the Laplacian alone loses
    // about eps * |u| * 4/h^2 per node.
    const double h = model.grid.spacing();
    auto floor_for = [&](const RealField& v) {
        return 64.0 * std::numeric_limits<double>::epsilon() * v.cwiseAbs().maxCoeff() * 4.0 / (h * h);
    };

    RealField res = steady_residual(u, model);
    double norm = res.cwiseAbs().maxCoeff();
    int iter = 0;
    while (norm > opts.tol) {
        if (iter == opts.max_iter) {
            std::ostringstream os;
            os << "Newton did not converge in " << opts.max_iter << " iterations; last residual " << norm;
            throw ConvergenceError("steady-state", "solve_steady_state", os.str(), norm);
        }
        ++iter;

        RealField diag = lap.diag();
        for (int i = 0; i < n; ++i) {
            diag[i] += model.r * (c.p[i] * eval_nonlinearity(u[i], 1) - c.delta[i]);
        }
        const TridiagonalLU<double> jac(lap.lower(), diag, lap.upper());
        const RealField step = jac.solve(-res);

        double lambda = 1.0;
        bool accepted = false;
        RealField trial;
        RealField trial_res;
        double trial_norm = norm;
        for (int k = 0; k < 40; ++k, lambda *= 0.5) {
            trial = u + lambda * step;
            if ((trial.array() <= 0.0).any()) continue;
            trial_res = steady_residual(trial, model);
            trial_norm = trial_res.cwiseAbs().maxCoeff();
            if (trial_norm <= (1.0 - 1e-4 * lambda) * norm) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Stalled at the round-off floor: accept the iterate as converged.
            if (norm <= floor_for(u)) break;
            std::ostringstream os;
            os << "line search failed at iteration " << iter << "; residual " << norm;
            throw ConvergenceError("steady-state", "solve_steady_state", os.str(), norm);
        }
        const double step_size = (lambda * step).cwiseAbs().maxCoeff();
        u = std::move(trial);
        res = std::move(trial_res);
        norm = trial_norm;
        if (step_size <= 1e-14 * u.cwiseAbs().maxCoeff() && norm <= floor_for(u)) break;
    }

    return SteadyState{std::move(u), model.r, norm, iter};
}

}  // namespace blowfly
