#include "blowfly/hopf.hpp"

#include "blowfly/errors.hpp"
#include "blowfly/laplacian.hpp"
#include "blowfly/steady_state.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <utility>

namespace blowfly {

namespace {

constexpr Complex kI(0.0, 1.0);

std::string format_c0(double c0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", c0);
    return buf;
}

RealField birth_slope(const ModelParams& model, const RealField& u) {
    return model.coeffs.p.cwiseProduct(eval_nonlinearity(u, 1));
}

// (int psi^2, int p f'(u) psi^2)
std::pair<Complex, Complex> psi_square_integrals(const HopfSolution& sol) {
    const Grid1D& grid = sol.model.grid;
    const ComplexField sq = sol.psi.array().square().matrix();
    const RealField q = birth_slope(sol.model, sol.u);
    return {grid.integrate(sq), grid.integrate(q.cast<Complex>().cwiseProduct(sq).eval())};
}

}  // namespace

NoHopfError::NoHopfError(std::string operation, double c0)
    : SolverError("hopf-spectrum", std::move(operation),
                  "NoHopf: c0 = " + format_c0(c0) + " < 2, steady state stable for all delays"),
      c0_(c0) {}

ComplexField limit_hopf_rhs(const CoefficientField& coeffs, double theta, double h) {
    const double c0 = coeffs.c0;
    const Complex rot = std::exp(-kI * theta);
    ComplexField rhs(coeffs.p.size());
    for (Eigen::Index i = 0; i < rhs.size(); ++i) {
        rhs[i] = -c0 * eval_nonlinearity(c0, 1) * coeffs.p[i] * rot + c0 * coeffs.delta[i] + kI * h * c0;
    }
    return rhs;
}

LimitHopfData limit_hopf_data(const CoefficientField& coeffs, const Grid1D& grid) {
    const double c0 = coeffs.c0;
    if (!(c0 > 2.0)) throw NoHopfError("limit_hopf_data", c0);

    LimitHopfData out;
    out.theta0 = std::acos(1.0 / (1.0 - c0));
    out.h0 = coeffs.delta_bar * std::sqrt(c0 * c0 - 2.0 * c0);
    out.z0 = solve_poisson_meanzero(limit_hopf_rhs(coeffs, out.theta0, out.h0), grid);
    return out;
}

Complex limit_S0(const CoefficientField& coeffs, const Grid1D& grid) {
    const double c0 = coeffs.c0;
    if (!(c0 > 2.0)) throw NoHopfError("limit_S0", c0);
    const double theta0 = std::acos(1.0 / (1.0 - c0));
    const double h0 = coeffs.delta_bar * std::sqrt(c0 * c0 - 2.0 * c0);
    const double p_int = grid.integrate(coeffs.p);
    return c0 * c0 * grid.length() + (theta0 / h0) * std::exp(-kI * theta0) * c0 * c0 * eval_nonlinearity(c0, 1) * p_int;
}

double limit_transversality(const CoefficientField& coeffs, const Grid1D& grid) {
    const double c0 = coeffs.c0;
    const double L = grid.length();
    const double num = (c0 * c0 - 2.0 * c0) * std::exp(-2.0 * c0) * coeffs.p_bar * coeffs.p_bar * std::pow(c0, 4) * L * L;
    return num / std::norm(limit_S0(coeffs, grid));
}

double HopfSolution::tau(int n) const {
    if (!(nu > 0.0)) {
        throw PreconditionError("hopf-spectrum", "hopf_thresholds", "thresholds need r > 0");
    }
    return (theta + 2.0 * M_PI * n) / nu;
}

ComplexField hopf_field_residual(const HopfSolution& sol) {
    const ModelParams& m = sol.model;
    const DiscreteLaplacian lap(m.grid);
    const RealField q = birth_slope(m, sol.u);
    const Complex rot = std::exp(-kI * sol.theta);
    ComplexField g1 = lap.apply<Complex>(sol.z);
    for (Eigen::Index i = 0; i < g1.size(); ++i) {
        const Complex a = rot * q[i] - m.coeffs.delta[i] - kI * sol.h;
        g1[i] += a * (sol.beta * sol.c0() + m.r * sol.z[i]);
    }
    return g1;
}

double hopf_normalization_residual(const HopfSolution& sol) {
    const double c0 = sol.c0();
    const double L = sol.model.grid.length();
    return (sol.beta * sol.beta - 1.0) * c0 * c0 * L + sol.r() * sol.r() * l2_norm_squared(sol.z, sol.model.grid);
}

namespace {

double scaled_residual(const HopfSolution& sol) {
    const double c0 = sol.c0();
    const double L = sol.model.grid.length();
    const double mean = std::abs(spatial_average(sol.z, sol.model.grid));
    const double g2 = std::abs(hopf_normalization_residual(sol)) / (c0 * c0 * L);
    return std::max({hopf_field_residual(sol).cwiseAbs().maxCoeff(), g2, mean});
}

void finalize(HopfSolution& sol) {
    sol.nu = sol.r() * sol.h;
    sol.psi = (sol.beta * sol.c0() + sol.r() * sol.z.array()).matrix();
    sol.residual_norm = scaled_residual(sol);
}

// Unknowns: (Re z_i, Im z_i) interleaved, then beta, h, theta.
// Equations: (Re g1_i, Im g1_i), mean Re z, mean Im z, g2 / (c0^2 L).
Eigen::SparseMatrix<double> hopf_jacobian(const HopfSolution& sol) {
    const ModelParams& m = sol.model;
    const Grid1D& grid = m.grid;
    const int n = grid.size();
    const int N = 2 * n + 3;
    const int ib = 2 * n, ih = 2 * n + 1, it = 2 * n + 2;
    const double c0 = sol.c0();
    const double L = grid.length();
    const double r = m.r;
    const DiscreteLaplacian lap(grid);
    const RealField q = birth_slope(m, sol.u);
    const Complex rot = std::exp(-kI * sol.theta);

    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(16 * n + 16));
    auto couple = [&](int row, int col, Complex c) {
        // complex multiplication (x + iy) -> c (x + iy) in real form
        t.emplace_back(2 * row, 2 * col, c.real());
        t.emplace_back(2 * row, 2 * col + 1, -c.imag());
        t.emplace_back(2 * row + 1, 2 * col, c.imag());
        t.emplace_back(2 * row + 1, 2 * col + 1, c.real());
    };
    auto column = [&](int row, int col, Complex c) {
        t.emplace_back(2 * row, col, c.real());
        t.emplace_back(2 * row + 1, col, c.imag());
    };

    for (int i = 0; i < n; ++i) {
        const Complex a = rot * q[i] - m.coeffs.delta[i] - kI * sol.h;
        const Complex psi = sol.beta * c0 + r * sol.z[i];
        couple(i, i, lap.diag()[i] + r * a);
        if (i > 0) couple(i, i - 1, lap.lower()[i - 1]);
        if (i < n - 1) couple(i, i + 1, lap.upper()[i]);
        column(i, ib, a * c0);
        column(i, ih, -kI * psi);
        column(i, it, -kI * rot * q[i] * psi);
    }
    for (int j = 0; j < n; ++j) {
        const double w = grid.weights()[j];
        t.emplace_back(2 * n, 2 * j, w / L);
        t.emplace_back(2 * n + 1, 2 * j + 1, w / L);
    }
    const double scale = 1.0 / (c0 * c0 * L);
    for (int j = 0; j < n; ++j) {
        const double w = grid.weights()[j];
        t.emplace_back(it, 2 * j, 2.0 * r * r * w * sol.z[j].real() * scale);
        t.emplace_back(it, 2 * j + 1, 2.0 * r * r * w * sol.z[j].imag() * scale);
    }
    t.emplace_back(it, ib, 2.0 * sol.beta);

    Eigen::SparseMatrix<double> J(N, N);
    J.setFromTriplets(t.begin(), t.end());
    J.makeCompressed();
    return J;
}

Eigen::VectorXd hopf_system(const HopfSolution& sol) {
    const int n = sol.model.grid.size();
    const double c0 = sol.c0();
    const double L = sol.model.grid.length();
    Eigen::VectorXd F(2 * n + 3);
    const ComplexField g1 = hopf_field_residual(sol);
    for (int i = 0; i < n; ++i) {
        F[2 * i] = g1[i].real();
        F[2 * i + 1] = g1[i].imag();
    }
    const Complex mean = spatial_average(sol.z, sol.model.grid);
    F[2 * n] = mean.real();
    F[2 * n + 1] = mean.imag();
    F[2 * n + 2] = hopf_normalization_residual(sol) / (c0 * c0 * L);
    return F;
}

}  // namespace

HopfSolution correct_hopf_point(const ModelParams& model, const RealField& u_r, const HopfSolution& guess,
                                const ContinuationOptions& opts) {
    HopfSolution sol = guess;
    sol.model = model;
    sol.u = u_r;
    finalize(sol);

    const int n = model.grid.size();
    const double h2 = model.grid.spacing() * model.grid.spacing();
    auto round_off = [&](const HopfSolution& s) {
        return 64.0 * std::numeric_limits<double>::epsilon() * 4.0 / h2 * std::max(1.0, s.z.cwiseAbs().maxCoeff());
    };
    HopfSolution best = sol;
    int iter = 0;
    for (; iter < opts.max_newton; ++iter) {
        if (sol.residual_norm <= opts.tol) break;

        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(hopf_jacobian(sol));
        if (lu.info() != Eigen::Success) {
            throw ConvergenceError("hopf-spectrum", "continue_hopf", "singular Jacobian of the Hopf system",
                                   sol.residual_norm);
        }
        const Eigen::VectorXd step = lu.solve(-hopf_system(sol));
        for (int i = 0; i < n; ++i) sol.z[i] += Complex(step[2 * i], step[2 * i + 1]);
        sol.beta += step[2 * n];
        sol.h += step[2 * n + 1];
        sol.theta += step[2 * n + 2];
        finalize(sol);
        if (!std::isfinite(sol.residual_norm) || sol.residual_norm > 1e3 * std::max(best.residual_norm, 1e-6)) {
            throw ConvergenceError("hopf-spectrum", "continue_hopf", "Newton iteration diverged",
                                   sol.residual_norm);
        }
        // stalled at the round-off level: keep the best iterate
        if (sol.residual_norm >= 0.5 * best.residual_norm && best.residual_norm <= round_off(best)) {
            sol = best;
            break;
        }
        if (sol.residual_norm < best.residual_norm) best = sol;
    }
    if (sol.residual_norm > std::max(opts.tol, round_off(sol))) {
        std::ostringstream os;
        os << "Newton did not converge at r = " << model.r << "; residual " << sol.residual_norm;
        throw ConvergenceError("hopf-spectrum", "continue_hopf", os.str(), sol.residual_norm);
    }
    if (!(sol.h > 0.0) || !(sol.beta > 0.0) || sol.beta > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "left the admissible branch at r = " << model.r << " (beta = " << sol.beta << ", h = " << sol.h << ")";
        throw ConvergenceError("hopf-spectrum", "continue_hopf", os.str(), sol.residual_norm);
    }
    sol.newton_iterations = iter;
    return sol;
}

HopfSolution continue_hopf(const ModelParams& model, double r_target, int n_steps, const ContinuationOptions& opts) {
    if (n_steps < 1) throw PreconditionError("hopf-spectrum", "continue_hopf", "n_steps must be >= 1");
    if (r_target < 0.0) throw PreconditionError("hopf-spectrum", "continue_hopf", "r_target must be >= 0");
    const double c0 = model.coeffs.c0;
    if (!(c0 > 2.0)) throw NoHopfError("continue_hopf", c0);

    const LimitHopfData limit = limit_hopf_data(model.coeffs, model.grid);
    HopfSolution current{model.with_r(0.0), RealField::Constant(model.grid.size(), c0), limit.z0, 1.0, limit.h0,
                         limit.theta0, 0.0, ComplexField()};
    finalize(current);
    if (r_target == 0.0) {
        current.theta = std::fmod(current.theta, 2.0 * M_PI);
        return current;
    }
    if (r_target > opts.r_cap) {
        std::ostringstream os;
        os << "r = " << r_target << " exceeds the working cap " << opts.r_cap;
        throw ContinuationStall("continue_hopf", os.str(), 0.0);
    }

    double step = r_target / n_steps;
    int halvings = 0;
    double r_done = 0.0;
    while (r_done < r_target) {
        double r_next = std::min(r_done + step, r_target);
        if (r_target - r_next < 1e-12 * r_target) r_next = r_target;
        try {
            const ModelParams at = model.with_r(r_next);
            NewtonOptions nopts;
            nopts.initial_guess = current.u;
            const SteadyState ss = solve_steady_state(at, nopts);
            current = correct_hopf_point(at, ss.u, current, opts);
            r_done = r_next;
        } catch (const SolverError& e) {
            if (++halvings > opts.max_halvings) {
                std::ostringstream os;
                os << "continuation stalled after r = " << r_done << ": " << e.what();
                throw ContinuationStall("continue_hopf", os.str(), r_done);
            }
            step *= 0.5;
        }
    }
    current.theta = std::fmod(current.theta, 2.0 * M_PI);
    if (current.theta < 0.0) current.theta += 2.0 * M_PI;
    return current;
}

ThresholdSequence hopf_thresholds(const HopfSolution& sol, int n_max) {
    if (n_max < 0) throw PreconditionError("hopf-spectrum", "hopf_thresholds", "n_max must be >= 0");
    ThresholdSequence seq;
    seq.n_max = n_max;
    for (int n = 0; n <= n_max; ++n) {
        seq.taus.push_back(sol.tau(n));
        seq.taus_hat.push_back(sol.r() * seq.taus.back());
    }
    return seq;
}

Complex compute_Sn(const HopfSolution& sol, int n) {
    if (n < 0) throw PreconditionError("hopf-spectrum", "compute_Sn", "n must be >= 0");
    const auto [plain, weighted] = psi_square_integrals(sol);
    return plain + sol.r() * sol.tau(n) * std::exp(-kI * sol.theta) * weighted;
}

bool simplicity_warning(Complex Sn, const HopfSolution& sol) {
    return std::abs(Sn) < 1e-8 * sol.c0() * sol.c0() * sol.model.grid.length();
}

Complex transversality(const HopfSolution& sol, int n) {
    const auto [plain, weighted] = psi_square_integrals(sol);
    const Complex rot = std::exp(-kI * sol.theta);
    const Complex S = plain + sol.r() * sol.tau(n) * rot * weighted;
    const Complex dmu = kI * sol.nu * sol.r() * rot * weighted / (-S);
    if (!(dmu.real() > 0.0)) {
        std::ostringstream os;
        os << "Re dmu/dtau = " << dmu.real() << " <= 0 at n = " << n << ", r = " << sol.r()
           << "; the crossing must be transversal on the small-r branch";
        throw SolverError("hopf-spectrum", "transversality", os.str());
    }
    return dmu;
}

ComplexField characteristic_residual(Complex mu, double tau, const ComplexField& psi, const ModelParams& model,
                                     const RealField& u_r) {
    model.grid.check_size(psi.size());
    model.grid.check_size(u_r.size());
    const DiscreteLaplacian lap(model.grid);
    const RealField q = birth_slope(model, u_r);
    const Complex delay = std::exp(-mu * tau);
    ComplexField out = lap.apply<Complex>(psi);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        out[i] += (model.r * delay * q[i] - model.r * model.coeffs.delta[i] - mu) * psi[i];
    }
    return out;
}

Eigen::MatrixXcd characteristic_matrix(Complex mu, double tau, const ModelParams& model, const RealField& u_r) {
    const int n = model.grid.size();
    const DiscreteLaplacian lap(model.grid);
    const RealField q = birth_slope(model, u_r);
    const Complex delay = std::exp(-mu * tau);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = lap.diag()[i] + model.r * delay * q[i] - model.r * model.coeffs.delta[i] - mu;
        if (i > 0) A(i, i - 1) = lap.lower()[i - 1];
        if (i < n - 1) A(i, i + 1) = lap.upper()[i];
    }
    return A;
}

}  // namespace blowfly
