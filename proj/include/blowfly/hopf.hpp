#pragma once

#include "blowfly/model.hpp"

#include <Eigen/Dense>

#include <vector>

namespace blowfly {

/// Closed-form Hopf data of the r -> 0 limit (requires c0 > 2).
struct LimitHopfData {
    double theta0 = 0.0;
    double h0 = 0.0;
    double beta0 = 1.0;
    ComplexField z0;
};

/// Right-hand side of Lap z0 = -c0 f'(c0) p e^{-i theta} + c0 delta + i h c0.
/// Its quadrature mean vanishes exactly when (theta, h) is the limit pair.
ComplexField limit_hopf_rhs(const CoefficientField& coeffs, double theta, double h);

LimitHopfData limit_hopf_data(const CoefficientField& coeffs, const Grid1D& grid);

/// lim_{r->0} S_0(r) = c0^2 L + (theta0/h0) e^{-i theta0} c0^2 f'(c0) int p.
Complex limit_S0(const CoefficientField& coeffs, const Grid1D& grid);

/// lim_{r->0} Re(dmu/dtau) / r^2 at tau_0.
double limit_transversality(const CoefficientField& coeffs, const Grid1D& grid);

/// Point (z_r, beta_r, h_r, theta_r) on the Hopf branch together with the
/// data it was computed from. psi = beta c0 + r z is the critical
/// eigenfunction for the purely imaginary eigenvalue i nu, nu = r h.
struct HopfSolution {
    ModelParams model;
    RealField u;
    ComplexField z;
    double beta = 1.0;
    double h = 0.0;
    double theta = 0.0;
    double nu = 0.0;
    ComplexField psi;
    double residual_norm = 0.0;
    int newton_iterations = 0;

    double r() const { return model.r; }
    double c0() const { return model.coeffs.c0; }

    /// tau_n = (theta + 2 n pi) / nu in rescaled time; needs r > 0.
    double tau(int n) const;
};

struct ContinuationOptions {
    double tol = 1e-10;
    int max_newton = 25;
    int max_halvings = 10;
    /// Working cap on r; the branch is only guaranteed for small r.
    double r_cap = 0.5;
};

/// Follows G(z, beta, h, theta, r) = 0 from the closed-form r = 0 point to
/// r_target in n_steps uniform steps (halved on failure). Throws NoHopfError
/// for c0 <= 2 and ContinuationStall when the step halving budget runs out.
HopfSolution continue_hopf(const ModelParams& model, double r_target, int n_steps,
                           const ContinuationOptions& opts = {});

/// Newton correction of a single branch point at fixed r starting from guess.
HopfSolution correct_hopf_point(const ModelParams& model, const RealField& u_r, const HopfSolution& guess,
                                const ContinuationOptions& opts = {});

/// g1 = Lap z + (e^{-i theta} p f'(u) - delta - i h)(beta c0 + r z).
ComplexField hopf_field_residual(const HopfSolution& sol);

/// g2 = (beta^2 - 1) c0^2 L + r^2 ||z||^2.
double hopf_normalization_residual(const HopfSolution& sol);

struct ThresholdSequence {
    std::vector<double> taus;
    std::vector<double> taus_hat;
    int n_max = 0;
};

ThresholdSequence hopf_thresholds(const HopfSolution& sol, int n_max);

/// S_n(r) = int psi^2 + r tau_n e^{-i theta} int p f'(u) psi^2.
Complex compute_Sn(const HopfSolution& sol, int n);

/// True when |S_n| falls below 1e-8 c0^2 L (simplicity not certified).
bool simplicity_warning(Complex Sn, const HopfSolution& sol);

/// d mu / d tau at tau_n. Throws SolverError if the real part is not positive.
Complex transversality(const HopfSolution& sol, int n);

/// Lap psi + r e^{-mu tau} p f'(u_r) psi - r delta psi - mu psi.
ComplexField characteristic_residual(Complex mu, double tau, const ComplexField& psi, const ModelParams& model,
                                     const RealField& u_r);

/// Dense matrix of the same operator, used for resolvent solves.
Eigen::MatrixXcd characteristic_matrix(Complex mu, double tau, const ModelParams& model, const RealField& u_r);

/// Second eigenvalue (pi/L)^2 of the Neumann -Laplacian; diagnostic only.
inline double second_neumann_eigenvalue(const Grid1D& grid) {
    const double k = M_PI / grid.length();
    return k * k;
}

}  // namespace blowfly
