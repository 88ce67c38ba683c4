#include "blowfly/normal_form.hpp"

#include "blowfly/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace blowfly {

namespace {

constexpr Complex kI(0.0, 1.0);

RealField second_derivative_weight(const HopfSolution& sol) {
    return sol.model.coeffs.p.cwiseProduct(eval_nonlinearity(sol.u, 2));
}

ComplexField solve_resolvent(const Eigen::MatrixXcd& A, const ComplexField& rhs, const char* op) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12)) {
        std::ostringstream os;
        os << "characteristic operator is near-singular (reciprocal condition " << rcond << ")";
        throw ResonanceError("normal-form", op, os.str());
    }
    return lu.solve(rhs);
}

}  // namespace

ComplexField solve_E(const HopfSolution& sol, int n) {
    const double tau = sol.tau(n);
    const Complex mu = 2.0 * kI * sol.nu;
    const Complex phase = std::exp(-mu * tau);
    const RealField pf2 = second_derivative_weight(sol);
    const ComplexField rhs = (-sol.r() * phase * pf2.cast<Complex>().array() * sol.psi.array().square()).matrix();
    return solve_resolvent(characteristic_matrix(mu, tau, sol.model, sol.u), rhs, "solve_E");
}

ComplexField solve_F(const HopfSolution& sol, int n) {
    const double tau = sol.tau(n);
    const RealField pf2 = second_derivative_weight(sol);
    const ComplexField rhs = (-sol.r() * pf2.array() * sol.psi.cwiseAbs2().array()).cast<Complex>().matrix();
    return solve_resolvent(characteristic_matrix(0.0, tau, sol.model, sol.u), rhs, "solve_F");
}

GCoefficients g_coefficients(const HopfSolution& sol, int n, const ComplexField& E, const ComplexField& F) {
    const Grid1D& grid = sol.model.grid;
    grid.check_size(E.size());
    grid.check_size(F.size());

    const double tau = sol.tau(n);
    const double omega = sol.nu * tau;
    const Complex S = compute_Sn(sol, n);
    const Complex pre = sol.r() * tau / S;
    const Complex e1 = std::exp(-kI * omega);

    const ComplexField pf2 = second_derivative_weight(sol).cast<Complex>();
    const ComplexField pf3 = sol.model.coeffs.p.cwiseProduct(eval_nonlinearity(sol.u, 3)).cast<Complex>();
    const auto psi = sol.psi.array();
    const auto psic = sol.psi.conjugate().array();
    const auto abs2 = sol.psi.cwiseAbs2().cast<Complex>().array();

    auto integral = [&](const auto& expr) { return grid.integrate(ComplexField(expr.matrix())); };

    GCoefficients g;
    g.g20 = pre * e1 * e1 * integral(pf2.array() * psi.cube());
    g.g11 = pre * integral(pf2.array() * psi * abs2);
    g.g02 = pre * std::conj(e1 * e1) * integral(pf2.array() * psi * psic.square());

    const ComplexField w20 = ((kI * g.g20 / omega) * psi * e1 + (kI * std::conj(g.g02) / (3.0 * omega)) * psic * std::conj(e1) +
                              E.array() * e1 * e1)
                                 .matrix();
    const ComplexField w11 = ((-kI * g.g11 / omega) * psi * e1 + (kI * std::conj(g.g11) / omega) * psic * std::conj(e1) +
                              F.array())
                                 .matrix();

    g.g21 = 2.0 * pre * e1 * integral(pf2.array() * psi.square() * w11.array()) +
            pre * std::conj(e1) * integral(pf2.array() * abs2 * w20.array()) +
            pre * e1 * integral(pf3.array() * psi.square() * abs2);
    return g;
}

Complex c1_zero(const GCoefficients& g, double nu_r, double tau_n) {
    const double omega = nu_r * tau_n;
    const double g11_sq = std::norm(g.g11);
    const double g02_sq = std::norm(g.g02);
    return kI / (2.0 * omega) * (g.g11 * g.g20 - 2.0 * g11_sq - g02_sq / 3.0) + g.g21 / 2.0;
}

std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

std::string to_string(OrbitStability s) {
    switch (s) {
        case OrbitStability::Stable: return "stable";
        case OrbitStability::Unstable: return "unstable";
        default: return "undetermined";
    }
}

BifurcationVerdict bifurcation_verdict(Complex C1, Complex dmu, int n) {
    if (!(dmu.real() > 0.0)) {
        std::ostringstream os;
        os << "Re dmu/dtau = " << dmu.real() << " must be positive";
        throw PreconditionError("normal-form", "bifurcation_verdict", os.str());
    }
    BifurcationVerdict v;
    v.mu2 = -C1.real() / dmu.real();
    v.direction = v.mu2 > 0.0 ? Direction::Forward : Direction::Backward;
    if (n == 0) {
        v.orbit_stability = C1.real() < 0.0 ? OrbitStability::Stable : OrbitStability::Unstable;
    } else {
        v.warnings.push_back("orbit stability at n >= 1 is not determined by the first Lyapunov coefficient alone");
    }
    if (C1.real() > 0.0) {
        v.warnings.push_back("Re C1(0) > 0 contradicts the negative small-r limit; check r and grid resolution");
    }
    return v;
}

NormalFormReport normal_form_report(const HopfSolution& sol, int n) {
    NormalFormReport rep;
    rep.n = n;
    rep.r = sol.r();
    rep.tau_n = sol.tau(n);
    rep.Sn = compute_Sn(sol, n);
    if (simplicity_warning(rep.Sn, sol)) {
        rep.warnings.push_back("|S_n(r)| is below 1e-8 c0^2 L; simplicity of i nu_r is not certified");
    }
    rep.E = solve_E(sol, n);
    rep.F = solve_F(sol, n);
    rep.g = g_coefficients(sol, n, rep.E, rep.F);
    rep.C1 = c1_zero(rep.g, sol.nu, rep.tau_n);
    rep.dmu = transversality(sol, n);
    BifurcationVerdict v = bifurcation_verdict(rep.C1, rep.dmu, n);
    rep.mu2 = v.mu2;
    rep.direction = v.direction;
    rep.orbit_stability = v.orbit_stability;
    rep.warnings.insert(rep.warnings.end(), v.warnings.begin(), v.warnings.end());
    return rep;
}

namespace limits {

namespace {

void require_hopf_range(double c0, const char* op) {
    if (!(c0 > 2.0)) {
        std::ostringstream os;
        os << "c0 = " << c0 << " must exceed 2";
        throw PreconditionError("normal-form", op, os.str());
    }
}

double root(double c0) { return std::sqrt(c0 * c0 - 2.0 * c0); }

double phase_total(double c0, int n) { return std::acos(1.0 / (1.0 - c0)) + 2.0 * M_PI * n; }

double g11_denominator(double c0, double Theta) {
    const double s = root(c0);
    const double q = Theta * (1.0 - c0) / s;
    return 1.0 + 2.0 * Theta / s + q * q;
}

double poly_P(double c0) { return 5.0 * std::pow(c0, 4) - 14.0 * std::pow(c0, 3) + 9.0 * c0 * c0; }

double poly_Q(double c0) {
    return (c0 * c0 - 3.0) * (c0 - 2.0) * (c0 - 2.0) * c0 * c0 + poly_P(c0) * (c0 * c0 - 5.0 * c0 + 8.0);
}

}  // namespace

double re_g11_rotated(double c0, int n) {
    require_hopf_range(c0, "limit_c1_real");
    const double s = root(c0);
    const double Theta = phase_total(c0, n);
    return (Theta * s / (1.0 - c0) + Theta * Theta * (1.0 - c0)) / g11_denominator(c0, Theta);
}

double im_g11_rotated(double c0, int n) {
    require_hopf_range(c0, "limit_c1_real");
    const double Theta = phase_total(c0, n);
    return Theta * (c0 - 2.0) * c0 / (1.0 - c0) / g11_denominator(c0, Theta);
}

double re_E_over_c0(double c0) {
    require_hopf_range(c0, "limit_c1_real");
    const double s = root(c0);
    const double one_m = 1.0 - c0;
    const double cos2 = (1.0 - c0 * c0 + 2.0 * c0) / (one_m * one_m);
    const double sin2 = -2.0 * s / (one_m * one_m);
    const double a = one_m * cos2 - 1.0;
    const double b = one_m * sin2 + 2.0 * s;
    const double num = ((c0 - 1.0) + (1.0 + 3.0 * c0 * c0 - 6.0 * c0) / (one_m * one_m)) * (c0 - 2.0) * c0;
    return num / (a * a + b * b);
}

double im_E_over_c0(double c0) {
    require_hopf_range(c0, "limit_c1_real");
    return 2.0 * std::pow(root(c0), 5) / poly_P(c0);
}

double two_F_over_c0(double c0) {
    require_hopf_range(c0, "limit_c1_real");
    return 2.0 * (c0 - 2.0);
}

double real_bracket(double c0) {
    require_hopf_range(c0, "limit_c1_real");
    return poly_Q(c0) / (poly_P(c0) * (c0 - 2.0));
}

double sign_term_A(double c0) {
    require_hopf_range(c0, "limit_c1_real");
    return 2.0 * std::pow(root(c0), 7) * (c0 - 2.0) / (c0 - 1.0) - poly_Q(c0) * (c0 - 1.0);
}

double sign_term_B(double c0) {
    require_hopf_range(c0, "limit_c1_real");
    return -poly_Q(c0);
}

}  // namespace limits

double limit_c1_real(double c0, int n) {
    if (!(c0 > 2.0)) {
        std::ostringstream os;
        os << "c0 = " << c0 << " must exceed 2";
        throw PreconditionError("normal-form", "limit_c1_real", os.str());
    }
    if (n < 0) throw PreconditionError("normal-form", "limit_c1_real", "n must be >= 0");
    // Re C1 -> (1/2) Re[g11 e^{-i theta0} (E/c0 + 2F/c0 + c0/(c0-2) - c0)]
    return 0.5 * (limits::re_g11_rotated(c0, n) * limits::real_bracket(c0) -
                  limits::im_g11_rotated(c0, n) * limits::im_E_over_c0(c0));
}

}  // namespace blowfly
