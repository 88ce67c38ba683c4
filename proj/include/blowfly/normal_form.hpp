#pragma once

#include "blowfly/hopf.hpp"

#include <string>
#include <vector>

namespace blowfly {

struct GCoefficients {
    Complex g20;
    Complex g11;
    Complex g02;
    Complex g21;
};

/// Solves Delta(r, 2 i nu, tau_n) E = -r e^{-2 i nu tau_n} p f''(u) psi^2.
/// Throws ResonanceError when 2 i nu is (numerically) a characteristic value.
ComplexField solve_E(const HopfSolution& sol, int n);

/// Solves Delta(r, 0, tau_n) F = -r p f''(u) |psi|^2.
ComplexField solve_F(const HopfSolution& sol, int n);

/// Quadratic and cubic normal-form coefficients at tau_n. w20(-1) and w11(-1)
/// are assembled from E and F on the fly.
GCoefficients g_coefficients(const HopfSolution& sol, int n, const ComplexField& E, const ComplexField& F);

/// First Lyapunov quantity C1(0) for the rescaled frequency nu_r * tau_n.
Complex c1_zero(const GCoefficients& g, double nu_r, double tau_n);

enum class Direction { Forward, Backward };
enum class OrbitStability { Stable, Unstable, Undetermined };

std::string to_string(Direction d);
std::string to_string(OrbitStability s);

struct BifurcationVerdict {
    double mu2 = 0.0;
    Direction direction = Direction::Forward;
    OrbitStability orbit_stability = OrbitStability::Undetermined;
    std::vector<std::string> warnings;
};

/// mu2 = -Re C1 / Re dmu; forward iff mu2 > 0. Orbital stability (sign of
/// Re C1) is only reported for the first threshold n = 0.
BifurcationVerdict bifurcation_verdict(Complex C1, Complex dmu, int n);

struct NormalFormReport {
    int n = 0;
    double r = 0.0;
    double tau_n = 0.0;
    ComplexField E;
    ComplexField F;
    Complex Sn;
    GCoefficients g;
    Complex C1;
    Complex dmu;
    double mu2 = 0.0;
    Direction direction = Direction::Forward;
    OrbitStability orbit_stability = OrbitStability::Undetermined;
    std::vector<std::string> warnings;
};

/// Full pipeline at threshold index n: E, F, g-coefficients, C1(0), dmu/dtau and verdict.
NormalFormReport normal_form_report(const HopfSolution& sol, int n);

/// Closed-form r -> 0 limits. Every quantity depends on c0 (and n) only.
namespace limits {

double re_g11_rotated(double c0, int n);   ///< Re(g11 e^{-i theta0})
double im_g11_rotated(double c0, int n);   ///< Im(g11 e^{-i theta0})
double re_E_over_c0(double c0);
double im_E_over_c0(double c0);
double two_F_over_c0(double c0);           ///< 2 (c0 - 2)
/// Re E/c0 + 2F/c0 + c0/(c0 - 2) - c0, written over a common denominator.
double real_bracket(double c0);
/// Sign certificates of the numerator of the limit; both negative for c0 > 2.
double sign_term_A(double c0);
double sign_term_B(double c0);

}  // namespace limits

/// lim_{r->0} Re C1(0) at threshold n. Throws PreconditionError for c0 <= 2.
double limit_c1_real(double c0, int n);

}  // namespace blowfly
