#pragma once

#include "blowfly/model.hpp"

#include <cmath>

namespace testing {

inline blowfly::CoefficientField fig1_coeffs(const blowfly::Grid1D& g) {
    return blowfly::build_coefficients(
        {blowfly::parse_profile("10 + 1*sin(1*x)"), blowfly::parse_profile("2 + 1*cos(0.2*x)")}, g);
}

inline blowfly::CoefficientField fig2_coeffs(const blowfly::Grid1D& g) {
    return blowfly::build_coefficients(
        {blowfly::parse_profile("30 + 1*sin(1*x)"), blowfly::parse_profile("2 + 1*cos(0.2*x)")}, g);
}

// p = e^{c0} delta, delta constant
inline blowfly::CoefficientField constant_coeffs(const blowfly::Grid1D& g, double c0, double delta = 1.0) {
    return blowfly::make_coefficient_field(blowfly::RealField::Constant(g.size(), std::exp(c0) * delta),
                                           blowfly::RealField::Constant(g.size(), delta), g);
}

inline blowfly::ModelParams rescaled(const blowfly::Grid1D& g, const blowfly::CoefficientField& c, double r,
                                     double tau = 0.0, double a = 1.0) {
    return blowfly::ModelParams{r, a, tau, g, c};
}

}  // namespace testing
