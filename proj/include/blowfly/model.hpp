#pragma once

#include "blowfly/grid.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace blowfly {

/// Derivatives of the birth nonlinearity f(u) = u e^{-u}, order 0..3.
double eval_nonlinearity(double u, int order);

/// Nodewise eval_nonlinearity.
RealField eval_nonlinearity(const RealField& u, int order);

/// c + A*sin(k x + phi) or c + A*cos(k x + phi).
struct ParametricProfile {
    enum class Kind { Sin, Cos };

    double base = 0.0;
    double amplitude = 0.0;
    double wavenumber = 0.0;
    double phase = 0.0;
    Kind kind = Kind::Sin;

    double operator()(double x) const;
    std::string to_string() const;
};

/// Per-node samples read from a two-column `x,value` CSV.
struct SampledProfile {
    std::vector<double> x;
    std::vector<double> values;
    std::string source;
};

using ProfileSpec = std::variant<ParametricProfile, SampledProfile>;

/// Parses "10 + 1*sin(1*x + 0)", "2 - 0.5*cos(0.2*x - 1)", a bare constant "7",
/// or the tuple form "10, 1, 1, 0, sin".
ParametricProfile parse_profile(std::string_view text);

SampledProfile read_profile_csv(const std::filesystem::path& path);

struct CoefficientSpec {
    ProfileSpec p;
    ProfileSpec delta;
};

/// p(x), delta(x) sampled on a grid with their quadrature averages and
/// c0 = ln(p_bar / delta_bar).
struct CoefficientField {
    RealField p;
    RealField delta;
    double p_bar = 0.0;
    double delta_bar = 0.0;
    double c0 = 0.0;
};

CoefficientField build_coefficients(const CoefficientSpec& spec, const Grid1D& grid);

/// Builds the field directly from node samples (used by tests and CSV input).
CoefficientField make_coefficient_field(RealField p, RealField delta, const Grid1D& grid);

/// Rescaled model: u_t = Lap u + r p f(u(t - tau)) - r delta u.
/// The original model has d = 1/r and delay tau_hat = r * tau.
struct ModelParams {
    double r = 0.0;
    double a = 1.0;
    double tau = 0.0;
    Grid1D grid;
    CoefficientField coeffs;

    double d() const { return 1.0 / r; }
    double tau_hat() const { return r * tau; }

    /// Same model with another r; tau is kept.
    ModelParams with_r(double new_r) const;

    /// Model from diffusion rate d and delay tau_hat of the unscaled equation.
    static ModelParams from_diffusion(double d, double tau_hat, double a, Grid1D grid, CoefficientField coeffs);
};

}  // namespace blowfly
