#include "blowfly/errors.hpp"
#include "blowfly/model.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace blowfly {

double eval_nonlinearity(double u, int order) {
    const double e = std::exp(-u);
    switch (order) {
        case 0: return u * e;
        case 1: return (1.0 - u) * e;
        case 2: return (u - 2.0) * e;
        case 3: return (3.0 - u) * e;
        default:
            throw PreconditionError("core-model", "eval_nonlinearity",
                                    "order must be 0..3, got " + std::to_string(order));
    }
}

RealField eval_nonlinearity(const RealField& u, int order) {
    RealField out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = eval_nonlinearity(u[i], order);
    return out;
}

double ParametricProfile::operator()(double x) const {
    const double arg = wavenumber * x + phase;
    return base + amplitude * (kind == Kind::Sin ? std::sin(arg) : std::cos(arg));
}

std::string ParametricProfile::to_string() const {
    std::ostringstream os;
    os.precision(12);
    os << base << " + " << amplitude << "*" << (kind == Kind::Sin ? "sin" : "cos") << "(" << wavenumber
       << "*x + " << phase << ")";
    return os.str();
}

namespace {

constexpr const char* kNumber = R"(([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))";

double signed_value(const std::string& sign, const std::string& number) {
    const double v = std::stod(number);
    return sign == "-" ? -v : v;
}

}  // namespace

ParametricProfile parse_profile(std::string_view text) {
    const std::string s(text);
    const std::string num = kNumber;
    static const std::regex expression(
        R"(^\s*)" + num + R"(\s*([-+])\s*)" + num + R"(\s*\*\s*(sin|cos)\s*\(\s*)" + num +
        R"(\s*\*\s*x\s*(?:([-+])\s*)" + num + R"()?\s*\)\s*$)");
    static const std::regex constant(R"(^\s*)" + num + R"(\s*$)");
    static const std::regex tuple(R"(^\s*)" + num + R"(\s*,\s*)" + num + R"(\s*,\s*)" + num + R"(\s*,\s*)" +
                                  num + R"(\s*,\s*(sin|cos)\s*$)");

    std::smatch m;
    ParametricProfile prof;
    if (std::regex_match(s, m, expression)) {
        prof.base = std::stod(m[1]);
        prof.amplitude = signed_value(m[2], m[3]);
        prof.kind = m[4] == "sin" ? ParametricProfile::Kind::Sin : ParametricProfile::Kind::Cos;
        prof.wavenumber = std::stod(m[5]);
        prof.phase = m[7].matched ? signed_value(m[6], m[7]) : 0.0;
        return prof;
    }
    if (std::regex_match(s, m, constant)) {
        prof.base = std::stod(m[1]);
        return prof;
    }
    if (std::regex_match(s, m, tuple)) {
        prof.base = std::stod(m[1]);
        prof.amplitude = std::stod(m[2]);
        prof.wavenumber = std::stod(m[3]);
        prof.phase = std::stod(m[4]);
        prof.kind = m[5] == "sin" ? ParametricProfile::Kind::Sin : ParametricProfile::Kind::Cos;
        return prof;
    }
    throw ConfigError("core-model", "parse_profile", "cannot parse coefficient profile '" + s + "'");
}

SampledProfile read_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("core-model", "read_profile_csv", "cannot open " + path.string());
    }
    SampledProfile out;
    out.source = path.string();
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("core-model", "read_profile_csv", path.string() + " is empty");
    }
    try {
        std::stod(line);
        throw ConfigError("core-model", "read_profile_csv", path.string() + ": missing header row (x,value)");
    } catch (const std::invalid_argument&) {
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError("core-model", "read_profile_csv",
                              path.string() + ":" + std::to_string(line_no) + ": expected 'x,value'");
        }
        try {
            out.x.push_back(std::stod(line.substr(0, comma)));
            out.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ConfigError("core-model", "read_profile_csv",
                              path.string() + ":" + std::to_string(line_no) + ": not a number");
        }
    }
    return out;
}

namespace {

RealField sample(const ProfileSpec& spec, const Grid1D& grid, const char* name) {
    RealField out(grid.size());
    if (const auto* prof = std::get_if<ParametricProfile>(&spec)) {
        for (int i = 0; i < grid.size(); ++i) out[i] = (*prof)(grid.nodes()[i]);
        return out;
    }
    const auto& samples = std::get<SampledProfile>(spec);
    if (static_cast<int>(samples.values.size()) != grid.size()) {
        throw PreconditionError("core-model", "build_coefficients",
                                std::string(name) + " samples: " + std::to_string(samples.values.size()) +
                                    " rows for " + std::to_string(grid.size()) + " nodes");
    }
    const double tol = 1e-9 * grid.length();
    for (int i = 0; i < grid.size(); ++i) {
        if (std::abs(samples.x[i] - grid.nodes()[i]) > tol) {
            throw PreconditionError("core-model", "build_coefficients",
                                    std::string(name) + " samples: row " + std::to_string(i) +
                                        " is not at node x = " + std::to_string(grid.nodes()[i]));
        }
        out[i] = samples.values[i];
    }
    return out;
}

}  // namespace

CoefficientField make_coefficient_field(RealField p, RealField delta, const Grid1D& grid) {
    grid.check_size(p.size());
    grid.check_size(delta.size());
    for (int i = 0; i < grid.size(); ++i) {
        if (!(p[i] > 0.0) || !(delta[i] > 0.0)) {
            throw PreconditionError("core-model", "build_coefficients",
                                    "nonpositive coefficient at x = " + std::to_string(grid.nodes()[i]));
        }
    }
    CoefficientField field;
    field.p_bar = spatial_average(p, grid);
    field.delta_bar = spatial_average(delta, grid);
    field.c0 = std::log(field.p_bar / field.delta_bar);
    field.p = std::move(p);
    field.delta = std::move(delta);
    return field;
}

CoefficientField build_coefficients(const CoefficientSpec& spec, const Grid1D& grid) {
    return make_coefficient_field(sample(spec.p, grid, "p"), sample(spec.delta, grid, "delta"), grid);
}

ModelParams ModelParams::with_r(double new_r) const {
    ModelParams m = *this;
    m.r = new_r;
    return m;
}

ModelParams ModelParams::from_diffusion(double d, double tau_hat, double a, Grid1D grid, CoefficientField coeffs) {
    if (!(d > 0.0)) throw PreconditionError("core-model", "ModelParams", "diffusion rate d must be positive");
    if (tau_hat < 0.0) throw PreconditionError("core-model", "ModelParams", "delay must be nonnegative");
    return ModelParams{1.0 / d, a, d * tau_hat, std::move(grid), std::move(coeffs)};
}

}  // namespace blowfly
