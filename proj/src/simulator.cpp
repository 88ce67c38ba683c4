#include "blowfly/simulator.hpp"

#include "blowfly/errors.hpp"
#include "blowfly/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blowfly {

namespace {

constexpr double kBlowUp = 1e8;

struct StepPlan {
    double dt;
    int delay_steps;
    long n_steps;
};

StepPlan plan_steps(double tau_hat, double t_end, double dt, const char* op) {
    if (!(dt > 0.0)) throw PreconditionError("simulator", op, "dt must be positive");
    if (!(t_end > 0.0)) throw PreconditionError("simulator", op, "t_end must be positive");
    if (tau_hat < 0.0) throw PreconditionError("simulator", op, "delay must be nonnegative");
    StepPlan plan{dt, 0, 0};
    if (tau_hat > 0.0) {
        plan.delay_steps = std::max(1, static_cast<int>(std::lround(tau_hat / dt)));
        plan.dt = tau_hat / plan.delay_steps;
    }
    plan.n_steps = static_cast<long>(std::ceil(t_end / plan.dt - 1e-9));
    return plan;
}

[[noreturn]] void blow_up(const char* op, double t, const char* what) {
    std::ostringstream os;
    os << what << " at t = " << t;
    throw BlowUpError(op, os.str(), t);
}

}  // namespace

SimulationTrace simulate_pde(const ModelParams& model, const History& history, const SimulationOptions& opts) {
    const Grid1D& grid = model.grid;
    const auto& c = model.coeffs;
    const int n = grid.size();
    if (!(model.r > 0.0)) throw PreconditionError("simulator", "simulate_pde", "r = 1/d must be positive");
    const double d = model.d();
    const double tau_hat = model.tau_hat();
    const double a = model.a;
    const StepPlan plan = plan_steps(tau_hat, opts.t_end, opts.dt, "simulate_pde");
    const double dt = plan.dt;

    RealField u(n);
    if (const auto* level = std::get_if<double>(&history)) {
        u.setConstant(*level);
    } else {
        u = std::get<RealField>(history);
        grid.check_size(u.size());
    }
    if ((u.array() <= 0.0).any() || !u.allFinite()) {
        throw PreconditionError("simulator", "simulate_pde", "history must be positive");
    }

    auto birth = [&](const RealField& v) {
        return (c.p.array() * v.array() * (-a * v.array()).exp()).matrix().eval();
    };

    // Crank-Nicolson: (I - dt/2 d L) u+ = (I + dt/2 d L) u + dt (birth(u(t - tau)) - delta u)
    const DiscreteLaplacian lap(grid);
    const double k = 0.5 * dt * d;
    const RealField lo = -k * lap.lower();
    const RealField up = -k * lap.upper();
    const RealField di = (RealField::Ones(n) - k * lap.diag());
    const TridiagonalLU<double> implicit(lo, di, up);

    // Ring buffer of delayed birth terms; slot j holds birth(u at step j - m).
    const int m = plan.delay_steps;
    std::vector<RealField> ring(static_cast<std::size_t>(std::max(m, 1)), birth(u));

    SimulationTrace trace;
    trace.dt = dt;
    trace.d = d;
    trace.tau_hat = tau_hat;
    trace.a = a;
    trace.x = grid.nodes();
    trace.times.reserve(plan.n_steps + 1);
    trace.mean_series.reserve(plan.n_steps + 1);
    trace.times.push_back(0.0);
    trace.mean_series.push_back(spatial_average(u, grid));
    if (opts.snapshot_stride > 0) trace.snapshots.push_back({0.0, u});

    for (long step = 0; step < plan.n_steps; ++step) {
        RealField delayed;
        if (m == 0) {
            delayed = birth(u);
        } else {
            auto& slot = ring[static_cast<std::size_t>(step % m)];
            delayed = std::move(slot);
            slot = birth(u);
        }
        const RealField rhs = u + k * lap.apply<double>(u) + dt * (delayed - c.delta.cwiseProduct(u));
        u = implicit.solve(rhs);

        const double t = (step + 1) * dt;
        if (!u.allFinite()) blow_up("simulate_pde", t, "non-finite value");
        if (u.maxCoeff() > kBlowUp) blow_up("simulate_pde", t, "value above 1e8");
        if (u.minCoeff() <= 0.0) blow_up("simulate_pde", t, "loss of positivity");

        trace.times.push_back(t);
        trace.mean_series.push_back(spatial_average(u, grid));
        if (opts.snapshot_stride > 0 && (step + 1) % opts.snapshot_stride == 0) trace.snapshots.push_back({t, u});
    }
    return trace;
}

SimulationTrace simulate_average_dde(double p_bar, double delta_bar, double a, double tau_check, double history,
                                     const SimulationOptions& opts) {
    if (!(history > 0.0)) throw PreconditionError("simulator", "simulate_average_dde", "history must be positive");
    if (!(p_bar > 0.0) || !(delta_bar > 0.0) || !(a > 0.0)) {
        throw PreconditionError("simulator", "simulate_average_dde", "p_bar, delta_bar and a must be positive");
    }
    const StepPlan plan = plan_steps(tau_check, opts.t_end, opts.dt, "simulate_average_dde");
    const double dt = plan.dt;
    const int m = plan.delay_steps;
    auto birth = [&](double v) { return p_bar * v * std::exp(-a * v); };

    SimulationTrace trace;
    trace.dt = dt;
    trace.tau_hat = tau_check;
    trace.a = a;
    trace.times.reserve(plan.n_steps + 1);
    trace.mean_series.reserve(plan.n_steps + 1);
    trace.times.push_back(0.0);
    trace.mean_series.push_back(history);

    // Past values u_{j} for j in [k - m, k]; the history is constant.
    auto value_at = [&](long j) { return j <= 0 ? (j == 0 ? trace.mean_series[0] : history) : trace.mean_series[j]; };
    double u = history;
    for (long step = 0; step < plan.n_steps; ++step) {
        double b0, b1;
        if (m == 0) {
            b0 = birth(u);
            const double pred = u + dt * (b0 - delta_bar * u);
            b1 = birth(pred);
            u = u + 0.5 * dt * ((b0 - delta_bar * u) + (b1 - delta_bar * pred));
        } else {
            b0 = birth(value_at(step - m));
            b1 = birth(value_at(step + 1 - m));
            const double pred = u + dt * (b0 - delta_bar * u);
            u = u + 0.5 * dt * ((b0 - delta_bar * u) + (b1 - delta_bar * pred));
        }
        const double t = (step + 1) * dt;
        if (!std::isfinite(u)) blow_up("simulate_average_dde", t, "non-finite value");
        if (u > kBlowUp) blow_up("simulate_average_dde", t, "value above 1e8");
        if (u <= 0.0) blow_up("simulate_average_dde", t, "loss of positivity");
        trace.times.push_back(t);
        trace.mean_series.push_back(u);
    }
    return trace;
}

namespace {

std::size_t tail_start(const SimulationTrace& trace, double tail_fraction, const char* op) {
    if (!(tail_fraction > 0.0) || tail_fraction > 0.5) {
        throw PreconditionError("simulator", op, "tail_fraction must lie in (0, 0.5]");
    }
    const std::size_t total = trace.mean_series.size();
    const auto tail = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(total)));
    if (tail < 100) {
        throw PreconditionError("simulator", op, "fewer than 100 samples in the tail window");
    }
    return total - tail;
}

}  // namespace

PeriodEstimate estimate_period(const SimulationTrace& trace, double tail_fraction) {
    const std::size_t start = tail_start(trace, tail_fraction, "estimate_period");
    const auto& s = trace.mean_series;
    const auto& t = trace.times;
    const std::size_t total = s.size();

    PeriodEstimate est;
    est.tail_fraction = tail_fraction;
    const auto [lo, hi] = std::minmax_element(s.begin() + static_cast<long>(start), s.end());
    const double amplitude = 0.5 * (*hi - *lo);
    double level = 0.0;
    for (std::size_t i = start; i < total; ++i) level += s[i];
    level /= static_cast<double>(total - start);

    std::vector<double> peaks;
    for (std::size_t i = std::max<std::size_t>(start, 1); i + 1 < total; ++i) {
        if (s[i] > s[i - 1] && s[i] >= s[i + 1]) {
            // parabolic refinement of the peak time
            const double denom = s[i - 1] - 2.0 * s[i] + s[i + 1];
            const double shift = denom != 0.0 ? 0.5 * (s[i - 1] - s[i + 1]) / denom : 0.0;
            peaks.push_back(t[i] + shift * (t[i + 1] - t[i]));
        }
    }
    est.maxima = static_cast<int>(peaks.size());
    if (peaks.size() >= 3 && amplitude > 1e-6 * std::abs(level)) {
        est.oscillating = true;
        est.period = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
        est.amplitude = amplitude;
    }
    return est;
}

std::vector<double> windowed_amplitudes(const SimulationTrace& trace, double tail_fraction, int windows) {
    const std::size_t start = tail_start(trace, tail_fraction, "windowed_amplitudes");
    if (windows < 1) throw PreconditionError("simulator", "windowed_amplitudes", "need at least one window");
    const auto& s = trace.mean_series;
    const std::size_t len = (s.size() - start) / static_cast<std::size_t>(windows);
    std::vector<double> out;
    for (int w = 0; w < windows; ++w) {
        const auto b = s.begin() + static_cast<long>(start + w * len);
        const auto e = (w == windows - 1) ? s.end() : b + static_cast<long>(len);
        const auto [lo, hi] = std::minmax_element(b, e);
        out.push_back(0.5 * (*hi - *lo));
    }
    return out;
}

}  // namespace blowfly
