#pragma once

#include "blowfly/model.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace blowfly {

/// Constant-in-time history on [-tau_hat, 0]: a single level or a field.
using History = std::variant<double, RealField>;

struct SimulationOptions {
    double t_end = 100.0;
    double dt = 5e-3;
    /// Keep the full field every `snapshot_stride` steps (0 = never).
    int snapshot_stride = 0;
};

struct Snapshot {
    double t = 0.0;
    RealField u;
};

/// Time series of a run in the unscaled model (time t, density u).
struct SimulationTrace {
    std::vector<double> times;
    std::vector<double> mean_series;
    std::vector<Snapshot> snapshots;
    double dt = 0.0;      ///< step actually used (tau_hat / dt is an integer)
    double d = 0.0;       ///< diffusion rate; 0 for the averaged DDE
    double tau_hat = 0.0;
    double a = 1.0;
    RealField x;          ///< node positions of the snapshots (empty for the DDE)
};

/// Integrates u_t = d Lap u + p u(t - tau_hat) e^{-a u(t - tau_hat)} - delta u
/// with Crank-Nicolson diffusion and explicit reaction/death; the delay is
/// read from a ring buffer. Model parameters enter through d = 1/r and
/// tau_hat = r tau. Throws BlowUpError on NaN, values > 1e8 or loss of positivity.
SimulationTrace simulate_pde(const ModelParams& model, const History& history, const SimulationOptions& opts);

/// u' = p_bar u(t - tau) e^{-a u(t - tau)} - delta_bar u with Heun's method
/// on a step that divides tau.
SimulationTrace simulate_average_dde(double p_bar, double delta_bar, double a, double tau_check, double history,
                                     const SimulationOptions& opts);

struct PeriodEstimate {
    std::optional<double> period;
    std::optional<double> amplitude;
    bool oscillating = false;
    double tail_fraction = 0.0;
    int maxima = 0;
};

/// Mean spacing of the local maxima of mean_series in the last tail_fraction
/// of the run. Oscillating iff at least 3 maxima and a half peak-to-trough
/// amplitude above 1e-6 times the mean level.
PeriodEstimate estimate_period(const SimulationTrace& trace, double tail_fraction);

/// Half peak-to-trough amplitude of mean_series over `windows` equal windows
/// covering the last tail_fraction of the run (oldest first).
std::vector<double> windowed_amplitudes(const SimulationTrace& trace, double tail_fraction, int windows);

}  // namespace blowfly
