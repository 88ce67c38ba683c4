#pragma once

#include "blowfly/hopf.hpp"
#include "blowfly/model.hpp"
#include "blowfly/simulator.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blowfly {

enum class Task { Steady, Hopf, NormalForm, Simulate, AverageDde, Sweep, Reproduce };

std::string to_string(Task t);
Task parse_task(std::string_view name);

/// "section.key" -> raw value, after comments and quotes are stripped.
using ConfigEntries = std::map<std::string, std::string>;

ConfigEntries parse_config_text(std::string_view text);
ConfigEntries load_config_file(const std::filesystem::path& path);

/// Applies one `section.key=value` override.
void apply_override(ConfigEntries& entries, std::string_view assignment);

struct RunConfig {
    Task task = Task::Steady;
    std::string figure;  ///< reproduce target: fig1 or fig2

    // model
    double length = 3.0;
    int n_points = 301;
    double a = 1.0;
    std::optional<double> d;
    std::optional<double> r;
    std::optional<double> tau_hat;
    std::optional<double> tau;
    std::optional<CoefficientSpec> coeffs;

    // hopf / normalform
    int n_max = 0;
    int n_steps = 20;
    double r_cap = 0.5;

    // simulate / average-dde
    SimulationOptions sim;
    double history_factor = 0.9;
    int field_stride = 0;
    double tail_fraction = 0.25;
    std::optional<double> tau_check;
    std::optional<double> tau_check_factor;

    // sweep
    std::vector<double> r_list;

    std::filesystem::path out_dir = "out";
    ConfigEntries echo;
};

/// Validates and converts entries for the given task. Relative CSV paths are
/// resolved against base_dir. Throws ConfigError.
RunConfig make_run_config(Task task, const ConfigEntries& entries, const std::filesystem::path& base_dir = {});

/// r from (d or r) and tau from (tau_hat or tau); tau defaults to 0 when the
/// task does not use the delay.
ModelParams build_model(const RunConfig& cfg);

/// Convergence and sustained-oscillation checks on a mean-series trace.
struct RegimeVerdict {
    double drift = 0.0;  ///< |mean(t_end) - mean(t_end / 2)|
    bool converged = false;
    double tail_amplitude = 0.0;
    std::vector<double> window_amplitudes;  ///< last quarter, four windows
    bool non_decaying = false;
    bool sustained = false;
};

RegimeVerdict classify_regime(const SimulationTrace& trace);

struct SweepRow {
    double r = 0.0;
    std::string status;  ///< OK, STALL, FAIL or LIMIT
    std::string message;
    double theta = 0.0;
    double h = 0.0;
    double beta = 0.0;
    double tau0 = 0.0;
    double tau_hat0 = 0.0;
    Complex S0;
    double dmu_over_r2 = 0.0;
    double c1_real = 0.0;
};

/// One continuation per r (concurrently), then the closed-form r = 0 row.
/// Failures are recorded per row. Rows keep the input order.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct TaskOutcome {
    int exit_code = 0;
    std::vector<std::string> report;  ///< headline lines, also written to summary.txt
    std::vector<std::string> artifacts;
};

/// Runs the task and writes its artifacts, summary.txt and manifest.txt.
/// Errors are mapped to exit codes: 1 config, 2 solver, 3 blow-up.
TaskOutcome run_task(const RunConfig& cfg);

int exit_code_for(const std::exception& e);

}  // namespace blowfly
