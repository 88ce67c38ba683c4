#include "blowfly/workbench.hpp"

#include "blowfly/errors.hpp"
#include "blowfly/normal_form.hpp"
#include "blowfly/output.hpp"
#include "blowfly/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <numeric>

namespace blowfly {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string kv(const std::string& key, double v) { return key + " = " + format_number(v); }

std::string kv(const std::string& key, const std::string& v) { return key + " = " + v; }

ContinuationOptions continuation_options(const RunConfig& cfg) {
    ContinuationOptions opts;
    opts.r_cap = cfg.r_cap;
    return opts;
}

void require_positive_r(const ModelParams& model) {
    if (!(model.r > 0.0)) throw ConfigError("workbench-cli", "config", "this task needs model.d or model.r");
}

std::string field_csv(const Grid1D& grid, const RealField& u) {
    std::string out = "x,u\n";
    for (int i = 0; i < grid.size(); ++i) out += (CsvRow() << grid.nodes()[i] << u[i]).str();
    return out;
}

std::string trace_csv(const SimulationTrace& trace) {
    std::string out = "t,mean_u\n";
    for (std::size_t k = 0; k < trace.times.size(); ++k) out += (CsvRow() << trace.times[k] << trace.mean_series[k]).str();
    return out;
}

void describe_regime(const SimulationTrace& trace, std::vector<std::string>& report, const std::string& label) {
    const RegimeVerdict v = classify_regime(trace);
    std::string verdict = v.sustained ? "sustained oscillation" : (v.converged ? "converged" : "not settled");
    report.push_back(label + verdict + " (drift " + format_number(v.drift) + ", tail amplitude " +
                     format_number(v.tail_amplitude) + ")");
}

void describe_period(const SimulationTrace& trace, double tail_fraction, std::vector<std::string>& report) {
    try {
        const PeriodEstimate est = estimate_period(trace, tail_fraction);
        report.push_back(kv("oscillating", est.oscillating ? "yes" : "no"));
        if (est.period) report.push_back(kv("period", *est.period));
        if (est.amplitude) report.push_back(kv("amplitude", *est.amplitude));
    } catch (const PreconditionError& e) {
        report.push_back(kv("period", std::string("n/a (") + e.detail() + ")"));
    }
}

void run_steady(const RunConfig& cfg, OutputDir& dir, TaskOutcome& out) {
    const ModelParams model = build_model(cfg);
    require_positive_r(model);
    const SteadyState ss = solve_steady_state(model);
    dir.write("steady_state.csv", field_csv(model.grid, ss.u));
    out.report.push_back("c0 = " + fixed4(model.coeffs.c0));
    out.report.push_back(kv("p_bar", model.coeffs.p_bar));
    out.report.push_back(kv("delta_bar", model.coeffs.delta_bar));
    out.report.push_back(kv("r", model.r));
    out.report.push_back(kv("d", model.d()));
    out.report.push_back(kv("mean u_r", spatial_average(ss.u, model.grid)));
    out.report.push_back(kv("mean u_r / a", spatial_average(ss.u, model.grid) / model.a));
    out.report.push_back(kv("residual", ss.residual_norm));
    out.report.push_back(kv("newton iterations", static_cast<double>(ss.newton_iterations)));
}

// NoHopf goes into the report and the task still exits 0.
std::optional<HopfSolution> hopf_or_report(const ModelParams& model, const RunConfig& cfg, TaskOutcome& out) {
    try {
        return continue_hopf(model, model.r, cfg.n_steps, continuation_options(cfg));
    } catch (const NoHopfError& e) {
        out.report.push_back(e.detail());
        return std::nullopt;
    }
}

void run_hopf(const RunConfig& cfg, OutputDir& dir, TaskOutcome& out) {
    const ModelParams model = build_model(cfg);
    require_positive_r(model);
    out.report.push_back("c0 = " + fixed4(model.coeffs.c0));
    const auto found = hopf_or_report(model, cfg, out);
    if (!found) return;
    const HopfSolution& sol = *found;
    const ThresholdSequence seq = hopf_thresholds(sol, cfg.n_max);
    const LimitHopfData limit = limit_hopf_data(model.coeffs, model.grid);

    std::string csv = "key,value\n";
    auto scalar = [&](const std::string& key, double v) { csv += (CsvRow() << key << v).str(); };
    scalar("r", sol.r());
    scalar("d", 1.0 / sol.r());
    scalar("beta", sol.beta);
    scalar("h", sol.h);
    scalar("theta", sol.theta);
    scalar("nu", sol.nu);
    for (int n = 0; n <= seq.n_max; ++n) scalar("tau_" + std::to_string(n), seq.taus[n]);
    for (int n = 0; n <= seq.n_max; ++n) scalar("tau_hat_" + std::to_string(n), seq.taus_hat[n]);
    csv += "\nx,Re z,Im z,Re psi,Im psi\n";
    for (int i = 0; i < model.grid.size(); ++i) {
        csv += (CsvRow() << model.grid.nodes()[i] << sol.z[i].real() << sol.z[i].imag() << sol.psi[i].real()
                         << sol.psi[i].imag())
                   .str();
    }
    dir.write("hopf.csv", csv);

    const Complex S0 = compute_Sn(sol, 0);
    out.report.push_back(kv("theta0", limit.theta0));
    out.report.push_back(kv("h0", limit.h0));
    out.report.push_back(kv("r", sol.r()));
    out.report.push_back(kv("d", 1.0 / sol.r()));
    out.report.push_back(kv("theta_r", sol.theta));
    out.report.push_back(kv("h_r", sol.h));
    out.report.push_back(kv("beta_r", sol.beta));
    out.report.push_back(kv("nu_r", sol.nu));
    out.report.push_back(kv("tau_0", seq.taus[0]));
    out.report.push_back(kv("tau_hat_0", seq.taus_hat[0]));
    out.report.push_back(kv("period (M1 time)", 2.0 * M_PI * sol.r() / sol.nu));
    out.report.push_back(kv("|S_0|", std::abs(S0)));
    out.report.push_back(kv("Re dmu/dtau / r^2", transversality(sol, 0).real() / (sol.r() * sol.r())));
    out.report.push_back(kv("second Neumann eigenvalue", second_neumann_eigenvalue(model.grid)));
    if (simplicity_warning(S0, sol)) out.report.push_back("warning: |S_0| below 1e-8 c0^2 L");
}

void run_normalform(const RunConfig& cfg, OutputDir& dir, TaskOutcome& out) {
    const ModelParams model = build_model(cfg);
    require_positive_r(model);
    out.report.push_back("c0 = " + fixed4(model.coeffs.c0));
    const auto found = hopf_or_report(model, cfg, out);
    if (!found) return;
    const HopfSolution& sol = *found;
    std::string csv =
        "r,d,n,tau_n,tau_hat_n,Re_g20,Im_g20,Re_g11,Im_g11,Re_g02,Im_g02,Re_g21,Im_g21,Re_C1,Im_C1,Re_dmu,Im_dmu,mu2,"
        "direction,orbit_stability\n";
    for (int n = 0; n <= cfg.n_max; ++n) {
        const NormalFormReport rep = normal_form_report(sol, n);
        csv += (CsvRow() << rep.r << 1.0 / rep.r << n << rep.tau_n << rep.r * rep.tau_n << rep.g.g20.real()
                         << rep.g.g20.imag() << rep.g.g11.real() << rep.g.g11.imag() << rep.g.g02.real()
                         << rep.g.g02.imag() << rep.g.g21.real() << rep.g.g21.imag() << rep.C1.real() << rep.C1.imag()
                         << rep.dmu.real() << rep.dmu.imag() << rep.mu2 << to_string(rep.direction)
                         << to_string(rep.orbit_stability))
                   .str();
        const std::string tag = "[n = " + std::to_string(n) + "] ";
        out.report.push_back(tag + kv("tau_hat_n", rep.r * rep.tau_n));
        out.report.push_back(tag + kv("Re C1(0)", rep.C1.real()));
        out.report.push_back(tag + kv("mu2", rep.mu2));
        out.report.push_back(tag + kv("direction", to_string(rep.direction)));
        out.report.push_back(tag + kv("orbit stability", to_string(rep.orbit_stability)));
        out.report.push_back(tag + kv("Re C1 limit (r -> 0)", limit_c1_real(model.coeffs.c0, n)));
        for (const auto& w : rep.warnings) out.report.push_back(tag + "warning: " + w);
    }
    dir.write("normalform.csv", csv);
}

void run_simulate(const RunConfig& cfg, OutputDir& dir, TaskOutcome& out) {
    const ModelParams model = build_model(cfg);
    require_positive_r(model);
    const SteadyState ss = solve_steady_state(model);
    const RealField history = cfg.history_factor * ss.u / model.a;

    SimulationOptions opts = cfg.sim;
    const int snap = cfg.sim.snapshot_stride;
    const int field = cfg.field_stride;
    opts.snapshot_stride = (snap > 0 && field > 0) ? std::gcd(snap, field) : std::max(snap, field);
    const SimulationTrace trace = simulate_pde(model, history, opts);

    dir.write("trace.csv", trace_csv(trace));
    std::string field_rows = "t,x,u\n";
    for (const Snapshot& s : trace.snapshots) {
        const long step = std::lround(s.t / trace.dt);
        if (snap > 0 && step % snap == 0) dir.write("snapshot_" + format_number(s.t) + ".csv", field_csv(model.grid, s.u));
        if (field > 0 && step % field == 0) {
            for (int i = 0; i < model.grid.size(); ++i) field_rows += (CsvRow() << s.t << trace.x[i] << s.u[i]).str();
        }
    }
    if (field > 0) dir.write("field.csv", field_rows);

    out.report.push_back("c0 = " + fixed4(model.coeffs.c0));
    out.report.push_back(kv("d", trace.d));
    out.report.push_back(kv("tau_hat", trace.tau_hat));
    out.report.push_back(kv("r", model.r));
    out.report.push_back(kv("tau", model.tau));
    out.report.push_back(kv("dt used", trace.dt));
    out.report.push_back(kv("steady mean (u_r / a)", spatial_average(ss.u, model.grid) / model.a));
    out.report.push_back(kv("final mean", trace.mean_series.back()));
    describe_regime(trace, out.report, "regime: ");
    describe_period(trace, cfg.tail_fraction, out.report);
}

void run_average_dde(const RunConfig& cfg, OutputDir& dir, TaskOutcome& out) {
    const Grid1D grid(cfg.length, cfg.n_points);
    const CoefficientField c = build_coefficients(*cfg.coeffs, grid);
    const double u_star = c.c0 / cfg.a;
    double tau_check = cfg.tau_check.value_or(0.0);
    std::optional<double> tau_check0;
    std::optional<double> h0;
    if (c.c0 > 2.0) {
        const LimitHopfData limit = limit_hopf_data(c, grid);
        tau_check0 = limit.theta0 / limit.h0;
        h0 = limit.h0;
    }
    if (cfg.tau_check_factor) {
        if (!tau_check0) throw NoHopfError("average-dde", c.c0);
        tau_check = *cfg.tau_check_factor * *tau_check0;
    }
    const SimulationTrace trace = simulate_average_dde(c.p_bar, c.delta_bar, cfg.a, tau_check, cfg.history_factor * u_star, cfg.sim);
    dir.write("trace.csv", trace_csv(trace));

    out.report.push_back("c0 = " + fixed4(c.c0));
    out.report.push_back(kv("p_bar", c.p_bar));
    out.report.push_back(kv("delta_bar", c.delta_bar));
    out.report.push_back(kv("u* = c0 / a", u_star));
    out.report.push_back(kv("tau_check", tau_check));
    if (tau_check0) out.report.push_back(kv("tau_check_0", *tau_check0));
    if (h0) out.report.push_back(kv("predicted period 2 pi / h0", 2.0 * M_PI / *h0));
    out.report.push_back(kv("dt used", trace.dt));
    out.report.push_back(kv("final value", trace.mean_series.back()));
    describe_regime(trace, out.report, "regime: ");
    describe_period(trace, cfg.tail_fraction, out.report);
}

void run_sweep_task(const RunConfig& cfg, OutputDir& dir, TaskOutcome& out) {
    const std::vector<SweepRow> rows = run_sweep(cfg);
    dir.write("sweep.csv", sweep_csv(rows));
    for (const SweepRow& row : rows) {
        std::string line = "r = " + format_number(row.r) + ": " + row.status;
        if (!row.message.empty()) line += " (" + row.message + ")";
        out.report.push_back(line);
    }
}

struct FigureSpec {
    const char* name;
    const char* p;
    const char* delta;
};

void run_reproduce(const RunConfig& cfg, OutputDir& dir, TaskOutcome& out) {
    FigureSpec fig;
    if (cfg.figure == "fig1") {
        fig = {"fig1", "10 + 1*sin(1*x)", "2 + 1*cos(0.2*x)"};
    } else if (cfg.figure == "fig2") {
        fig = {"fig2", "30 + 1*sin(1*x)", "2 + 1*cos(0.2*x)"};
    } else {
        throw ConfigError("workbench-cli", "reproduce", "unknown figure '" + cfg.figure + "' (expected fig1 or fig2)");
    }
    const double d = 0.1;
    const double a = 2.5;
    const Grid1D grid(3.0, cfg.n_points);
    const CoefficientField c = build_coefficients({parse_profile(fig.p), parse_profile(fig.delta)}, grid);
    out.report.push_back("c0 = " + fixed4(c.c0));
    out.report.push_back(kv("p", fig.p));
    out.report.push_back(kv("delta", fig.delta));
    out.report.push_back(kv("d", d));
    out.report.push_back(kv("a", a));

    SimulationOptions opts;
    opts.t_end = 400.0;
    opts.dt = 5e-3;
    for (double tau_hat : {0.0, 2.0}) {
        const ModelParams model = ModelParams::from_diffusion(d, tau_hat, a, grid, c);
        const SteadyState ss = solve_steady_state(model);
        const SimulationTrace trace = simulate_pde(model, RealField(0.9 * ss.u / a), opts);
        const std::string tag = format_number(tau_hat);
        dir.write("trace_tau_hat_" + tag + ".csv", trace_csv(trace));
        describe_regime(trace, out.report, "tau_hat = " + tag + ": ");
    }
}

}  // namespace

RegimeVerdict classify_regime(const SimulationTrace& trace) {
    RegimeVerdict v;
    const auto& s = trace.mean_series;
    if (s.empty()) throw PreconditionError("simulator", "classify_regime", "empty trace");
    v.drift = std::abs(s.back() - s[(s.size() - 1) / 2]);
    v.converged = v.drift < 1e-4;
    const std::size_t start = s.size() - s.size() / 4;
    const auto [lo, hi] = std::minmax_element(s.begin() + static_cast<long>(start), s.end());
    v.tail_amplitude = 0.5 * (*hi - *lo);
    v.window_amplitudes = windowed_amplitudes(trace, 0.25, 4);
    v.non_decaying = true;
    for (std::size_t i = 1; i < v.window_amplitudes.size(); ++i) {
        if (v.window_amplitudes[i] < (1.0 - 1e-3) * v.window_amplitudes[i - 1]) v.non_decaying = false;
    }
    v.sustained = v.tail_amplitude > 1e-2 && v.non_decaying;
    return v;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
    if (cfg.r_list.empty()) throw ConfigError("workbench-cli", "sweep", "sweep.r_list is empty");
    const ModelParams base = build_model(cfg).with_r(0.0);
    const ContinuationOptions opts = continuation_options(cfg);

    auto solve_row = [&base, &opts, n_steps = cfg.n_steps](double r) {
        SweepRow row;
        row.r = r;
        row.theta = row.h = row.beta = row.tau0 = row.tau_hat0 = row.dmu_over_r2 = row.c1_real = kNaN;
        row.S0 = Complex(kNaN, kNaN);
        try {
            const HopfSolution sol = continue_hopf(base.with_r(r), r, n_steps, opts);
            row.theta = sol.theta;
            row.h = sol.h;
            row.beta = sol.beta;
            row.tau0 = sol.tau(0);
            row.tau_hat0 = r * row.tau0;
            row.S0 = compute_Sn(sol, 0);
            row.dmu_over_r2 = transversality(sol, 0).real() / (r * r);
            row.c1_real = normal_form_report(sol, 0).C1.real();
            row.status = "OK";
        } catch (const ContinuationStall& e) {
            row.status = "STALL";
            row.message = e.detail();
        } catch (const Error& e) {
            row.status = "FAIL";
            row.message = e.what();
        }
        return row;
    };

    std::vector<std::future<SweepRow>> jobs;
    for (double r : cfg.r_list) jobs.push_back(std::async(std::launch::async, solve_row, r));
    std::vector<SweepRow> rows;
    for (auto& job : jobs) rows.push_back(job.get());

    SweepRow limit;
    limit.r = 0.0;
    limit.tau0 = kInf;
    const double c0 = base.coeffs.c0;
    if (c0 > 2.0) {
        const LimitHopfData data = limit_hopf_data(base.coeffs, base.grid);
        limit.status = "LIMIT";
        limit.theta = data.theta0;
        limit.h = data.h0;
        limit.beta = 1.0;
        limit.tau_hat0 = data.theta0 / data.h0;
        limit.S0 = limit_S0(base.coeffs, base.grid);
        limit.dmu_over_r2 = limit_transversality(base.coeffs, base.grid);
        limit.c1_real = limit_c1_real(c0, 0);
    } else {
        limit.status = "NOHOPF";
        limit.theta = limit.h = limit.beta = limit.tau_hat0 = limit.dmu_over_r2 = limit.c1_real = kNaN;
        limit.S0 = Complex(kNaN, kNaN);
    }
    rows.push_back(limit);
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "r,d,tau_0,tau_hat_0,theta,h,beta,Re_S0,Im_S0,Re_dmu_over_r2,Re_C1,status\n";
    for (const SweepRow& row : rows) {
        const double d = row.r > 0.0 ? 1.0 / row.r : kInf;
        out += (CsvRow() << row.r << d << row.tau0 << row.tau_hat0 << row.theta << row.h << row.beta << row.S0.real()
                         << row.S0.imag() << row.dmu_over_r2 << row.c1_real << row.status)
                   .str();
    }
    return out;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const PreconditionError*>(&e)) return 1;
    if (dynamic_cast<const BlowUpError*>(&e)) return 3;
    return 2;
}

TaskOutcome run_task(const RunConfig& cfg) {
    TaskOutcome out;
    std::optional<OutputDir> dir;
    try {
        dir.emplace(cfg.out_dir);
        switch (cfg.task) {
            case Task::Steady: run_steady(cfg, *dir, out); break;
            case Task::Hopf: run_hopf(cfg, *dir, out); break;
            case Task::NormalForm: run_normalform(cfg, *dir, out); break;
            case Task::Simulate: run_simulate(cfg, *dir, out); break;
            case Task::AverageDde: run_average_dde(cfg, *dir, out); break;
            case Task::Sweep: run_sweep_task(cfg, *dir, out); break;
            case Task::Reproduce: run_reproduce(cfg, *dir, out); break;
        }
    } catch (const std::exception& e) {
        out.exit_code = exit_code_for(e);
        out.report.push_back(std::string("error: ") + e.what());
    }
    if (dir) {
        std::string summary;
        for (const auto& line : out.report) summary += line + "\n";
        dir->write("summary.txt", summary);
        ConfigEntries echo = cfg.echo;
        if (cfg.task == Task::Reproduce) echo["reproduce.figure"] = cfg.figure;
        dir->write_manifest(echo);
        out.artifacts = dir->artifacts();
        out.artifacts.push_back("manifest.txt");
    }
    return out;
}

}  // namespace blowfly
