// Acceptance checks 1-9. With no arguments every criterion runs; otherwise only
// the listed numbers. One PASS/FAIL line per criterion, exit status 1 if any fails.

#include "blowfly/errors.hpp"
#include "blowfly/hopf.hpp"
#include "blowfly/normal_form.hpp"
#include "blowfly/simulator.hpp"
#include "blowfly/steady_state.hpp"
#include "blowfly/workbench.hpp"
#include "scalar_oracle.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace blowfly;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        pass = pass && ok;
    }
};

std::string fmt(const char* f, double a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

const Grid1D& grid301() {
    static const Grid1D g(3.0, 301);
    return g;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool report_has(const TaskOutcome& t, const std::string& needle) {
    for (const auto& l : t.report) {
        if (l.find(needle) != std::string::npos) return true;
    }
    return false;
}

// 1. c0 of the figure parameter sets
Outcome c0_reproduction() {
    Outcome o;
    const double c1 = testing::fig1_coeffs(grid301()).c0;
    const double c2 = testing::fig2_coeffs(grid301()).c0;
    o.check(std::abs(c1 - 1.2880) <= 1e-3, fmt("fig1 c0 = %.6f, want 1.2880 +- 1e-3", c1));
    o.check(std::abs(c2 - 2.3443) <= 1e-3, fmt("fig2 c0 = %.6f, want 2.3443 +- 1e-3", c2));
    return o;
}

// 2. regimes of the two figures through the reproduce task
Outcome figure_regimes() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "blowfly_acceptance_reproduce";
    for (const char* fig : {"fig1", "fig2"}) {
        RunConfig cfg = make_run_config(Task::Reproduce, {});
        cfg.figure = fig;
        cfg.out_dir = root / fig;
        const TaskOutcome res = run_task(cfg);
        o.check(res.exit_code == 0, std::string(fig) + " exit code 0");
        o.check(report_has(res, "tau_hat = 0: converged"), std::string(fig) + " tau_hat = 0 converges");
        const std::string want = std::string(fig) == "fig1" ? "tau_hat = 2: converged" : "tau_hat = 2: sustained oscillation";
        o.check(report_has(res, want), std::string(fig) + " " + want);
    }
    // the verdict thresholds themselves, recomputed from the written trace
    std::ifstream in(root / "fig2" / "trace_tau_hat_2.csv");
    std::string line;
    std::getline(in, line);
    std::vector<double> series;
    while (std::getline(in, line)) series.push_back(std::stod(line.substr(line.find(',') + 1)));
    const std::size_t start = series.size() - series.size() / 4;
    double lo = series[start], hi = series[start];
    for (std::size_t i = start; i < series.size(); ++i) {
        lo = std::min(lo, series[i]);
        hi = std::max(hi, series[i]);
    }
    o.check(0.5 * (hi - lo) > 1e-2, fmt("fig2 tau_hat = 2 tail amplitude %.4g > 1e-2", 0.5 * (hi - lo)));
    return o;
}

// 3. closed-form limit data
Outcome limit_suite() {
    Outcome o;
    const Grid1D g(3.0, 301);
    const CoefficientField c = testing::constant_coeffs(g, 3.0, 1.0);
    const LimitHopfData d = limit_hopf_data(c, g);
    const double et = std::abs(d.theta0 - 2.0 * M_PI / 3.0);
    const double eh = std::abs(d.h0 - std::sqrt(3.0));
    o.check(et <= 1e-12 && eh <= 1e-12, fmt("c0 = 3: |theta0 - 2pi/3| = %.2g, |h0 - sqrt 3| = %.2g (<= 1e-12)", et, eh));

    double worst = 0.0;
    for (const CoefficientField& cf : {c, testing::fig2_coeffs(g)}) {
        const LimitHopfData ld = limit_hopf_data(cf, g);
        worst = std::max(worst, std::abs(spatial_average(limit_hopf_rhs(cf, ld.theta0, ld.h0), g)));
    }
    o.check(worst <= 1e-10, fmt("solvability: |mean rhs| = %.2g (<= 1e-10)", worst));

    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> dist(2.0, 6.0);
    const Grid1D small(3.0, 11);
    int inside = 0;
    for (int i = 0; i < 50; ++i) {
        double c0 = dist(gen);
        while (c0 == 2.0) c0 = dist(gen);
        const double th = limit_hopf_data(testing::constant_coeffs(small, c0), small).theta0;
        if (th > M_PI / 2 && th < M_PI) ++inside;
    }
    o.check(inside == 50, fmt("theta0 in (pi/2, pi) for %.0f of 50 random c0", inside));
    return o;
}

// 4. constant coefficients against the brute-force scalar DDE
Outcome scalar_oracle() {
    Outcome o;
    const double r = 1e-4;
    const Grid1D g(3.0, 301);
    const HopfSolution s = continue_hopf(testing::rescaled(g, testing::constant_coeffs(g, 3.0, 1.0), r), r, 20);
    const double tau_check = oracle::hopf_delay(3.0, 1.0);
    const double closed = 2.0 * M_PI / (3.0 * std::sqrt(3.0));
    const double tau_hat0 = hopf_thresholds(s, 0).taus_hat[0];
    o.check(within_rel(tau_check, closed, 1e-10), fmt("brute-force root %.12f vs 2pi/(3 sqrt 3) = %.12f", tau_check, closed));
    o.check(within_rel(tau_hat0, tau_check, 1e-6),
            fmt("tau_hat0 = %.12f, rel. error %.2g (<= 1e-6)", tau_hat0, std::abs(tau_hat0 / tau_check - 1.0)));
    const double speed = oracle::crossing_speed(3.0, 1.0, tau_check, 1e-4);
    const double module = transversality(s, 0).real() / (r * r);
    o.check(within_rel(module, speed, 1e-2), fmt("dRe mu/dtau / r^2 = %.8f vs numerical %.8f (1%%)", module, speed));
    return o;
}

// 5. first-order convergence of the branch data
Outcome continuation_rates() {
    Outcome o;
    const Grid1D& g = grid301();
    const CoefficientField c = testing::fig2_coeffs(g);
    const LimitHopfData d = limit_hopf_data(c, g);
    std::vector<double> et, eh, eb;
    for (double r : {1e-1, 1e-2, 1e-3}) {
        const HopfSolution s = continue_hopf(testing::rescaled(g, c, r), r, 20);
        et.push_back(std::abs(s.theta - d.theta0));
        eh.push_back(std::abs(s.h - d.h0));
        eb.push_back(std::abs(s.beta - 1.0));
    }
    auto rates = [&](const char* name, const std::vector<double>& e) {
        for (int k = 0; k < 2; ++k) {
            const double ratio = e[k] / e[k + 1];
            o.check(ratio >= 8.0 && ratio <= 12.0,
                    std::string(name) + fmt(" error %.3g -> %.3g, ratio %.2f (want 8-12)", e[k], e[k + 1], ratio));
        }
    };
    rates("theta", et);
    rates("h", eh);
    rates("beta", eb);
    return o;
}

// 6. Re C1 from the pipeline against the closed-form limit
Outcome normal_form_limit() {
    Outcome o;
    const double r = 1e-3;
    const Grid1D& g = grid301();
    struct Case {
        const char* name;
        CoefficientField c;
    };
    const std::vector<Case> cases = {{"constant c0 = 2.2", testing::constant_coeffs(g, 2.2, 1.0)},
                                     {"fig2 c0 = 2.3443", testing::fig2_coeffs(g)},
                                     {"constant c0 = 3.0", testing::constant_coeffs(g, 3.0, 1.0)}};
    for (const Case& k : cases) {
        const HopfSolution s = continue_hopf(testing::rescaled(g, k.c, r), r, 20);
        const NormalFormReport rep = normal_form_report(s, 0);
        const double c0 = k.c.c0;
        const double lim = limit_c1_real(c0, 0);
        o.check(within_rel(rep.C1.real(), lim, 0.05) && rep.C1.real() < 0.0 && lim < 0.0,
                std::string(k.name) + fmt(": Re C1 = %.6f, limit %.6f, rel. diff %.2g (5%%, negative)", rep.C1.real(),
                                          lim, std::abs(rep.C1.real() / lim - 1.0)));
        const double l = spatial_average(rep.F, g).real() / c0;
        o.check(within_rel(l, c0 - 2.0, 0.05), std::string(k.name) + fmt(": mean(F)/c0 = %.6f, want %.6f (5%%)", l, c0 - 2.0));
    }
    return o;
}

// 7. transversality against its small-r limit
Outcome transversality_limit() {
    Outcome o;
    const double r = 1e-3;
    const Grid1D& g = grid301();
    const CoefficientField c = testing::fig2_coeffs(g);
    const double c0 = c.c0;
    const double L = g.length();
    const double theta0 = std::acos(1.0 / (1.0 - c0));
    const double h0 = c.delta_bar * std::sqrt(c0 * c0 - 2.0 * c0);
    const Complex S0 = (1.0 + theta0 / h0 * (1.0 - c0) * std::exp(-c0) * std::exp(Complex(0.0, -theta0)) * c.p_bar) * c0 * c0 * L;
    const double limit =
        (c0 * c0 - 2.0 * c0) * std::exp(-2.0 * c0) * c.p_bar * c.p_bar * std::pow(c0, 4) * L * L / std::norm(S0);
    const HopfSolution s = continue_hopf(testing::rescaled(g, c, r), r, 20);
    const double value = transversality(s, 0).real() / (r * r);
    o.check(within_rel(value, limit, 0.1), fmt("(1/r^2) Re dmu/dtau = %.6f, limit %.6f (10%%)", value, limit));
    return o;
}

// 8. linear prediction against the PDE near the first threshold
Outcome spectrum_simulation() {
    Outcome o;
    const double r = 1e-2;
    const Grid1D& g = grid301();
    const CoefficientField c = testing::fig2_coeffs(g);
    const HopfSolution s = continue_hopf(testing::rescaled(g, c, r), r, 20);
    const double tau0 = s.tau(0);
    const double period = 2.0 * M_PI * r / s.nu;
    const RealField u_r = solve_steady_state(testing::rescaled(g, c, r)).u;

    SimulationOptions opts;
    opts.t_end = 1000.0;
    opts.dt = 5e-3;
    auto run = [&](double factor) {
        return simulate_pde(testing::rescaled(g, c, r, factor * tau0), RealField(0.9 * u_r), opts);
    };

    const std::vector<double> below = windowed_amplitudes(run(0.95), 0.25, 4);
    bool decreasing = true;
    for (std::size_t i = 1; i < below.size(); ++i) decreasing = decreasing && below[i] < below[i - 1];
    o.check(decreasing && below.back() < 1e-3,
            fmt("0.95 tau_hat0: window amplitudes %.3g -> %.3g, strictly decreasing, last < 1e-3", below.front(), below.back()));

    const SimulationTrace near = run(1.05);
    const PeriodEstimate est = estimate_period(near, 0.25);
    const std::vector<double> w = windowed_amplitudes(near, 0.25, 4);
    bool holding = true;
    for (std::size_t i = 1; i < w.size(); ++i) holding = holding && w[i] >= (1.0 - 1e-3) * w[i - 1];
    o.check(est.oscillating && holding, fmt("1.05 tau_hat0: oscillating, window amplitudes %.4g -> %.4g", w.front(), w.back()));
    if (est.period) {
        o.check(within_rel(*est.period, period, 0.1), fmt("period %.5f vs 2 pi r / nu_r = %.5f (10%%)", *est.period, period));
    } else {
        o.check(false, "no period detected at 1.05 tau_hat0");
    }

    const PeriodEstimate far = estimate_period(run(1.10), 0.25);
    if (est.amplitude && far.amplitude) {
        const double ratio = *far.amplitude / *est.amplitude;
        o.check(within_rel(ratio, std::sqrt(2.0), 0.15),
                fmt("amplitude(1.10) / amplitude(1.05) = %.4g / %.4g = %.4f (sqrt 2 +- 15%%)", *far.amplitude,
                    *est.amplitude, ratio));
    } else {
        o.check(false, "amplitude missing");
    }
    return o;
}

// 9. numerical hygiene
Outcome hygiene() {
    Outcome o;
    auto solve = [](int n) {
        const Grid1D g(3.0, n);
        return solve_steady_state(testing::rescaled(g, testing::fig2_coeffs(g), 10.0)).u;
    };
    const RealField a = solve(151), b = solve(301), c = solve(601);
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < 151; ++i) {
        e1 = std::max(e1, std::abs(a[i] - b[2 * i]));
        e2 = std::max(e2, std::abs(b[2 * i] - c[4 * i]));
    }
    o.check(within_rel(e1 / e2, 4.0, 0.25), fmt("steady-state grid ratio %.4f (4 +- 25%%)", e1 / e2));

    double worst = 0.0;
    for (double u : {0.3, 1.7, 2.3443, 3.5}) {
        for (int order = 0; order < 3; ++order) {
            auto err = [&](double step) {
                const double fd = (eval_nonlinearity(u + step, order) - eval_nonlinearity(u - step, order)) / (2.0 * step);
                return std::abs(fd - eval_nonlinearity(u, order + 1));
            };
            worst = std::max(worst, std::abs(err(1e-2) / err(5e-3) - 4.0) / 4.0);
        }
    }
    o.check(worst <= 0.05, fmt("f derivatives: centred-difference error ratio 4 within %.3g (<= 5%%)", worst));

    const fs::path root = fs::temp_directory_path() / "blowfly_acceptance_determinism";
    fs::remove_all(root);
    bool same = true;
    std::string checked;
    const std::vector<std::pair<Task, std::vector<std::string>>> runs = {
        {Task::Simulate, {"model.d=0.1", "model.tau_hat=2", "simulate.t_end=20", "simulate.field_stride=400"}},
        {Task::Sweep, {"sweep.r_list=0.1, 0.01, 0.001"}},
        {Task::NormalForm, {"model.r=0.01", "normalform.n_max=1"}},
    };
    for (const auto& [task, sets] : runs) {
        for (const char* tag : {"a", "b"}) {
            ConfigEntries e = parse_config_text("[model]\np = 30 + 1*sin(1*x)\ndelta = 2 + 1*cos(0.2*x)\n");
            for (const auto& s : sets) apply_override(e, s);
            RunConfig cfg = make_run_config(task, e);
            cfg.out_dir = root / to_string(task) / tag;
            same = same && run_task(cfg).exit_code == 0;
        }
        for (const auto& entry : fs::directory_iterator(root / to_string(task) / "a")) {
            if (entry.path().extension() != ".csv") continue;
            same = same && slurp(entry.path()) == slurp(root / to_string(task) / "b" / entry.path().filename());
            checked += " " + entry.path().filename().string();
        }
    }
    o.check(same, "byte-identical CSV on rerun:" + checked);

    double dev = 0.0;
    for (double r : {1e-3, 1.0, 10.0}) {
        const Grid1D g(3.0, 301);
        const CoefficientField cc = make_coefficient_field(RealField::Constant(301, 7.0), RealField::Constant(301, 0.5), g);
        dev = std::max(dev, (solve_steady_state(testing::rescaled(g, cc, r)).u.array() - std::log(14.0)).abs().maxCoeff());
    }
    o.check(dev <= 1e-10, fmt("constant coefficients: max |u - ln(p/delta)| = %.2g (<= 1e-10)", dev));
    return o;
}

struct Criterion {
    const char* title;
    double budget_s;  // 0: no runtime limit
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {"c0 reproduction", 1.0, c0_reproduction},
        {"figure regimes", 120.0, figure_regimes},
        {"closed-form limit suite", 0.0, limit_suite},
        {"scalar DDE oracle", 10.0, scalar_oracle},
        {"continuation convergence rates", 30.0, continuation_rates},
        {"normal-form limit agreement", 60.0, normal_form_limit},
        {"transversality limit", 10.0, transversality_limit},
        {"spectrum-simulation consistency", 300.0, spectrum_simulation},
        {"numerical hygiene", 0.0, hygiene},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty()) {
        for (int i = 1; i <= static_cast<int>(all.size()); ++i) selected.push_back(i);
    }

    bool all_pass = true;
    for (int id : selected) {
        if (id < 1 || id > static_cast<int>(all.size())) {
            std::fprintf(stderr, "no criterion %d\n", id);
            return 2;
        }
        const Criterion& c = all[id - 1];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.check(false, std::string("threw: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0) {
            out.check(secs < c.budget_s, fmt("runtime %.2f s (< %.0f s)", secs, c.budget_s));
        } else {
            out.notes.push_back(fmt("runtime %.2f s", secs));
        }
        std::printf("criterion %d %s: %s\n", id, out.pass ? "PASS" : "FAIL", c.title);
        for (const auto& n : out.notes) std::printf("    %s\n", n.c_str());
        all_pass = all_pass && out.pass;
    }
    std::fflush(stdout);
    return all_pass ? 0 : 1;
}
