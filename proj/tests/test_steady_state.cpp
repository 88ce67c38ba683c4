#include "blowfly/errors.hpp"
#include "blowfly/laplacian.hpp"
#include "blowfly/simulator.hpp"
#include "blowfly/steady_state.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace blowfly;

TEST_CASE("steady state: constant coefficients give ln(p/delta) exactly") {
    for (int n : {11, 101}) {
        const Grid1D g(2.0, n);
        const CoefficientField c = testing::constant_coeffs(g, 3.0);
        for (double r : {1e-3, 0.5, 20.0}) {
            const SteadyState ss = solve_steady_state(testing::rescaled(g, c, r));
            CHECK((ss.u.array() - 3.0).abs().maxCoeff() < 1e-10);
            CHECK(steady_residual(ss.u, testing::rescaled(g, c, r)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("steady state: residual and positivity for the figure coefficients") {
    const Grid1D g(3.0, 301);
    for (const CoefficientField& c : {testing::fig1_coeffs(g), testing::fig2_coeffs(g)}) {
        for (double r : {1e-3, 0.1, 1.0, 10.0}) {
            const ModelParams m = testing::rescaled(g, c, r);
            const SteadyState ss = solve_steady_state(m);
            CAPTURE(r);
            CHECK(ss.residual_norm <= 1e-10);
            CHECK(steady_residual(ss.u, m).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK(ss.u.minCoeff() > 0.0);
            CHECK(ss.r == r);
        }
    }
}

TEST_CASE("steady state: r = 10 agrees with long-time integration at tau = 0") {
    const Grid1D g(3.0, 61);
    const CoefficientField c = testing::fig1_coeffs(g);
    const ModelParams m = ModelParams::from_diffusion(0.1, 0.0, 1.0, g, c);
    const SteadyState ss = solve_steady_state(m);
    SimulationOptions opts;
    opts.t_end = 60.0;
    opts.dt = 1e-2;
    opts.snapshot_stride = 6000;
    const SimulationTrace tr = simulate_pde(m, 1.0, opts);
    CHECK((tr.snapshots.back().u - ss.u).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("steady residual: duplicate hand-coded evaluation") {
    const Grid1D g(3.0, 41);
    const CoefficientField c = testing::fig2_coeffs(g);
    const ModelParams m = testing::rescaled(g, c, 1.0);
    const RealField u = RealField::Constant(41, c.c0 + 1.0);
    const RealField res = steady_residual(u, m);
    const double h2 = g.spacing() * g.spacing();
    for (int i = 0; i < 41; ++i) {
        const double left = i == 0 ? u[1] : u[i - 1];
        const double right = i == 40 ? u[39] : u[i + 1];
        const double lap = (left - 2.0 * u[i] + right) / h2;
        const double expect = lap + c.p[i] * u[i] * std::exp(-u[i]) - c.delta[i] * u[i];
        CHECK(res[i] == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(res.cwiseAbs().maxCoeff() > 0.1);
    CHECK_THROWS_AS(steady_residual(RealField::Ones(40), m), PreconditionError);
}

TEST_CASE("steady state: uniqueness probe from three starts") {
    const Grid1D g(3.0, 101);
    const CoefficientField c = testing::fig2_coeffs(g);
    const ModelParams m = testing::rescaled(g, c, 1.0);
    const SteadyState ref = solve_steady_state(m);
    for (double factor : {0.5, 2.0}) {
        NewtonOptions opts;
        opts.initial_guess = RealField::Constant(101, factor * c.c0);
        CHECK((solve_steady_state(m, opts).u - ref.u).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("steady state: small-r asymptotics approach c0 at first order") {
    const Grid1D g(3.0, 301);
    const CoefficientField c = testing::fig2_coeffs(g);
    std::vector<double> dev;
    for (double r : {1e-1, 1e-2, 1e-3}) {
        dev.push_back((solve_steady_state(testing::rescaled(g, c, r)).u.array() - c.c0).abs().maxCoeff());
    }
    CHECK(dev[2] < 0.05);
    CHECK(dev[0] > dev[1]);
    CHECK(dev[1] > dev[2]);
    CHECK(dev[0] / dev[1] == doctest::Approx(10.0).epsilon(0.3));
    CHECK(dev[1] / dev[2] == doctest::Approx(10.0).epsilon(0.3));

    // fine-grid oracle at r = 1e-3
    const Grid1D fine(3.0, 1201);
    const SteadyState f = solve_steady_state(testing::rescaled(fine, testing::fig2_coeffs(fine), 1e-3));
    CHECK((f.u.array() - c.c0).abs().maxCoeff() < 0.05);
}

TEST_CASE("steady state: second-order grid convergence") {
    auto solve = [](int n) {
        const Grid1D g(3.0, n);
        return solve_steady_state(testing::rescaled(g, testing::fig2_coeffs(g), 10.0)).u;
    };
    const RealField a = solve(151), b = solve(301), c = solve(601);
    // compare on the coarse nodes
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < 151; ++i) {
        e1 = std::max(e1, std::abs(a[i] - b[2 * i]));
        e2 = std::max(e2, std::abs(b[2 * i] - c[4 * i]));
    }
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("steady state: preconditions and failure") {
    const Grid1D g(3.0, 21);
    const CoefficientField low = testing::constant_coeffs(g, -0.5);
    CHECK_THROWS_AS(solve_steady_state(testing::rescaled(g, low, 1.0)), PreconditionError);
    const CoefficientField c = testing::fig2_coeffs(g);
    CHECK_THROWS_AS(solve_steady_state(testing::rescaled(g, c, 0.0)), PreconditionError);

    NewtonOptions opts;
    opts.max_iter = 1;
    opts.initial_guess = RealField::Constant(21, 10.0 * c.c0);
    try {
        solve_steady_state(testing::rescaled(g, c, 5.0), opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_residual() > 1e-10);
        CHECK(std::string(e.what()).find("steady-state") != std::string::npos);
    }
}
