#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "auxbound/ode.hpp"

using namespace auxbound;

TEST_CASE("integrate_ode: exponential decay to tolerance") {
    OdeRhs rhs = [](double, const Rvec& y, Rvec& d) { d = -y; };
    Rvec y0(1);
    y0(0) = 1.0;
    const auto sol = integrate_ode(rhs, y0, uniform_grid(0.0, 10.0, 101));
    CHECK(sol.status == SolveStatus::Ok);
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        CHECK(sol.states[i](0) == doctest::Approx(std::exp(-sol.grid[i])).epsilon(1e-8));
}

TEST_CASE("integrate_ode: blow-up cap reports the escape time") {
    OdeRhs rhs = [](double, const Rvec& y, Rvec& d) { d = y; };
    Rvec y0(1);
    y0(0) = 1.0;
    const auto sol = integrate_ode(rhs, y0, uniform_grid(0.0, 20.0, 201));
    CHECK(sol.status == SolveStatus::Diverged);
    CHECK(sol.blowup_time == doctest::Approx(std::log(1e6)).epsilon(0.05));
}

TEST_CASE("integrate_ode: harmonic oscillator keeps energy at tight tolerance") {
    OdeRhs rhs = [](double, const Rvec& y, Rvec& d) {
        d(0) = y(1);
        d(1) = -y(0);
    };
    Rvec y0(2);
    y0 << 1.0, 0.0;
    OdeOptions opts;
    opts.rel_tol = 1e-10;
    const auto sol = integrate_ode(rhs, y0, uniform_grid(0.0, 50.0, 501), opts);
    for (const Rvec& y : sol.states)
        CHECK(y.squaredNorm() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("integrate_ode accepts duplicated output points as jump markers") {
    OdeRhs rhs = [](double, const Rvec& y, Rvec& d) { d = -y; };
    Rvec y0(1);
    y0(0) = 1.0;
    const std::vector<double> times{0.0, 0.5, 0.5, 1.0};
    const auto sol = integrate_ode(rhs, y0, times);
    CHECK(sol.grid.size() == 4);
    CHECK(sol.states[1](0) == doctest::Approx(sol.states[2](0)).epsilon(1e-14));
}

TEST_CASE("nonnegative floor keeps the state at zero") {
    OdeRhs rhs = [](double, const Rvec& y, Rvec& d) { d(0) = -1.0 - y(0); };
    Rvec y0(1);
    y0(0) = 0.5;
    OdeOptions opts;
    opts.nonnegative = true;
    const auto sol = integrate_ode(rhs, y0, uniform_grid(0.0, 5.0, 51), opts);
    for (const Rvec& y : sol.states) CHECK(y(0) >= 0.0);
    CHECK(sol.states.back()(0) == doctest::Approx(0.0).epsilon(1e-9));
}
