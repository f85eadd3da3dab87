#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "auxbound/systems.hpp"
#include "oracles.hpp"

using namespace auxbound;

TEST_CASE("vanderpol_like: published defaults accepted and echoed") {
    BenchmarkParams p;
    CHECK(p.alpha1 == 0.4);
    CHECK(p.alpha2 == 0.2);
    CHECK(p.omega1_sq == 1.0);
    CHECK(p.omega2_sq == 4.0);
    CHECK(p.q1 == 5.43);
    CHECK(p.q2 == 10.0);
    const SystemSpec sys = vanderpol_like(p);
    CHECK(sys.n == 4);
    CHECK(sys.F0 == 0.0);
}

TEST_CASE("vanderpol_like: zero modulation amplitudes give a constant linear block") {
    BenchmarkParams p;
    p.w11 = 3.0; // frequencies without amplitudes must not matter
    const SystemSpec sys = vanderpol_like(p);
    CHECK((sys.B(0.0) - sys.B(17.3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vanderpol_like: entries at t = 0.37 match the defining formulas") {
    BenchmarkParams p;
    p.a11 = 0.3, p.a12 = 0.1, p.a21 = 0.2, p.a22 = 0.05;
    p.w11 = 2.0, p.w12 = 5.0, p.w21 = 10.0, p.w22 = 0.5;
    p.kappa = 0.1;
    const SystemSpec sys = vanderpol_like(p);
    const double t = 0.37;
    const double chi11 = 0.3 * std::sin(2.0 * t) + 0.1 * std::sin(5.0 * t);
    const double chi12 = 0.2 * std::sin(10.0 * t) + 0.05 * std::sin(0.5 * t);
    const Rmat b = sys.B(t);
    CHECK(b(0, 1) == 1.0);
    CHECK(b(1, 0) == doctest::Approx(-(1.0 + 0.1) - chi11).epsilon(1e-15));
    CHECK(b(1, 1) == doctest::Approx(-0.4 - chi12).epsilon(1e-15));
    CHECK(b(1, 2) == 0.1);
    CHECK(b(3, 0) == 0.1);
    CHECK(b(3, 1) == doctest::Approx(-chi12).epsilon(1e-15));
    CHECK(b(3, 2) == doctest::Approx(-(4.0 + 0.1) - chi11).epsilon(1e-15));
    CHECK(b(3, 3) == -0.2);
}

TEST_CASE("duffing_like: displacement cubes and bound rows on components 1 and 3") {
    BenchmarkParams p;
    p.eps1 = 1.0, p.eps2 = 1.0;
    const SystemSpec sys = duffing_like(p);
    Rvec x(4);
    x << 1.0, 5.0, 2.0, 7.0;
    const Rvec f = sys.f(0.0, x);
    CHECK(f(0) == 0.0);
    CHECK(f(1) == doctest::Approx(-1.0));
    CHECK(f(2) == 0.0);
    CHECK(f(3) == doctest::Approx(-8.0));
    // Bound terms reference x1 and x3.
    CHECK(sys.bound_spec.terms[0].exponents == std::vector<int>{3, 0, 0, 0});
    CHECK(sys.bound_spec.terms[1].exponents == std::vector<int>{0, 0, 3, 0});
}

TEST_CASE("duffing_like: zero cubic gains give a linear system") {
    BenchmarkParams p;
    p.eps1 = p.eps2 = 0.0;
    const SystemSpec sys = duffing_like(p);
    oracles::Rng rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        const Rvec x = rng.real_vector(4);
        CHECK(sys.f(0.0, x).norm() == 0.0);
    }
}

TEST_CASE("forcing normalization keeps sup||eta|| at one for a single tone") {
    BenchmarkParams p;
    p.F1bar = 0.025;
    const SystemSpec sys = vanderpol_like(p);
    CHECK(sys.F0 == doctest::Approx(0.025));
    double sup = 0.0;
    for (double t = 0.0; t < 50.0; t += 0.001) sup = std::max(sup, sys.eta(t).norm());
    CHECK(sup <= 1.0 + 1e-9);
    CHECK(sup > 0.999);
}

TEST_CASE("monomial_bound: worked two-component example") {
    const PolyBoundSpec spec = monomial_bound({
        BoundTerm{0, [](double) { return 1.5; }, {2, 2}},
        BoundTerm{1, [](double) { return 0.5; }, {1, 2}},
    });
    CHECK(spec.terms[0].degree() == 4);
    CHECK(spec.terms[1].degree() == 3);
}

TEST_CASE("monomial_bound rejects degree-zero terms") {
    CHECK_THROWS_AS(monomial_bound({BoundTerm{0, [](double) { return 1.0; }, {0, 0}}}),
                    InvalidInputError);
}

TEST_CASE("benchmark nonlinearities vanish at zero and obey the bound at identity stage") {
    BenchmarkParams p;
    const SystemSpec sys = vanderpol_like(p);
    CHECK(sys.f(1.23, Rvec::Zero(4)).norm() == 0.0);
    oracles::Rng rng(7);
    for (int rep = 0; rep < 40; ++rep) {
        const Rvec x = rng.real_vector(4);
        const double t = rng.uniform(0.0, 20.0);
        double bound = 0.0;
        for (const BoundTerm& term : sys.bound_spec.terms)
            bound += term.coeff_abs(t) * std::pow(x.norm(), term.degree());
        CHECK(sys.f(t, x).norm() <= bound + 1e-10);
    }
}

TEST_CASE("presets cover every figure id") {
    for (const char* name : {"fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "fig1f", //
                             "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f", //
                             "fig4a", "fig4b", "fig4c", "fig4d", "fig4e", "fig4f"})
        CHECK(find_preset(name).has_value());
    CHECK(!find_preset("fig9z").has_value());

    const Preset fig3c = *find_preset("fig3c");
    CHECK(fig3c.params.F1bar == 0.025);
    CHECK(fig3c.params.a21 == 0.1);
    const Preset fig3d = *find_preset("fig3d");
    CHECK(fig3d.params.F1bar == 0.05);
    const Preset fig1f = *find_preset("fig1f");
    CHECK(fig1f.params.w11 == 20.0);
    CHECK(fig1f.params.w21 == 10.0);
    const Preset fig4a = *find_preset("fig4a");
    CHECK(fig4a.duffing);
    CHECK(fig4a.params.w11 == 0.94);
}
