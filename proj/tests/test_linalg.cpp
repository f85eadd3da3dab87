#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "auxbound/linalg.hpp"
#include "auxbound/systems.hpp"
#include "oracles.hpp"

using namespace auxbound;

TEST_CASE("spectral_norm: identity and diagonal") {
    CHECK(spectral_norm(Rmat(Rmat::Identity(4, 4))) == doctest::Approx(1.0).epsilon(1e-12));
    Rmat d = Rmat::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -4.0;
    CHECK(spectral_norm(d) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("spectral_norm matches the power-iteration oracle on random matrices") {
    oracles::Rng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const Cmat m = rng.complex_matrix(4, 4);
        const double ours = spectral_norm(m);
        const double ref = oracles::power_iteration_norm(m);
        CHECK(ours == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("spectral_norm rejects non-finite input") {
    Cmat m = Cmat::Zero(2, 2);
    m(0, 1) = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(spectral_norm(m), InvalidInputError);
}

TEST_CASE("spectral_norm submultiplicativity on random pairs") {
    oracles::Rng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        const Cmat a = rng.complex_matrix(3, 3);
        const Cmat b = rng.complex_matrix(3, 3);
        CHECK(spectral_norm(Cmat(a * b)) <= spectral_norm(a) * spectral_norm(b) + 1e-12);
    }
}

TEST_CASE("eig_sorted: diagonal ordering and identity eigenvectors") {
    Cmat a = Cmat::Zero(2, 2);
    a(0, 0) = -2.0;
    a(1, 1) = -1.0;
    const auto dec = eig_sorted(a);
    CHECK(dec.lambdas(0).real() == doctest::Approx(-1.0));
    CHECK(dec.lambdas(1).real() == doctest::Approx(-2.0));
    // Descending real part; unit columns aligned with the axes.
    CHECK(std::abs(dec.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(dec.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eig_sorted: rotation matrix ties broken by descending imaginary part") {
    Cmat a = Cmat::Zero(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = -1.0;
    const auto dec = eig_sorted(a);
    CHECK(dec.lambdas(0).imag() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dec.lambdas(1).imag() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(dec.lambdas(0).real()) < 1e-12);
}

TEST_CASE("eig_sorted matches a characteristic-polynomial root oracle on the benchmark block") {
    BenchmarkParams p; // published defaults, coupling at its config default
    const SystemSpec sys = vanderpol_like(p);
    const Rmat a = sys.B(0.0);
    const auto dec = eig_sorted(a.cast<Complex>());

    auto roots = oracles::polynomial_roots(oracles::char_poly(a));
    std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(dec.lambdas(i) - roots[static_cast<std::size_t>(i)]) < 1e-8);
}

TEST_CASE("eig_sorted residual invariant and determinism") {
    oracles::Rng rng(21);
    for (int rep = 0; rep < 8; ++rep) {
        const Cmat a = rng.complex_matrix(5, 5);
        const auto dec = eig_sorted(a);
        for (int i = 0; i < 5; ++i) {
            const Cvec r = a * dec.vectors.col(i) - dec.lambdas(i) * dec.vectors.col(i);
            CHECK(r.norm() <= 1e-8 * (1.0 + spectral_norm(a)));
            CHECK(dec.vectors.col(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
        for (int i = 0; i + 1 < 5; ++i)
            CHECK(dec.lambdas(i).real() >= dec.lambdas(i + 1).real() - 1e-14);
        const auto again = eig_sorted(a);
        CHECK((again.lambdas - dec.lambdas).norm() == 0.0);
        CHECK((again.vectors - dec.vectors).norm() == 0.0);
    }
}

TEST_CASE("track_eigens: constant path stays constant") {
    Cmat a = Cmat::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const auto grid = uniform_grid(0.0, 1.0, 11);
    const MatrixPath path = MatrixPath::sampled(grid, [&a](double) { return a; });
    const EigenPath ep = track_eigens(path);
    for (std::size_t m = 0; m < ep.size(); ++m) {
        CHECK(std::abs(ep.lambdas[m](0) - Complex(-1.0, 0.0)) < 1e-12);
        CHECK((ep.vectors[m] - ep.vectors[0]).norm() < 1e-12);
    }
}

TEST_CASE("track_eigens: rotating similarity keeps the spectrum and rotates vectors continuously") {
    auto rot = [](double theta) {
        Rmat r(2, 2);
        r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        return r;
    };
    Rmat d(2, 2);
    d << -1.0, 0.0, 0.0, -2.0;
    const double omega = 0.2;
    const auto grid = uniform_grid(0.0, 5.0, 201);
    const MatrixPath path = MatrixPath::sampled_real(
        grid, [&](double t) { return Rmat(rot(omega * t) * d * rot(omega * t).transpose()); });
    const EigenPath ep = track_eigens(path);
    for (std::size_t m = 0; m < ep.size(); ++m) {
        CHECK(std::abs(ep.lambdas[m](0) - Complex(-1.0, 0.0)) < 1e-8);
        CHECK(std::abs(ep.lambdas[m](1) - Complex(-2.0, 0.0)) < 1e-8);
        if (m > 0) {
            // No sign flips: successive columns stay close.
            CHECK((ep.vectors[m] - ep.vectors[m - 1]).norm() < 0.05);
        }
    }
}

TEST_CASE("track_eigens: defective coalescence is flagged in the diagnostics") {
    // a(t) = [[0, 1], [t - 1, 0]] is defective at t = 1.
    const auto grid = uniform_grid(0.0, 2.0, 501); // includes t = 1 exactly
    const MatrixPath path = MatrixPath::sampled_real(grid, [](double t) {
        Rmat a(2, 2);
        a << 0.0, 1.0, t - 1.0, 0.0;
        return a;
    });
    const EigenPath ep = track_eigens(path);
    double min_gap = 1e300;
    double argmin = 0.0;
    for (std::size_t m = 0; m < ep.size(); ++m)
        if (ep.min_gap[m] < min_gap) {
            min_gap = ep.min_gap[m];
            argmin = ep.grid[m];
        }
    CHECK(min_gap < 1e-6);
    CHECK(argmin == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("path_derivative: exact on affine, quadratic convergence on sin") {
    Rmat m0(2, 2), m1(2, 2);
    m0 << 1.0, 2.0, 3.0, 4.0;
    m1 << -1.0, 0.5, 0.25, 2.0;

    const auto grid = uniform_grid(0.0, 1.0, 11);
    const MatrixPath affine = MatrixPath::sampled_real(
        grid, [&](double t) { return Rmat(m0 + t * m1); });
    const MatrixPath d = path_derivative(affine);
    for (const Cmat& v : d.values)
        CHECK((v - m1.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12);

    auto max_err = [&m0](double h) {
        const auto g = uniform_grid_step(0.0, 2.0, h);
        const MatrixPath p =
            MatrixPath::sampled_real(g, [&](double t) { return Rmat(std::sin(t) * m0); });
        const MatrixPath dp = path_derivative(p);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            err = std::max(err,
                           (dp.values[i] - std::cos(g[i]) * m0.cast<Complex>())
                               .cwiseAbs()
                               .maxCoeff());
        return err;
    };
    const double e1 = max_err(0.02), e2 = max_err(0.01);
    CHECK(e1 < 4e-4);
    CHECK(e2 < 0.3 * e1); // roughly h^2
}

TEST_CASE("path_derivative rejects too-short paths") {
    const std::vector<double> grid{0.0, 1.0};
    const MatrixPath p = MatrixPath::sampled_real(grid, [](double) { return Rmat::Zero(2, 2); });
    CHECK_THROWS_AS(path_derivative(p), InvalidInputError);
}

TEST_CASE("constant path derivative is zero") {
    const auto grid = uniform_grid(0.0, 1.0, 5);
    const MatrixPath p =
        MatrixPath::sampled_real(grid, [](double) { return Rmat(Rmat::Identity(3, 3)); });
    for (const Cmat& v : path_derivative(p).values) CHECK(v.cwiseAbs().maxCoeff() < 1e-13);
}
