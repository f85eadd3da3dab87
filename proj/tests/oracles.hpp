// Independent reference implementations used only by the tests: they must
// not share code paths with the library operations they check.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using Complex = std::complex<double>;
using Cmat = Eigen::MatrixXcd;
using Cvec = Eigen::VectorXcd;
using Rvec = Eigen::VectorXd;
using Rmat = Eigen::MatrixXd;

/// Largest singular value by power iteration on M^H M.
inline double power_iteration_norm(const Cmat& m, int iters = 2000) {
    const Cmat g = m.adjoint() * m;
    Cvec v = Cvec::Ones(g.rows());
    v /= v.norm();
    double lambda = 0.0;
    for (int i = 0; i < iters; ++i) {
        Cvec w = g * v;
        const double nrm = w.norm();
        if (nrm == 0.0) return 0.0;
        v = w / nrm;
        lambda = nrm;
    }
    return std::sqrt(lambda);
}

/// Roots of a monic polynomial (coefficients high to low, leading 1 implied)
/// by Durand-Kerner iteration.
inline std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs,
                                             int iters = 2000) {
    const int n = static_cast<int>(coeffs.size());
    auto eval = [&coeffs, n](Complex x) {
        Complex acc(1.0, 0.0);
        for (int i = 0; i < n; ++i) acc = acc * x + coeffs[static_cast<std::size_t>(i)];
        return acc;
    };
    std::vector<Complex> roots(static_cast<std::size_t>(n));
    Complex seed(0.4, 0.9);
    Complex p(1.0, 0.0);
    for (int i = 0; i < n; ++i) {
        roots[static_cast<std::size_t>(i)] = p;
        p *= seed;
    }
    for (int it = 0; it < iters; ++it) {
        for (int i = 0; i < n; ++i) {
            Complex denom(1.0, 0.0);
            for (int j = 0; j < n; ++j)
                if (j != i)
                    denom *= roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
            roots[static_cast<std::size_t>(i)] -= eval(roots[static_cast<std::size_t>(i)]) / denom;
        }
    }
    return roots;
}

/// Characteristic polynomial coefficients of a small real matrix via
/// Faddeev-LeVerrier (monic, highest degree first, leading 1 omitted).
inline std::vector<Complex> char_poly(const Rmat& a) {
    const int n = static_cast<int>(a.rows());
    Rmat m = Rmat::Zero(n, n);
    std::vector<Complex> c(static_cast<std::size_t>(n));
    double ck = 1.0;
    for (int k = 1; k <= n; ++k) {
        m = a * m + ck * Rmat::Identity(n, n);
        ck = -(a * m).trace() / k;
        c[static_cast<std::size_t>(k - 1)] = Complex(ck, 0.0);
    }
    return c;
}

/// Classic fixed-step RK4 integrator.
inline std::vector<Rvec> rk4_path(const std::function<Rvec(double, const Rvec&)>& f,
                                  const Rvec& y0, const std::vector<double>& grid,
                                  int substeps = 10) {
    std::vector<Rvec> out{y0};
    Rvec y = y0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double h = (grid[i] - grid[i - 1]) / substeps;
        double t = grid[i - 1];
        for (int s = 0; s < substeps; ++s) {
            const Rvec k1 = f(t, y);
            const Rvec k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
            const Rvec k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
            const Rvec k4 = f(t + h, y + h * k3);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        out.push_back(y);
    }
    return out;
}

/// Grid minimizer of a scalar function over [lo, hi].
inline std::pair<double, double> grid_minimize(const std::function<double(double)>& f,
                                               double lo, double hi, double step) {
    double best_x = lo, best = f(lo);
    for (double x = lo + step; x <= hi + 1e-15; x += step) {
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    return {best_x, best};
}

/// Deterministic random matrices/vectors for property checks.
struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double uniform(double lo = -1.0, double hi = 1.0) {
        const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    Complex complex_unit() { return Complex(uniform(), uniform()); }
    Cmat complex_matrix(int n, int m_cols) {
        Cmat m(n, m_cols);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m_cols; ++j) m(i, j) = complex_unit();
        return m;
    }
    Rmat real_matrix(int n, int m_cols) {
        Rmat m(n, m_cols);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m_cols; ++j) m(i, j) = uniform();
        return m;
    }
    Rvec real_vector(int n) {
        Rvec v(n);
        for (int i = 0; i < n; ++i) v(i) = uniform();
        return v;
    }
};

} // namespace oracles
