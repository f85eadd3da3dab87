#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "auxbound/types.hpp"

namespace auxbound {

/// One monomial term of a componentwise norm bound: the vector field
/// component `component` is bounded by |coeff(t)| * prod_m |x_m|^{exponents[m]}.
struct BoundTerm {
    int component = 0;
    std::function<double(double)> coeff_abs;
    std::vector<int> exponents;

    int degree() const {
        int d = 0;
        for (int e : exponents) d += e;
        return d;
    }
};

/// Componentwise monomial description of ||f_*||; valid on the whole space.
struct PolyBoundSpec {
    std::vector<BoundTerm> terms;
    bool whole_space = true;

    void validate(int n) const;
};

/// A time-varying nonlinear system with marked linearization:
///   x' = B(t) x + f(t, x) + F0 * eta(t).
struct SystemSpec {
    int n = 0;
    std::function<Rmat(double)> B;
    std::function<Rvec(double, const Rvec&)> f;
    PolyBoundSpec bound_spec;
    double F0 = 0.0;
    std::function<Rvec(double)> eta;
    double t0 = 0.0;

    /// Light sampled checks of the declared invariants: sup||eta|| <= 1 + tol,
    /// f(t, 0) = 0, B finite.
    void validate(double t_probe_end = 10.0) const;
};

/// Parameter set for the coupled two-oscillator benchmarks.
struct BenchmarkParams {
    double alpha1 = 0.4, alpha2 = 0.2;   // damping
    double omega1_sq = 1.0, omega2_sq = 4.0;
    double kappa = 0.1;                  // coupling (not published; config default)
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
    double w11 = 0.0, w12 = 0.0, w21 = 0.0, w22 = 0.0; // modulation frequencies
    double eps1 = 0.5, eps2 = 0.5;       // cubic gains
    double F1bar = 0.0, F2bar = 0.0;     // forcing amplitudes
    double q1 = 5.43, q2 = 10.0;         // forcing frequencies

    void validate() const;
};

/// Two coupled Van der Pol-like oscillators: cubic-velocity nonlinearity.
SystemSpec vanderpol_like(const BenchmarkParams& params);

/// Two coupled Duffing-like oscillators: cubic-displacement nonlinearity.
SystemSpec duffing_like(const BenchmarkParams& params);

/// Norm-bound spec from an explicit monomial list (degree >= 1 enforced).
PolyBoundSpec monomial_bound(const std::vector<BoundTerm>& terms);

/// A named figure preset with its benchmark parameters and the window and
/// horizons used to reproduce it.
struct Preset {
    std::string name;
    bool duffing = false;
    BenchmarkParams params;
    double delta = 0.0;       // pre-selected suboptimal averaging window
    double horizon = 100.0;   // default analysis horizon
    std::string figure_kind;  // "scan", "bound" or "region-stability"/"region-trapping"
};

/// Look up one of fig1a..fig1f, fig3a..fig3f, fig4a..fig4f.
std::optional<Preset> find_preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace auxbound
