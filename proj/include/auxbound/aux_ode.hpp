#pragma once

#include "auxbound/chain.hpp"
#include "auxbound/ode.hpp"
#include "auxbound/systems.hpp"

namespace auxbound {

enum class AuxVariant { Full32, Hat33, Hom34 };

const char* to_string(AuxVariant v);

/// Scalar auxiliary equation
///   z' = (alpha_max(t) + ||G(t)||) z + L(t, z) + ||F(t)||
/// with the residual-norm path picked per variant and zero forcing for the
/// homogeneous variant.
struct AuxEquation {
    AuxVariant variant = AuxVariant::Hat33;
    ScalarPath alpha_max;
    ScalarPath g_norm;       // ||G|| or ||G_hat|| per variant
    PolyBound bound;
    ScalarPath forcing_norm; // ||F_k(t)|| = F0 ||V^-1(t) eta(t)||
    double F0 = 0.0;

    double rhs(double t, double z) const {
        return (alpha_max(t) + g_norm(t)) * z + bound.eval(t, z) + forcing_norm(t);
    }
    const std::vector<double>& grid() const { return alpha_max.grid; }
};

/// Assemble the auxiliary equation for a built stage. Throws on a
/// forcing/variant mismatch (homogeneous variant with F0 > 0).
AuxEquation build_aux(const ChainStage& stage, const PolyBound& bound,
                      const SystemSpec& system, AuxVariant variant);

/// Scalar trajectory z(t) >= 0 with solver bookkeeping.
struct Trajectory {
    std::vector<double> grid;
    std::vector<double> values;
    SolveStatus status = SolveStatus::Ok;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    SolverStats stats;

    ScalarPath path() const { return ScalarPath(grid, values); }
    double final_value() const { return values.back(); }
    double max_value() const;
};

struct IntegrateOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double blowup_cap = 1e6;
    double output_step = 0.02; // used when no explicit output grid is given
};

/// Integrate the auxiliary equation from z0 over [span_begin, span_end]
/// (coefficient paths linearly interpolated, solution clamped at 0).
Trajectory integrate_aux(const AuxEquation& aux, double z0, double span_begin,
                         double span_end, const IntegrateOptions& opts = {});
Trajectory integrate_aux(const AuxEquation& aux, double z0,
                         const std::vector<double>& output_times,
                         const IntegrateOptions& opts = {});

/// Full n-dimensional trajectory of a SystemSpec plus its norm path.
struct SystemTrajectory {
    OdeSolution solution;
    ScalarPath norm;
};

SystemTrajectory full_integrate(const SystemSpec& system, const Rvec& x0, double span_begin,
                                double span_end, const IntegrateOptions& opts = {});
SystemTrajectory full_integrate(const SystemSpec& system, const Rvec& x0,
                                const std::vector<double>& output_times,
                                const IntegrateOptions& opts = {});

/// Norm bound b(t) = ||V_k(t)|| z_k(t) evaluated on the trajectory grid.
ScalarPath bound_path(const ChainStage& stage, const Trajectory& z);

struct MarginReport {
    double min_margin = 0.0; // min over the compared grid of b - ||x||
    double argmin_time = 0.0;
    std::size_t violations = 0; // points with margin < -tolerance
    double tolerance = 1e-6;
    std::size_t compared_points = 0;
    double compared_until = 0.0; // end of the common span
    bool bound_diverged = false;
    double bound_blowup_time = std::numeric_limits<double>::quiet_NaN();
};

/// Compare a norm path against a bound path on their common span.
MarginReport check_bound(const ScalarPath& norm_path, const ScalarPath& bound,
                         double tolerance = 1e-6);

/// Closed-form solution data of the linearized auxiliary equation
///   Z' = mu(t) Z + ||F(t)||:  Z(t) = z0 Z_h(t) + F0 Z_F(t).
struct LinearizedSolution {
    double z_hat = 0.0;
    ScalarPath mu;
    ScalarPath Z_h; // exp(int mu)
    ScalarPath Z_F; // int exp(int_tau^t mu) ||V^-1 eta|| dtau
    double Z_h_sup = 0.0;
    double Z_F_sup = 0.0;
    bool tail_growth_warning = false; // sup still rising at the horizon end
    double horizon = 0.0;

    double eval(double t, double z0, double F0) const { return z0 * Z_h(t) + F0 * Z_F(t); }
};

/// Z_h by cumulative trapezoid of mu; Z_F by integrating the equivalent
/// linear recurrence. forcing_norm is F0 * ||V^-1 eta||; F0 = 0 requires a
/// zero forcing path.
LinearizedSolution linear_solution(const ScalarPath& mu, const ScalarPath& forcing_norm,
                                   double F0, double z_hat = 0.0,
                                   const IntegrateOptions& opts = {});

} // namespace auxbound
