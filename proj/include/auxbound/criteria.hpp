#pragma once

#include <array>
#include <optional>
#include <string>

#include "auxbound/aux_ode.hpp"
#include "auxbound/chain.hpp"
#include "auxbound/dichotomy.hpp"

namespace auxbound {

enum class Stability { AsymptoticallyStable, Stable, Inconclusive };

const char* to_string(Stability s);

struct ClassifyOptions {
    double phi_tol = 1e-3;  // asymptotically stable when phi < -phi_tol
    double zhs_cap = 1e3;   // stable when sup Z_h stays below this on the horizon
};

struct Classification {
    Stability verdict = Stability::Inconclusive;
    double phi = 0.0;      // horizon average of mu
    double sup_log = 0.0;  // sup_t int mu
    bool uniform_negative = false;
    double nu = 0.0;       // negativity margin when mu(t) <= -nu < 0 uniformly
    double horizon = 0.0;  // certification horizon
};

/// Classify one linearized coefficient path on its horizon.
Classification classify_mu(const ScalarPath& mu, const ClassifyOptions& opts = {});

/// Classification per z_hat for a family of coefficient paths.
std::vector<Classification> classify_stability(
    const std::function<ScalarPath(double)>& mu_of_zhat, const std::vector<double>& zhat_grid,
    const ClassifyOptions& opts = {});

/// Everything the local (linearized) criteria need; built from a regular
/// chain stage or from a patched equation.
struct LinearMachinery {
    std::function<ScalarPath(double)> mu; // alpha_max + residual norm + l(., z_hat)
    ScalarPath forcing_norm;              // F0 ||V^-1 eta||
    double F0 = 0.0;
    ScalarPath v_norm;                    // ||V_K(t)||
    Cmat v_t0;                            // cumulative transform at t0
    bool bound_empty = false;             // L == 0: linear system
    double t0 = 0.0;
    double horizon = 0.0;
};

/// Linearized machinery of a built stage (hat residual variant).
LinearMachinery make_machinery(const ChainStage& stage, const PolyBound& bound,
                               const SystemSpec& system);

enum class RegionKind { Stability, Trapping, Bounded };

struct ZHatRow {
    double z_hat;
    double Z_h_sup;
    double Z_F_sup;
    double value; // region expression at this z_hat
    double phi;
    Stability verdict;
    bool tail_warning;
};

struct RegionReport {
    RegionKind kind = RegionKind::Stability;
    double radius = 0.0;   // threshold in z = ||V^-1(t0) x0|| units
    bool unbounded = false;
    bool empty = false;
    std::vector<std::string> reasons;
    std::vector<ZHatRow> table;
    double z_hat_star = std::numeric_limits<double>::quiet_NaN();
    Stability classification = Stability::Inconclusive;
    double certification_horizon = 0.0;
    double asymptotic_gain = std::numeric_limits<double>::quiet_NaN();
    Rmat ellipsoid_Q; // realified quadratic form (empty when radius == 0)
};

struct RegionOptions {
    ClassifyOptions classify;
    IntegrateOptions integrate;
    int refine_points = 8; // one refinement pass around the maximizer
};

/// Stability region of the trivial solution (homogeneous case): radius is
/// the sup over admissible z_hat of z_hat / Z_{h,s}.
RegionReport local_stability_region(const LinearMachinery& m,
                                    const std::vector<double>& zhat_grid,
                                    const RegionOptions& opts = {});
RegionReport local_stability_region(const ChainStage& stage, const PolyBound& bound,
                                    const SystemSpec& system,
                                    const std::vector<double>& zhat_grid,
                                    const RegionOptions& opts = {});

/// Boundedness region of the forced system: sup over z_hat of
/// (z_hat - F0 Z_{F,s}) / Z_{h,s}; also reports the asymptotic gain.
RegionReport local_bounded_region(const LinearMachinery& m,
                                  const std::vector<double>& zhat_grid,
                                  const RegionOptions& opts = {});
RegionReport local_bounded_region(const ChainStage& stage, const PolyBound& bound,
                                  const SystemSpec& system,
                                  const std::vector<double>& zhat_grid,
                                  const RegionOptions& opts = {});

/// Default z_hat grid: geometric points from z_min up to the first
/// inadmissible scale (probed by doubling), per the region options.
std::vector<double> default_zhat_grid(const LinearMachinery& m, int points = 32,
                                      double z_min = 1e-3, double z_probe_cap = 1e6,
                                      const RegionOptions& opts = {});

enum class ThresholdMode { Stability, Trapping };

struct ThresholdResult {
    double z_bar = 0.0;
    bool at_cap = false;     // predicate still true at the probe cap
    double bracket_lo = 0.0; // largest initial value verified good
    double bracket_hi = 0.0; // smallest initial value verified bad
    bool decayed = false;    // stability mode: trajectory fell below eps * z0
    double horizon = 0.0;
};

struct ThresholdOptions {
    double bisect_tol = 1e-4; // relative
    double decay_factor = 1e-3;
    int coarse_probes = 40; // trapping mode: geometric pre-scan resolution
    IntegrateOptions integrate;
};

/// Largest initial value whose trajectory satisfies the mode predicate on
/// the horizon (stability: stays bounded; trapping: never exceeds its own
/// initial value). Requires variant hom34 for stability, hat33 for trapping.
ThresholdResult nonlocal_threshold(const AuxEquation& aux, double z_cap, double horizon,
                                   ThresholdMode mode, const ThresholdOptions& opts = {});

/// Realified ellipsoid form: x^T Q x = ||V^-1 x||^2 for real x.
Rmat ellipsoid_form(const Cmat& v_t0);

/// Schur-complement projection of the form onto the (i, j) coordinate plane.
Rmat project_ellipsoid(const Rmat& Q, int i, int j);

/// Boundary polyline of {x : x^T Q2 x = z_bar^2} in the projected plane.
std::vector<std::array<double, 2>> ellipsoid_boundary(const Rmat& Q2, double z_bar,
                                                      int n_points = 256);

struct IrregularThresholds {
    double gap_rel = 1e-6;  // min_gap below gap_rel * max(1, ||a||) flags
    double cond_max = 1e6;  // eigenvector condition above this flags
    int widen_steps = 2;    // grid steps added beyond the flagged span
};

struct IrregularInterval {
    double center = 0.0;
    double half_width = 0.0;
    double d = 0.0; // suggested shift, 2 * half_width / 5 by default
    int stage_index = 1;
    bool touches_boundary = false;
};

/// Intervals where the eigenpath diagnostics indicate loss of
/// diagonalizability, widened and merged.
std::vector<IrregularInterval> detect_irregular(const EigenPath& eigpath,
                                                const IrregularThresholds& thresholds = {},
                                                int stage_index = 1);

/// Sampled inputs feeding the stage that carries the irregular moment.
struct StageInputs {
    MatrixPath a; // slow matrix a_{k-1} over the full analysis grid
    MatrixPath g; // fast residual g_{k-1}
    const SystemSpec* system = nullptr;
    int k = 1;
};

struct PatchPiece {
    double t_begin = 0.0, t_end = 0.0;
    ScalarPath alpha_max;
    ScalarPath g_norm;       // residual norm (full residual, not hat)
    ScalarPath m_norm;       // mean-value correction norm (inside piece only)
    ScalarPath forcing_norm; // F0 ||V^-1 F-shape||
    ScalarPath v_norm;       // bound multiplier ||V(t)|| (shifted inside)
    PolyBound bound;

    double rhs(double t, double z) const {
        return (alpha_max(t) + g_norm(t) + m_norm(t)) * z + bound.eval(t, z) +
               forcing_norm(t);
    }
};

/// Three-piece auxiliary equation around one irregular moment.
struct PatchedAux {
    std::array<PatchPiece, 3> pieces; // before / inside / after
    IrregularInterval interval;
    double d = 0.0; // accepted shift (signed)
    double F0 = 0.0;
    double sup_m_norm = 0.0;

    /// Piecewise linearized coefficient over the whole horizon (duplicated
    /// abscissae at the junctions).
    ScalarPath mu_under(double z_hat) const;
    ScalarPath forcing_concat() const;
    ScalarPath v_norm_concat() const;
};

struct PatchOptions {
    StageOptions stage;
    int quad_points = 8; // fixed-order quadrature of the mean-value integral
};

/// Build the altered auxiliary data on the shifted interval; probes +d and
/// -d and keeps the probe with the smaller correction norm.
PatchedAux irregular_patch(const StageInputs& inputs, const IrregularInterval& interval,
                           double d, const PatchOptions& opts = {});

/// Integrate the three pieces with matching initial conditions.
Trajectory integrate_patched(const PatchedAux& patched, double z0,
                             const IntegrateOptions& opts = {});

/// Piecewise bound multiplier times the patched trajectory.
ScalarPath patched_bound_path(const PatchedAux& patched, const Trajectory& z);

} // namespace auxbound
