#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "auxbound/types.hpp"

namespace auxbound {

enum class SolveStatus { Ok, Diverged };

struct SolverStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double rel_tol = 0.0;
};

struct OdeOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double blowup_cap = 1e6;     // terminate with Diverged when ||y|| exceeds this
    double initial_step = 1e-4;
    double max_step = std::numeric_limits<double>::infinity();
    bool nonnegative = false;    // clamp components at 0 after accepted steps
};

/// Solution sampled exactly at the requested output times (the integrator
/// steps onto them, no dense-output interpolation). On divergence the grid
/// is truncated at the last completed output time.
struct OdeSolution {
    std::vector<double> grid;
    std::vector<Rvec> states;
    SolveStatus status = SolveStatus::Ok;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    SolverStats stats;

    ScalarPath norm_path() const;
    ScalarPath component_path(Eigen::Index i) const;
};

using OdeRhs = std::function<void(double t, const Rvec& y, Rvec& dydt)>;

/// Dormand-Prince 5(4) with PI step-size control. `output_times` must be
/// increasing and start at the initial time; states are recorded there.
OdeSolution integrate_ode(const OdeRhs& rhs, const Rvec& y0,
                          const std::vector<double>& output_times,
                          const OdeOptions& opts = {});

} // namespace auxbound
