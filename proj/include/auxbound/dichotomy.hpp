#pragma once

#include <functional>

#include "auxbound/chain.hpp"
#include "auxbound/systems.hpp"
#include "auxbound/types.hpp"

namespace auxbound {

struct DichotomyConfig {
    enum class WindowMode { Scalar, PerEntry };
    WindowMode mode = WindowMode::Scalar;
    double delta = 0.0;     // scalar window length (0 = no averaging)
    Rmat delta_matrix;      // per-entry window lengths (PerEntry mode)
    double quad_step = 0.05;

    double max_window() const;
    void validate(int n) const;
};

/// Split B(t) = a0(t) + g0(t): a0 entry (i,j) is the centered moving average
/// of B_ij over its window (composite Simpson); g0 = B - a0 exactly at the
/// grid points. B must be evaluable on [grid.front - max_window/2,
/// grid.back + max_window/2].
std::pair<MatrixPath, MatrixPath> moving_average_split(
    const std::function<Rmat(double)>& B, const DichotomyConfig& config,
    const std::vector<double>& grid);

struct PhiEstimate {
    double phi1; // time average of alpha_max + ||G||
    double phi2; // time average of alpha_max + ||G_hat||
    bool converged;
};

struct PhiOptions {
    double convergence_tol = 1e-3; // |phi(T) - phi(T/2)| threshold
};

/// Finite-horizon Lyapunov-exponent estimates of the linearized auxiliary
/// dynamics; the paths must share a grid covering [t0, T].
PhiEstimate phi_exponents(const ScalarPath& alpha_max, const ScalarPath& g_norm,
                          const ScalarPath& g_hat_norm, double T,
                          const PhiOptions& opts = {});

struct ScanRow {
    double delta;
    double phi1;
    double phi2;
    bool converged;
    bool irregular; // non-simple slow eigenvalues somewhere on the grid
};

struct ScanTable {
    std::vector<ScanRow> rows;
    std::ptrdiff_t argmin_phi1 = -1; // -1 when every row is irregular
    std::ptrdiff_t argmin_phi2 = -1;
    double horizon = 0.0;
};

struct ScanOptions {
    double grid_step = 0.05;
    double quad_step = 0.05;
    int stage_depth = 1;
    StageOptions stage;
    PhiOptions phi;
    unsigned threads = 1;
};

/// Evaluate phi1/phi2 for each window in `deltas` over [t0, T] for the
/// system's linear block, stage `stage_depth` of the chain.
ScanTable window_scan(const SystemSpec& system, const std::vector<double>& deltas, double T,
                      const ScanOptions& opts = {});

} // namespace auxbound
