#include "auxbound/dichotomy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace auxbound {

double DichotomyConfig::max_window() const {
    if (mode == WindowMode::Scalar) return delta;
    return delta_matrix.size() ? delta_matrix.maxCoeff() : 0.0;
}

void DichotomyConfig::validate(int n) const {
    if (mode == WindowMode::Scalar) {
        if (!(delta >= 0.0) || !std::isfinite(delta))
            throw InvalidConfigError("dichotomy: window must be finite and nonnegative");
    } else {
        if (delta_matrix.rows() != n || delta_matrix.cols() != n)
            throw InvalidConfigError("dichotomy: per-entry window matrix shape mismatch");
        if ((delta_matrix.array() < 0.0).any() || !delta_matrix.allFinite())
            throw InvalidConfigError("dichotomy: windows must be finite and nonnegative");
    }
    if (!(quad_step > 0.0))
        throw InvalidConfigError("dichotomy: quadrature step must be positive");
    double min_pos = std::numeric_limits<double>::infinity();
    if (mode == WindowMode::Scalar) {
        if (delta > 0.0) min_pos = delta;
    } else {
        for (Eigen::Index i = 0; i < delta_matrix.size(); ++i)
            if (delta_matrix(i) > 0.0) min_pos = std::min(min_pos, delta_matrix(i));
    }
    if (std::isfinite(min_pos) && quad_step > min_pos / 4.0)
        throw InvalidConfigError("dichotomy: quadrature step exceeds window/4");
}

namespace {

// Composite Simpson average of f over [t - w/2, t + w/2].
double window_average(const std::function<double(double)>& f, double t, double w,
                      double quad_step) {
    const auto panels = 2 * std::max<std::size_t>(
                                1, static_cast<std::size_t>(std::ceil(w / (2.0 * quad_step))));
    const double h = w / static_cast<double>(panels);
    const double a = t - 0.5 * w;
    double acc = f(a) + f(a + w);
    for (std::size_t j = 1; j < panels; ++j)
        acc += (j % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(j));
    return acc * h / (3.0 * w);
}

} // namespace

std::pair<MatrixPath, MatrixPath> moving_average_split(
    const std::function<Rmat(double)>& B, const DichotomyConfig& config,
    const std::vector<double>& grid) {
    detail::require_grid(grid, 2, "moving_average_split");
    const Rmat probe = B(grid.front());
    const int n = static_cast<int>(probe.rows());
    config.validate(n);

    auto window = [&config](int i, int j) {
        return config.mode == DichotomyConfig::WindowMode::Scalar ? config.delta
                                                                  : config.delta_matrix(i, j);
    };
    const bool shared_window =
        config.mode == DichotomyConfig::WindowMode::Scalar ||
        (config.delta_matrix.size() &&
         (config.delta_matrix.array() == config.delta_matrix(0, 0)).all());

    std::vector<Cmat> slow(grid.size()), fast(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double t = grid[m];
        const Rmat b_here = B(t);
        Rmat a(n, n);
        if (shared_window) {
            const double w = window(0, 0);
            if (w <= 0.0) {
                a = b_here;
            } else {
                // One Simpson pass evaluating the whole matrix per node.
                const auto panels = 2 * std::max<std::size_t>(
                                            1, static_cast<std::size_t>(std::ceil(
                                                   w / (2.0 * config.quad_step))));
                const double h = w / static_cast<double>(panels);
                const double lo = t - 0.5 * w;
                Rmat acc = B(lo) + B(lo + w);
                for (std::size_t j = 1; j < panels; ++j)
                    acc += (j % 2 == 1 ? 4.0 : 2.0) * B(lo + h * static_cast<double>(j));
                a = acc * (h / (3.0 * w));
            }
        } else {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const double w = window(i, j);
                    if (w <= 0.0) {
                        a(i, j) = b_here(i, j);
                    } else {
                        a(i, j) = window_average(
                            [&B, i, j](double s) { return B(s)(i, j); }, t, w,
                            config.quad_step);
                    }
                }
            }
        }
        slow[m] = a.cast<Complex>();
        fast[m] = (b_here - a).cast<Complex>();
    }
    return {MatrixPath(grid, std::move(slow)), MatrixPath(grid, std::move(fast))};
}

PhiEstimate phi_exponents(const ScalarPath& alpha_max, const ScalarPath& g_norm,
                          const ScalarPath& g_hat_norm, double T, const PhiOptions& opts) {
    if (alpha_max.grid != g_norm.grid || alpha_max.grid != g_hat_norm.grid)
        throw InvalidInputError("phi_exponents: paths must share the grid");
    const double t0 = alpha_max.t_begin();
    if (alpha_max.t_end() + 1e-12 < T)
        throw InvalidConfigError("phi_exponents: paths do not cover the horizon");
    const double t_half = t0 + 0.5 * (T - t0);
    if (!(t_half > t0) || alpha_max.size() < 4)
        throw InvalidConfigError("phi_exponents: horizon too small for the half-horizon check");

    std::vector<double> mu1(alpha_max.size()), mu2(alpha_max.size());
    for (std::size_t i = 0; i < alpha_max.size(); ++i) {
        mu1[i] = alpha_max.values[i] + g_norm.values[i];
        mu2[i] = alpha_max.values[i] + g_hat_norm.values[i];
    }
    const ScalarPath p1(alpha_max.grid, std::move(mu1));
    const ScalarPath p2(alpha_max.grid, std::move(mu2));

    PhiEstimate est;
    est.phi1 = p1.average_until(T);
    est.phi2 = p2.average_until(T);
    const double phi1_half = p1.average_until(t_half);
    const double phi2_half = p2.average_until(t_half);
    est.converged = std::abs(est.phi1 - phi1_half) < opts.convergence_tol &&
                    std::abs(est.phi2 - phi2_half) < opts.convergence_tol;
    return est;
}

namespace {

ScanRow scan_one(const SystemSpec& system, double delta, double T, const ScanOptions& opts) {
    ScanRow row{delta, std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN(), false, false};
    DichotomyConfig cfg;
    cfg.delta = delta;
    cfg.quad_step = std::min(opts.quad_step, delta > 0.0 ? delta / 4.0 : opts.quad_step);
    const auto grid = uniform_grid_step(system.t0, T, opts.grid_step);
    try {
        auto [a0, g0] = moving_average_split(system.B, cfg, grid);
        const auto chain = build_chain(a0, g0, opts.stage_depth, opts.stage);
        const ChainStage& st = chain.back();
        const PhiEstimate est =
            phi_exponents(st.alpha_max, st.g_norm, st.g_hat_norm, T, opts.phi);
        row.phi1 = est.phi1;
        row.phi2 = est.phi2;
        row.converged = est.converged;
    } catch (const NonSimpleEigenvaluesError&) {
        row.irregular = true;
    } catch (const RefineGridError&) {
        row.irregular = true;
    }
    return row;
}

} // namespace

ScanTable window_scan(const SystemSpec& system, const std::vector<double>& deltas, double T,
                      const ScanOptions& opts) {
    if (deltas.empty()) throw InvalidConfigError("window_scan: empty window grid");
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
        if (deltas[i] > deltas[i + 1])
            throw InvalidConfigError("window_scan: window grid must be nondecreasing");

    ScanTable table;
    table.horizon = T;
    table.rows.resize(deltas.size());

    const unsigned workers =
        std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(deltas.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < deltas.size(); ++i)
            table.rows[i] = scan_one(system, deltas[i], T, opts);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> cursor{0};
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = cursor.fetch_add(1); i < deltas.size();
                     i = cursor.fetch_add(1))
                    table.rows[i] = scan_one(system, deltas[i], T, opts);
            });
        for (auto& th : pool) th.join();
    }

    auto better = [&table](std::ptrdiff_t best, std::size_t i, bool use_phi2) {
        const ScanRow& r = table.rows[i];
        if (r.irregular || !std::isfinite(use_phi2 ? r.phi2 : r.phi1)) return best;
        if (best < 0) return static_cast<std::ptrdiff_t>(i);
        const ScanRow& b = table.rows[static_cast<std::size_t>(best)];
        return (use_phi2 ? r.phi2 < b.phi2 : r.phi1 < b.phi1) ? static_cast<std::ptrdiff_t>(i)
                                                              : best;
    };
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        table.argmin_phi1 = better(table.argmin_phi1, i, false);
        table.argmin_phi2 = better(table.argmin_phi2, i, true);
    }
    return table;
}

} // namespace auxbound
