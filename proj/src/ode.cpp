#include "auxbound/ode.hpp"

#include <algorithm>
#include <cmath>

namespace auxbound {

ScalarPath OdeSolution::norm_path() const {
    std::vector<double> v(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) v[i] = states[i].norm();
    return ScalarPath(grid, std::move(v));
}

ScalarPath OdeSolution::component_path(Eigen::Index i) const {
    std::vector<double> v(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) v[k] = states[k](i);
    return ScalarPath(grid, std::move(v));
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
    const OdeRhs& rhs;
    Rvec k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;

    explicit Stepper(const OdeRhs& f, Eigen::Index n) : rhs(f) {
        for (Rvec* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &ynew, &yerr})
            v->setZero(n);
    }

    // One trial step from (t, y) with k1 already holding rhs(t, y).
    // Returns the scaled error norm; ynew/k7 hold the candidate state and
    // its derivative (FSAL).
    double attempt(double t, const Rvec& y, double h, double rel, double abs) {
        ytmp = y + h * (a21 * k1);
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = abs + rel * std::max(std::abs(y(i)), std::abs(ynew(i)));
            const double r = yerr(i) / sc;
            err += r * r;
        }
        return std::sqrt(err / static_cast<double>(y.size()));
    }
};

} // namespace

OdeSolution integrate_ode(const OdeRhs& rhs, const Rvec& y0,
                          const std::vector<double>& output_times, const OdeOptions& opts) {
    detail::require_grid(output_times, 2, "integrate_ode output times",
                         /*strictly_increasing=*/false);
    if (!y0.allFinite()) throw InvalidInputError("integrate_ode: non-finite initial state");

    OdeSolution sol;
    sol.stats.rel_tol = opts.rel_tol;
    sol.grid.push_back(output_times.front());
    sol.states.push_back(y0);

    Stepper st(rhs, y0.size());
    double t = output_times.front();
    Rvec y = y0;
    if (opts.nonnegative) y = y.cwiseMax(0.0);
    rhs(t, y, st.k1);
    double h_nat = std::min(opts.initial_step, opts.max_step);
    const double t_final = output_times.back();
    const double hmin_floor = 1e-14 * std::max(1.0, std::abs(t_final));

    std::size_t next_out = 1;
    while (next_out < output_times.size()) {
        const double t_target = output_times[next_out];
        if (t_target - t <= hmin_floor && !sol.grid.empty() && t >= t_target - hmin_floor) {
            // Duplicated output point (jump marker): record and move on.
            sol.grid.push_back(t_target);
            sol.states.push_back(y);
            ++next_out;
            continue;
        }
        double h = h_nat;
        bool hit_target = false;
        if (t + h >= t_target - hmin_floor) {
            h = t_target - t;
            hit_target = true;
        }
        if (h < hmin_floor)
            throw StiffnessError("integrate_ode: step size underflow", t);

        const double err = st.attempt(t, y, h, opts.rel_tol, opts.abs_tol);
        if (!std::isfinite(err) || err > 1.0) {
            ++sol.stats.rejected;
            const double shrink = std::isfinite(err)
                                      ? std::max(0.1, 0.9 * std::pow(err, -0.2))
                                      : 0.1;
            h_nat = h * shrink;
            continue;
        }

        ++sol.stats.steps;
        t = hit_target ? t_target : t + h;
        y = st.ynew;
        if (opts.nonnegative) y = y.cwiseMax(0.0);
        st.k1 = st.k7; // FSAL
        if (opts.nonnegative && (st.ynew.array() < 0.0).any()) rhs(t, y, st.k1);

        if (!y.allFinite() || y.norm() > opts.blowup_cap) {
            sol.status = SolveStatus::Diverged;
            sol.blowup_time = t;
            return sol;
        }
        if (hit_target) {
            sol.grid.push_back(t_target);
            sol.states.push_back(y);
            ++next_out;
        }
        const double grow = err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
        // A step clamped onto an output point must not shrink the
        // controller's preferred step.
        h_nat = std::min(std::max(h * grow, hit_target ? h_nat : 0.0), opts.max_step);
    }
    return sol;
}

} // namespace auxbound
