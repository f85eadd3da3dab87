#include "auxbound/aux_ode.hpp"

#include <algorithm>
#include <cmath>

namespace auxbound {

const char* to_string(AuxVariant v) {
    switch (v) {
        case AuxVariant::Full32: return "full32";
        case AuxVariant::Hat33: return "hat33";
        case AuxVariant::Hom34: return "hom34";
    }
    return "?";
}

AuxEquation build_aux(const ChainStage& stage, const PolyBound& bound,
                      const SystemSpec& system, AuxVariant variant) {
    if (bound.grid != stage.grid())
        throw InvalidInputError("build_aux: stage and bound must share the grid");
    if (variant == AuxVariant::Hom34 && system.F0 > 0.0)
        throw InvalidConfigError("build_aux: homogeneous variant cannot carry forcing");

    AuxEquation aux;
    aux.variant = variant;
    aux.alpha_max = stage.alpha_max;
    aux.g_norm = variant == AuxVariant::Full32 ? stage.g_norm : stage.g_hat_norm;
    aux.bound = bound;
    aux.F0 = variant == AuxVariant::Hom34 ? 0.0 : system.F0;

    std::vector<double> fn(stage.grid().size(), 0.0);
    if (aux.F0 > 0.0) {
        for (std::size_t i = 0; i < stage.grid().size(); ++i) {
            const double t = stage.grid()[i];
            const Cvec eta_c = system.eta(t).cast<Complex>();
            const Cvec transformed =
                Eigen::PartialPivLU<Cmat>(stage.v_cum.values[i]).solve(eta_c);
            fn[i] = aux.F0 * transformed.norm();
        }
    }
    aux.forcing_norm = ScalarPath(stage.grid(), std::move(fn));
    return aux;
}

double Trajectory::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

namespace {

Trajectory to_trajectory(const OdeSolution& sol) {
    Trajectory tr;
    tr.grid = sol.grid;
    tr.values.resize(sol.states.size());
    for (std::size_t i = 0; i < sol.states.size(); ++i) tr.values[i] = sol.states[i](0);
    tr.status = sol.status;
    tr.blowup_time = sol.blowup_time;
    tr.stats = sol.stats;
    return tr;
}

OdeOptions make_ode_options(const IntegrateOptions& opts, bool nonnegative) {
    OdeOptions o;
    o.rel_tol = opts.rel_tol;
    o.abs_tol = opts.abs_tol;
    o.blowup_cap = opts.blowup_cap;
    o.nonnegative = nonnegative;
    return o;
}

} // namespace

Trajectory integrate_aux(const AuxEquation& aux, double z0,
                         const std::vector<double>& output_times,
                         const IntegrateOptions& opts) {
    if (z0 < 0.0) throw InvalidInputError("integrate_aux: z0 must be nonnegative");
    if (output_times.front() + 1e-12 < aux.grid().front() ||
        output_times.back() - 1e-9 > aux.grid().back())
        throw InvalidInputError("integrate_aux: span outside coefficient coverage");

    OdeRhs rhs = [&aux](double t, const Rvec& y, Rvec& dydt) {
        dydt(0) = aux.rhs(t, std::max(y(0), 0.0));
    };
    Rvec y0(1);
    y0(0) = z0;
    return to_trajectory(integrate_ode(rhs, y0, output_times, make_ode_options(opts, true)));
}

Trajectory integrate_aux(const AuxEquation& aux, double z0, double span_begin,
                         double span_end, const IntegrateOptions& opts) {
    return integrate_aux(aux, z0, uniform_grid_step(span_begin, span_end, opts.output_step),
                         opts);
}

SystemTrajectory full_integrate(const SystemSpec& system, const Rvec& x0,
                                const std::vector<double>& output_times,
                                const IntegrateOptions& opts) {
    if (x0.size() != system.n) throw InvalidInputError("full_integrate: x0 dimension mismatch");
    OdeRhs rhs = [&system](double t, const Rvec& y, Rvec& dydt) {
        dydt = system.B(t) * y;
        if (system.f) dydt += system.f(t, y);
        if (system.F0 > 0.0) dydt += system.F0 * system.eta(t);
    };
    SystemTrajectory out;
    out.solution = integrate_ode(rhs, x0, output_times, make_ode_options(opts, false));
    out.norm = out.solution.norm_path();
    return out;
}

SystemTrajectory full_integrate(const SystemSpec& system, const Rvec& x0, double span_begin,
                                double span_end, const IntegrateOptions& opts) {
    return full_integrate(system, x0,
                          uniform_grid_step(span_begin, span_end, opts.output_step), opts);
}

ScalarPath bound_path(const ChainStage& stage, const Trajectory& z) {
    std::vector<double> v(z.grid.size());
    for (std::size_t i = 0; i < z.grid.size(); ++i)
        v[i] = stage.v_cum_norm(z.grid[i]) * z.values[i];
    return ScalarPath(z.grid, std::move(v));
}

MarginReport check_bound(const ScalarPath& norm_path, const ScalarPath& bound,
                         double tolerance) {
    MarginReport rep;
    rep.tolerance = tolerance;
    const double t_lo = std::max(norm_path.t_begin(), bound.t_begin());
    const double t_hi = std::min(norm_path.t_end(), bound.t_end());
    if (!(t_hi > t_lo))
        throw InvalidInputError("check_bound: paths do not overlap");
    rep.compared_until = t_hi;

    rep.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < norm_path.size(); ++i) {
        const double t = norm_path.grid[i];
        if (t < t_lo || t > t_hi) continue;
        const double margin = bound(t) - norm_path.values[i];
        ++rep.compared_points;
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.argmin_time = t;
        }
        if (margin < -tolerance) ++rep.violations;
    }
    if (rep.compared_points == 0)
        throw InvalidInputError("check_bound: no comparable grid points");
    return rep;
}

LinearizedSolution linear_solution(const ScalarPath& mu, const ScalarPath& forcing_norm,
                                   double F0, double z_hat, const IntegrateOptions& opts) {
    if (mu.grid != forcing_norm.grid)
        throw InvalidInputError("linear_solution: paths must share the grid");
    if (F0 == 0.0 && forcing_norm.max_value() > 0.0)
        throw InvalidInputError("linear_solution: F0 = 0 with nonzero forcing path");

    LinearizedSolution out;
    out.z_hat = z_hat;
    out.mu = mu;
    out.horizon = mu.t_end();

    const ScalarPath integral = mu.cumulative_integral();
    out.Z_h = ScalarPath::map(integral, [](double v) { return std::exp(v); });

    if (F0 > 0.0) {
        // Z_F' = mu Z_F + ||V^-1 eta||, Z_F(t0) = 0 (F0 divided out).
        OdeRhs rhs = [&mu, &forcing_norm, F0](double t, const Rvec& y, Rvec& dydt) {
            dydt(0) = mu(t) * y(0) + forcing_norm(t) / F0;
        };
        Rvec y0 = Rvec::Zero(1);
        OdeOptions oo = {};
        oo.rel_tol = std::min(opts.rel_tol, 1e-10);
        oo.abs_tol = opts.abs_tol;
        oo.blowup_cap = opts.blowup_cap;
        const OdeSolution sol = integrate_ode(rhs, y0, mu.grid, oo);
        if (sol.status == SolveStatus::Diverged)
            throw NumericError("linear_solution: forced response diverged");
        out.Z_F = sol.component_path(0);
    } else {
        out.Z_F = ScalarPath::constant(mu.grid, 0.0);
    }

    out.Z_h_sup = out.Z_h.max_value();
    out.Z_F_sup = out.Z_F.max_value();

    const double tail_start = mu.t_begin() + 0.9 * (mu.t_end() - mu.t_begin());
    const double tail_mu = mu.average_from(tail_start);
    auto still_rising = [tail_mu](const ScalarPath& p, double sup) {
        return p.values.back() >= 0.99 * sup && tail_mu > 0.0;
    };
    out.tail_growth_warning =
        still_rising(out.Z_h, out.Z_h_sup) || (F0 > 0.0 && still_rising(out.Z_F, out.Z_F_sup));
    return out;
}

} // namespace auxbound
