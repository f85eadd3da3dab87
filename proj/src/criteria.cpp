#include "auxbound/criteria.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace auxbound {

const char* to_string(Stability s) {
    switch (s) {
        case Stability::AsymptoticallyStable: return "asymptoticallyStable";
        case Stability::Stable: return "stable";
        case Stability::Inconclusive: return "inconclusive";
    }
    return "?";
}

Classification classify_mu(const ScalarPath& mu, const ClassifyOptions& opts) {
    Classification c;
    c.horizon = mu.t_end();
    const ScalarPath integral = mu.cumulative_integral();
    c.sup_log = integral.max_value();
    c.phi = integral.values.back() / (mu.t_end() - mu.t_begin());
    const double mu_max = mu.max_value();
    c.uniform_negative = mu_max < 0.0;
    c.nu = c.uniform_negative ? -mu_max : 0.0;

    if (c.uniform_negative || c.phi < -opts.phi_tol)
        c.verdict = Stability::AsymptoticallyStable;
    else if (c.sup_log <= std::log(opts.zhs_cap))
        c.verdict = Stability::Stable;
    else
        c.verdict = Stability::Inconclusive;
    return c;
}

std::vector<Classification> classify_stability(
    const std::function<ScalarPath(double)>& mu_of_zhat, const std::vector<double>& zhat_grid,
    const ClassifyOptions& opts) {
    std::vector<Classification> out;
    out.reserve(zhat_grid.size());
    for (double z : zhat_grid) out.push_back(classify_mu(mu_of_zhat(z), opts));
    return out;
}

LinearMachinery make_machinery(const ChainStage& stage, const PolyBound& bound,
                               const SystemSpec& system) {
    LinearMachinery m;
    const std::vector<double>& grid = stage.grid();
    ScalarPath base = stage.alpha_max;
    for (std::size_t i = 0; i < base.size(); ++i)
        base.values[i] += stage.g_hat_norm.values[i];
    m.mu = [base, bound](double z_hat) {
        ScalarPath mu = base;
        if (!bound.empty()) {
            const ScalarPath l = bound.linear_slope(z_hat);
            for (std::size_t i = 0; i < mu.size(); ++i) mu.values[i] += l.values[i];
        }
        return mu;
    };
    m.F0 = system.F0;
    std::vector<double> fn(grid.size(), 0.0);
    if (system.F0 > 0.0) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Cvec eta_c = system.eta(grid[i]).cast<Complex>();
            fn[i] = system.F0 *
                    Eigen::PartialPivLU<Cmat>(stage.v_cum.values[i]).solve(eta_c).norm();
        }
    }
    m.forcing_norm = ScalarPath(grid, std::move(fn));
    m.v_norm = stage.v_cum_norm;
    m.v_t0 = stage.v_cum.values.front();
    m.bound_empty = bound.empty();
    m.t0 = grid.front();
    m.horizon = grid.back();
    return m;
}

namespace {

std::vector<double> geometric_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(std::max(n, 2)));
    const double ratio = std::log(hi / lo) / static_cast<double>(g.size() - 1);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = lo * std::exp(ratio * static_cast<double>(i));
    g.back() = hi;
    return g;
}

ZHatRow evaluate_row(const LinearMachinery& m, double z_hat, RegionKind kind,
                     const RegionOptions& opts) {
    ZHatRow row{};
    row.z_hat = z_hat;
    const ScalarPath mu = m.mu(z_hat);
    const Classification cls = classify_mu(mu, opts.classify);
    row.phi = cls.phi;
    row.verdict = cls.verdict;

    const LinearizedSolution lin =
        linear_solution(mu, m.forcing_norm, m.F0, z_hat, opts.integrate);
    row.Z_h_sup = lin.Z_h_sup;
    row.Z_F_sup = lin.Z_F_sup;
    row.tail_warning = lin.tail_growth_warning;

    if (cls.verdict == Stability::Inconclusive || row.tail_warning) {
        row.value = std::numeric_limits<double>::quiet_NaN();
        return row;
    }
    row.value = kind == RegionKind::Bounded
                    ? (z_hat - m.F0 * lin.Z_F_sup) / lin.Z_h_sup
                    : z_hat / lin.Z_h_sup;
    return row;
}

bool admissible(const ZHatRow& row) {
    return std::isfinite(row.value) && row.value > 0.0;
}

RegionReport region_impl(const LinearMachinery& m, const std::vector<double>& zhat_grid,
                         RegionKind kind, const RegionOptions& opts) {
    if (zhat_grid.empty()) throw InvalidConfigError("region: empty z_hat grid");
    RegionReport rep;
    rep.kind = kind;
    rep.certification_horizon = m.horizon;

    for (double z : zhat_grid) rep.table.push_back(evaluate_row(m, z, kind, opts));

    auto best_of = [&rep]() {
        std::ptrdiff_t best = -1;
        for (std::size_t i = 0; i < rep.table.size(); ++i)
            if (admissible(rep.table[i]) &&
                (best < 0 || rep.table[i].value > rep.table[static_cast<std::size_t>(best)].value))
                best = static_cast<std::ptrdiff_t>(i);
        return best;
    };

    std::ptrdiff_t best = best_of();
    if (best >= 0 && opts.refine_points > 0 && rep.table.size() > 1) {
        const std::size_t b = static_cast<std::size_t>(best);
        const double lo = b > 0 ? rep.table[b - 1].z_hat : rep.table[b].z_hat * 0.5;
        const double hi =
            b + 1 < rep.table.size() ? rep.table[b + 1].z_hat : rep.table[b].z_hat * 2.0;
        for (double z : geometric_grid(lo, hi, opts.refine_points + 2)) {
            bool dup = false;
            for (const ZHatRow& r : rep.table)
                if (std::abs(r.z_hat - z) < 1e-12 * z) dup = true;
            if (!dup) rep.table.push_back(evaluate_row(m, z, kind, opts));
        }
        std::sort(rep.table.begin(), rep.table.end(),
                  [](const ZHatRow& a, const ZHatRow& b) { return a.z_hat < b.z_hat; });
        best = best_of();
    }

    if (best < 0) {
        rep.empty = true;
        rep.radius = 0.0;
        bool any_certified = false;
        for (const ZHatRow& r : rep.table)
            if (r.verdict != Stability::Inconclusive && !r.tail_warning) any_certified = true;
        if (!any_certified)
            rep.reasons.push_back("no z_hat with a certified stable linearization");
        else
            rep.reasons.push_back("forcing too large: z_hat - F0 * Z_Fs <= 0 throughout");
        return rep;
    }

    const ZHatRow& winner = rep.table[static_cast<std::size_t>(best)];
    rep.radius = winner.value;
    rep.z_hat_star = winner.z_hat;
    rep.unbounded = m.bound_empty; // linear system: admissibility cannot be lost
    for (const ZHatRow& r : rep.table) {
        if (!admissible(r)) continue;
        if (r.verdict == Stability::AsymptoticallyStable)
            rep.classification = Stability::AsymptoticallyStable;
        else if (r.verdict == Stability::Stable &&
                 rep.classification == Stability::Inconclusive)
            rep.classification = Stability::Stable;
    }
    if (m.F0 > 0.0 && winner.verdict == Stability::AsymptoticallyStable) {
        const double tail_start = m.t0 + 0.8 * (m.horizon - m.t0);
        double v_bar = 0.0;
        for (std::size_t i = 0; i < m.v_norm.size(); ++i)
            if (m.v_norm.grid[i] >= tail_start)
                v_bar = std::max(v_bar, m.v_norm.values[i]);
        rep.asymptotic_gain = m.F0 * v_bar * winner.Z_F_sup;
    }
    if (!rep.unbounded && rep.radius > 0.0) rep.ellipsoid_Q = ellipsoid_form(m.v_t0);
    return rep;
}

} // namespace

RegionReport local_stability_region(const LinearMachinery& m,
                                    const std::vector<double>& zhat_grid,
                                    const RegionOptions& opts) {
    if (m.F0 > 0.0)
        throw InvalidConfigError("local_stability_region: homogeneous case requires F0 = 0");
    return region_impl(m, zhat_grid, RegionKind::Stability, opts);
}

RegionReport local_stability_region(const ChainStage& stage, const PolyBound& bound,
                                    const SystemSpec& system,
                                    const std::vector<double>& zhat_grid,
                                    const RegionOptions& opts) {
    return local_stability_region(make_machinery(stage, bound, system), zhat_grid, opts);
}

RegionReport local_bounded_region(const LinearMachinery& m,
                                  const std::vector<double>& zhat_grid,
                                  const RegionOptions& opts) {
    return region_impl(m, zhat_grid, RegionKind::Bounded, opts);
}

RegionReport local_bounded_region(const ChainStage& stage, const PolyBound& bound,
                                  const SystemSpec& system,
                                  const std::vector<double>& zhat_grid,
                                  const RegionOptions& opts) {
    return local_bounded_region(make_machinery(stage, bound, system), zhat_grid, opts);
}

std::vector<double> default_zhat_grid(const LinearMachinery& m, int points, double z_min,
                                      double z_probe_cap, const RegionOptions& opts) {
    double z = z_min;
    double z_fail = z_probe_cap;
    while (z <= z_probe_cap) {
        const Classification cls = classify_mu(m.mu(z), opts.classify);
        if (cls.verdict == Stability::Inconclusive) {
            z_fail = z;
            break;
        }
        z *= 2.0;
    }
    const double hi = std::max(z_fail, z_min * 4.0);
    return geometric_grid(z_min, hi, points);
}

namespace {

bool trapping_ok(const AuxEquation& aux, double z0, double t0, double horizon,
                 const IntegrateOptions& io) {
    const Trajectory tr = integrate_aux(aux, z0, t0, horizon, io);
    if (tr.status != SolveStatus::Ok) return false;
    return tr.max_value() <= z0 * (1.0 + 1e-9) + 1e-15;
}

bool bounded_ok(const AuxEquation& aux, double z0, double t0, double horizon,
                const IntegrateOptions& io) {
    return integrate_aux(aux, z0, t0, horizon, io).status == SolveStatus::Ok;
}

} // namespace

ThresholdResult nonlocal_threshold(const AuxEquation& aux, double z_cap, double horizon,
                                   ThresholdMode mode, const ThresholdOptions& opts) {
    if (!(z_cap > 0.0)) throw InvalidConfigError("nonlocal_threshold: z_cap must be positive");
    if (mode == ThresholdMode::Stability && aux.variant != AuxVariant::Hom34)
        throw InvalidConfigError("nonlocal_threshold: stability mode requires variant hom34");
    if (mode == ThresholdMode::Trapping && aux.variant != AuxVariant::Hat33)
        throw InvalidConfigError("nonlocal_threshold: trapping mode requires variant hat33");
    const double t0 = aux.grid().front();
    if (horizon > aux.grid().back() + 1e-9)
        throw InvalidConfigError("nonlocal_threshold: horizon beyond coefficient coverage");

    ThresholdResult res;
    res.horizon = horizon;
    auto predicate = [&](double z0) {
        return mode == ThresholdMode::Trapping
                   ? trapping_ok(aux, z0, t0, horizon, opts.integrate)
                   : bounded_ok(aux, z0, t0, horizon, opts.integrate);
    };

    double lo = 0.0, hi = z_cap;
    if (predicate(z_cap)) {
        res.z_bar = z_cap;
        res.at_cap = true;
        res.bracket_lo = res.bracket_hi = z_cap;
    } else if (mode == ThresholdMode::Stability) {
        // Monotone predicate: plain bisection from [0, z_cap].
        while (hi - lo > opts.bisect_tol * std::max(hi, 1e-12 * z_cap)) {
            const double mid = 0.5 * (lo + hi);
            (predicate(mid) ? lo : hi) = mid;
        }
        res.z_bar = lo;
        res.bracket_lo = lo;
        res.bracket_hi = hi;
    } else {
        // The trapping predicate can hold only on an interior interval of
        // initial values; pre-scan downward for the largest good probe.
        const int n = std::max(opts.coarse_probes, 4);
        const double ratio = std::pow(1e-4, 1.0 / static_cast<double>(n - 1));
        double good = -1.0, bad_above = z_cap;
        double probe = z_cap;
        for (int i = 0; i < n; ++i) {
            if (predicate(probe)) {
                good = probe;
                break;
            }
            bad_above = probe;
            probe *= ratio;
        }
        if (good < 0.0) {
            res.z_bar = 0.0;
            res.bracket_hi = probe / ratio;
            return res;
        }
        lo = good;
        hi = bad_above;
        while (hi - lo > opts.bisect_tol * std::max(hi, 1e-12 * z_cap)) {
            const double mid = 0.5 * (lo + hi);
            (predicate(mid) ? lo : hi) = mid;
        }
        res.z_bar = lo;
        res.bracket_lo = lo;
        res.bracket_hi = hi;
    }

    if (mode == ThresholdMode::Stability && res.z_bar > 0.0) {
        const Trajectory tr =
            integrate_aux(aux, res.z_bar * (1.0 - opts.bisect_tol), t0, horizon, opts.integrate);
        res.decayed = tr.status == SolveStatus::Ok &&
                      tr.final_value() <= opts.decay_factor * res.z_bar;
    }
    return res;
}

Rmat ellipsoid_form(const Cmat& v_t0) {
    if (v_t0.rows() != v_t0.cols() || v_t0.rows() == 0)
        throw InvalidInputError("ellipsoid_form: square transform required");
    Eigen::JacobiSVD<Cmat> svd(v_t0);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 1e-13 * s(0))
        throw InvalidInputError("ellipsoid_form: singular transform");
    const Cmat v_inv = Eigen::PartialPivLU<Cmat>(v_t0).inverse();
    const Cmat herm = v_inv.adjoint() * v_inv;
    Rmat q = herm.real();
    return 0.5 * (q + q.transpose());
}

Rmat project_ellipsoid(const Rmat& Q, int i, int j) {
    const int n = static_cast<int>(Q.rows());
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
        throw InvalidInputError("project_ellipsoid: bad axis pair");
    std::vector<int> rest;
    for (int k = 0; k < n; ++k)
        if (k != i && k != j) rest.push_back(k);

    Rmat q_ss(2, 2);
    q_ss << Q(i, i), Q(i, j), Q(j, i), Q(j, j);
    if (rest.empty()) return q_ss;

    const int r = static_cast<int>(rest.size());
    Rmat q_sr(2, r), q_rr(r, r);
    for (int a = 0; a < r; ++a) {
        q_sr(0, a) = Q(i, rest[static_cast<std::size_t>(a)]);
        q_sr(1, a) = Q(j, rest[static_cast<std::size_t>(a)]);
        for (int b = 0; b < r; ++b)
            q_rr(a, b) = Q(rest[static_cast<std::size_t>(a)], rest[static_cast<std::size_t>(b)]);
    }
    Eigen::FullPivLU<Rmat> lu(q_rr);
    if (!lu.isInvertible())
        throw DegenerateProjectionError("project_ellipsoid: eliminated block is singular");
    return q_ss - q_sr * lu.solve(q_sr.transpose());
}

std::vector<std::array<double, 2>> ellipsoid_boundary(const Rmat& Q2, double z_bar,
                                                      int n_points) {
    if (Q2.rows() != 2 || Q2.cols() != 2)
        throw InvalidInputError("ellipsoid_boundary: 2x2 form required");
    if (!(z_bar > 0.0)) throw InvalidInputError("ellipsoid_boundary: z_bar must be positive");
    std::vector<std::array<double, 2>> pts;
    pts.reserve(static_cast<std::size_t>(n_points));
    for (int k = 0; k < n_points; ++k) {
        const double theta = 2.0 * M_PI * static_cast<double>(k) / n_points;
        const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
        const double quad = u.dot(Q2 * u);
        if (!(quad > 0.0))
            throw InvalidInputError("ellipsoid_boundary: form not positive definite");
        const double rad = z_bar / std::sqrt(quad);
        pts.push_back({rad * u(0), rad * u(1)});
    }
    return pts;
}

std::vector<IrregularInterval> detect_irregular(const EigenPath& eigpath,
                                                const IrregularThresholds& thresholds,
                                                int stage_index) {
    std::vector<IrregularInterval> out;
    const std::size_t m = eigpath.size();
    std::vector<bool> flagged(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        const double scale = std::max(1.0, eigpath.lambdas[i].cwiseAbs().maxCoeff());
        flagged[i] = eigpath.min_gap[i] < thresholds.gap_rel * scale ||
                     eigpath.vec_cond[i] > thresholds.cond_max;
    }

    std::vector<std::pair<double, double>> spans; // widened [lo, hi]
    for (std::size_t i = 0; i < m;) {
        if (!flagged[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < m && flagged[j + 1]) ++j;
        const double h_lo = i > 0 ? eigpath.grid[i] - eigpath.grid[i - 1]
                                  : eigpath.grid[1] - eigpath.grid[0];
        const double h_hi = j + 1 < m ? eigpath.grid[j + 1] - eigpath.grid[j]
                                      : eigpath.grid[m - 1] - eigpath.grid[m - 2];
        spans.emplace_back(eigpath.grid[i] - thresholds.widen_steps * h_lo,
                           eigpath.grid[j] + thresholds.widen_steps * h_hi);
        i = j + 1;
    }
    // Merge overlapping widened spans.
    std::vector<std::pair<double, double>> merged;
    for (const auto& s : spans) {
        if (!merged.empty() && s.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, s.second);
        else
            merged.push_back(s);
    }
    for (const auto& s : merged) {
        IrregularInterval iv;
        iv.center = 0.5 * (s.first + s.second);
        iv.half_width = 0.5 * (s.second - s.first);
        iv.d = 2.0 * iv.half_width / 5.0;
        iv.stage_index = stage_index;
        iv.touches_boundary =
            s.first <= eigpath.grid.front() + 1e-12 || s.second >= eigpath.grid.back() - 1e-12;
        out.push_back(iv);
    }
    return out;
}

namespace {

MatrixPath sub_path(const MatrixPath& p, std::size_t i0, std::size_t i1) {
    std::vector<double> g(p.grid.begin() + static_cast<std::ptrdiff_t>(i0),
                          p.grid.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
    std::vector<Cmat> v(p.values.begin() + static_cast<std::ptrdiff_t>(i0),
                        p.values.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
    return MatrixPath(std::move(g), std::move(v));
}

// 8-point Gauss-Legendre nodes/weights on [0, 1].
constexpr std::array<double, 8> kGlNodes = {
    0.01985507175123188, 0.10166676129318664, 0.2372337950418355, 0.40828267875217505,
    0.5917173212478249,  0.7627662049581645,  0.8983332387068134, 0.9801449282487681};
constexpr std::array<double, 8> kGlWeights = {
    0.05061426814518813, 0.11119051722668723, 0.15685332293894372, 0.18134189168918097,
    0.18134189168918097, 0.15685332293894372, 0.11119051722668723, 0.05061426814518813};

struct ShiftProbe {
    bool valid = false;
    double d = 0.0;
    std::ptrdiff_t shift_idx = 0;
    EigenPath eig;        // of a(t + d) on the shifted samples
    double sup_m = 0.0;
    PatchPiece piece;     // fully built inside piece
};

PatchPiece build_outside_piece(const StageInputs& in, std::size_t i0, std::size_t i1,
                               const PatchOptions& opts) {
    const MatrixPath a_sub = sub_path(in.a, i0, i1);
    const MatrixPath g_sub = sub_path(in.g, i0, i1);
    const ChainStage st = build_stage(a_sub, g_sub, in.k, opts.stage);

    PatchPiece piece;
    piece.t_begin = a_sub.t_begin();
    piece.t_end = a_sub.t_end();
    piece.alpha_max = st.alpha_max;
    piece.g_norm = st.g_norm;
    piece.m_norm = ScalarPath::constant(a_sub.grid, 0.0);
    piece.v_norm = st.v_cum_norm;
    piece.bound = push_nonlinearity(st, in.system->bound_spec);
    std::vector<double> fn(a_sub.grid.size(), 0.0);
    if (in.system->F0 > 0.0) {
        for (std::size_t i = 0; i < a_sub.grid.size(); ++i) {
            const Cvec eta_c = in.system->eta(a_sub.grid[i]).cast<Complex>();
            fn[i] = in.system->F0 *
                    Eigen::PartialPivLU<Cmat>(st.v_cum.values[i]).solve(eta_c).norm();
        }
    }
    piece.forcing_norm = ScalarPath(a_sub.grid, std::move(fn));
    return piece;
}

ShiftProbe try_shift(const StageInputs& in, std::size_t i1, std::size_t i2,
                     std::ptrdiff_t shift_idx, double d, const MatrixPath& a_deriv,
                     const PatchOptions& opts) {
    ShiftProbe probe;
    probe.d = d;
    probe.shift_idx = shift_idx;
    const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(i1) + shift_idx;
    const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(i2) + shift_idx;
    if (lo < 0 || hi >= static_cast<std::ptrdiff_t>(in.a.size())) return probe;

    MatrixPath a_shift =
        sub_path(in.a, static_cast<std::size_t>(lo), static_cast<std::size_t>(hi));
    EigenPath eig;
    try {
        eig = track_eigens(a_shift, opts.stage.track);
    } catch (const Error&) {
        return probe;
    }
    for (std::size_t m = 0; m < eig.size(); ++m) {
        const double scale = std::max(1.0, a_shift.values[m].cwiseAbs().maxCoeff());
        if (eig.min_gap[m] < opts.stage.gap_rel_tol * scale ||
            eig.vec_cond[m] > opts.stage.cond_max)
            return probe; // shifted matrix still not safely diagonalizable
    }

    const std::size_t count = i2 - i1 + 1;
    std::vector<double> delta_grid(in.a.grid.begin() + static_cast<std::ptrdiff_t>(i1),
                                   in.a.grid.begin() + static_cast<std::ptrdiff_t>(i2) + 1);
    const MatrixPath v_shift(a_shift.grid, eig.vectors);
    const MatrixPath v_dot = path_derivative(v_shift);

    std::vector<double> alpha(count), gnorm(count), mnorm(count), vnorm(count), fnorm(count);
    std::vector<double> vinv_norm(count);
    std::vector<Cmat> v_inv_store(count);
    for (std::size_t m = 0; m < count; ++m) {
        const double t = delta_grid[m];
        const Cmat& v = eig.vectors[m];
        Eigen::PartialPivLU<Cmat> lu(v);
        const Cmat v_inv = lu.inverse();
        v_inv_store[m] = v_inv;
        alpha[m] = eig.lambdas[m].real().maxCoeff();
        const Cmat g_res = -v_inv * v_dot.values[m] +
                           v_inv * in.g.values[i1 + m] * v; // g at the unshifted time
        gnorm[m] = spectral_norm(g_res);

        // sigma(t) = int_0^1 a'(t + d (1 - s)) ds by fixed-order quadrature.
        Cmat sigma = Cmat::Zero(v.rows(), v.cols());
        for (std::size_t q = 0; q < kGlNodes.size(); ++q)
            sigma += kGlWeights[q] * a_deriv(t + d * (1.0 - kGlNodes[q]));
        mnorm[m] = spectral_norm(Cmat(d * v_inv * sigma * v));
        vnorm[m] = spectral_norm(v);
        vinv_norm[m] = spectral_norm(v_inv);
        if (in.system->F0 > 0.0) {
            const Cvec eta_c = in.system->eta(t).cast<Complex>();
            fnorm[m] = in.system->F0 * (v_inv * eta_c).norm();
        } else {
            fnorm[m] = 0.0;
        }
    }

    probe.piece.t_begin = delta_grid.front();
    probe.piece.t_end = delta_grid.back();
    probe.piece.alpha_max = ScalarPath(delta_grid, std::move(alpha));
    probe.piece.g_norm = ScalarPath(delta_grid, std::move(gnorm));
    probe.piece.m_norm = ScalarPath(delta_grid, std::move(mnorm));
    probe.piece.v_norm = ScalarPath(delta_grid, std::move(vnorm));
    probe.piece.forcing_norm = ScalarPath(delta_grid, std::move(fnorm));
    probe.sup_m = probe.piece.m_norm.max_value();

    // Nonlinearity bound from the shifted transform rows.
    PolyBound pb;
    pb.grid = delta_grid;
    const Eigen::Index n = in.a.dim();
    for (const BoundTerm& term : in.system->bound_spec.terms) {
        std::vector<double> c(count);
        for (std::size_t m = 0; m < count; ++m) {
            double prod = 1.0;
            for (Eigen::Index row = 0; row < n; ++row) {
                const int p = term.exponents[static_cast<std::size_t>(row)];
                if (p == 0) continue;
                prod *= std::pow(eig.vectors[m].row(row).cwiseAbs().sum(), p);
            }
            c[m] = vinv_norm[m] * term.coeff_abs(delta_grid[m]) * prod;
        }
        pb.terms.push_back(PolyBound::Term{term.degree(), ScalarPath(delta_grid, std::move(c))});
    }
    probe.piece.bound = std::move(pb);
    probe.eig = std::move(eig);
    probe.valid = true;
    return probe;
}

} // namespace

PatchedAux irregular_patch(const StageInputs& inputs, const IrregularInterval& interval,
                           double d, const PatchOptions& opts) {
    if (d == 0.0) throw InvalidInputError("irregular_patch: small real value d != 0 required");
    if (!(interval.half_width > 0.0))
        throw InvalidInputError("irregular_patch: interval half-width must be positive");
    if (inputs.system == nullptr) throw InvalidInputError("irregular_patch: system missing");
    if (inputs.a.grid != inputs.g.grid)
        throw InvalidInputError("irregular_patch: slow/fast paths must share the grid");

    const std::vector<double>& grid = inputs.a.grid;
    const std::size_t m = grid.size();
    const double h = (grid.back() - grid.front()) / static_cast<double>(m - 1);

    auto nearest_index = [&grid](double t) {
        const std::size_t i = segment_index(grid, t);
        return (t - grid[i] <= grid[i + 1] - t) ? i : i + 1;
    };
    std::size_t i1 = nearest_index(interval.center - interval.half_width);
    std::size_t i2 = nearest_index(interval.center + interval.half_width);
    i1 = std::max<std::size_t>(i1, 3);
    i2 = std::min(i2, m - 4);
    if (i2 < i1 + 2) { // ensure three samples inside for the derivative stencil
        if (i1 >= 1) --i1;
        i2 = std::min(i1 + 2, m - 4);
    }
    if (i1 < 3 || i2 > m - 4 || i2 < i1 + 2)
        throw InvalidInputError("irregular_patch: interval too close to the horizon ends");

    const auto steps = std::max<std::ptrdiff_t>(
        1, static_cast<std::ptrdiff_t>(std::llround(std::abs(d) / h)));
    const double d_mag = static_cast<double>(steps) * h;
    const MatrixPath a_deriv = path_derivative(inputs.a);

    ShiftProbe plus = try_shift(inputs, i1, i2, steps, d_mag, a_deriv, opts);
    ShiftProbe minus = try_shift(inputs, i1, i2, -steps, -d_mag, a_deriv, opts);
    const ShiftProbe* chosen = nullptr;
    if (plus.valid && minus.valid)
        chosen = plus.sup_m <= minus.sup_m ? &plus : &minus;
    else if (plus.valid)
        chosen = &plus;
    else if (minus.valid)
        chosen = &minus;
    if (!chosen)
        throw PatchFailureError("irregular_patch: both +d and -d probes hit non-simple "
                                "eigenvalues on the shifted interval");

    PatchedAux out;
    out.interval = interval;
    out.d = chosen->d;
    out.F0 = inputs.system->F0;
    out.sup_m_norm = chosen->sup_m;
    out.pieces[0] = build_outside_piece(inputs, 0, i1, opts);
    out.pieces[1] = chosen->piece;
    out.pieces[2] = build_outside_piece(inputs, i2, m - 1, opts);
    return out;
}

namespace {

void append_piece(std::vector<double>& grid, std::vector<double>& vals, const ScalarPath& p) {
    grid.insert(grid.end(), p.grid.begin(), p.grid.end());
    vals.insert(vals.end(), p.values.begin(), p.values.end());
}

} // namespace

ScalarPath PatchedAux::mu_under(double z_hat) const {
    std::vector<double> grid, vals;
    for (const PatchPiece& piece : pieces) {
        ScalarPath mu = piece.alpha_max;
        for (std::size_t i = 0; i < mu.size(); ++i)
            mu.values[i] += piece.g_norm.values[i] + piece.m_norm.values[i];
        if (!piece.bound.empty()) {
            const ScalarPath l = piece.bound.linear_slope(z_hat);
            for (std::size_t i = 0; i < mu.size(); ++i) mu.values[i] += l.values[i];
        }
        append_piece(grid, vals, mu);
    }
    return ScalarPath(std::move(grid), std::move(vals));
}

ScalarPath PatchedAux::forcing_concat() const {
    std::vector<double> grid, vals;
    for (const PatchPiece& piece : pieces) append_piece(grid, vals, piece.forcing_norm);
    return ScalarPath(std::move(grid), std::move(vals));
}

ScalarPath PatchedAux::v_norm_concat() const {
    std::vector<double> grid, vals;
    for (const PatchPiece& piece : pieces) append_piece(grid, vals, piece.v_norm);
    return ScalarPath(std::move(grid), std::move(vals));
}

Trajectory integrate_patched(const PatchedAux& patched, double z0,
                             const IntegrateOptions& opts) {
    if (z0 < 0.0) throw InvalidInputError("integrate_patched: z0 must be nonnegative");
    Trajectory out;
    double z = z0;
    for (const PatchPiece& piece : patched.pieces) {
        OdeRhs rhs = [&piece](double t, const Rvec& y, Rvec& dydt) {
            dydt(0) = piece.rhs(t, std::max(y(0), 0.0));
        };
        Rvec y0(1);
        y0(0) = z;
        OdeOptions oo;
        oo.rel_tol = opts.rel_tol;
        oo.abs_tol = opts.abs_tol;
        oo.blowup_cap = opts.blowup_cap;
        oo.nonnegative = true;
        const OdeSolution sol = integrate_ode(rhs, y0, piece.alpha_max.grid, oo);
        for (std::size_t i = 0; i < sol.grid.size(); ++i) {
            out.grid.push_back(sol.grid[i]);
            out.values.push_back(sol.states[i](0));
        }
        out.stats.steps += sol.stats.steps;
        out.stats.rejected += sol.stats.rejected;
        out.stats.rel_tol = sol.stats.rel_tol;
        if (sol.status == SolveStatus::Diverged) {
            out.status = SolveStatus::Diverged;
            out.blowup_time = sol.blowup_time;
            return out;
        }
        z = sol.states.back()(0);
    }
    return out;
}

ScalarPath patched_bound_path(const PatchedAux& patched, const Trajectory& z) {
    std::vector<double> vals(z.grid.size());
    std::size_t offset = 0;
    for (const PatchPiece& piece : patched.pieces) {
        const std::size_t count = piece.alpha_max.size();
        for (std::size_t i = 0; i < count && offset + i < z.grid.size(); ++i)
            vals[offset + i] = piece.v_norm.values[i] * z.values[offset + i];
        offset += count;
        if (offset >= z.grid.size()) break;
    }
    return ScalarPath(z.grid, std::move(vals));
}

} // namespace auxbound
