#include "auxbound/chain.hpp"

#include <cmath>

#include <Eigen/LU>

namespace auxbound {

namespace {

void check_simplicity(const EigenPath& ep, const MatrixPath& a, const StageOptions& opts,
                      int k) {
    double bad_begin = 0.0, bad_end = 0.0;
    bool bad = false;
    for (std::size_t m = 0; m < ep.size(); ++m) {
        const double scale = std::max(1.0, a.values[m].cwiseAbs().maxCoeff());
        if (ep.min_gap[m] < opts.gap_rel_tol * scale || ep.vec_cond[m] > opts.cond_max) {
            if (!bad) bad_begin = ep.grid[m];
            bad_end = ep.grid[m];
            bad = true;
        }
    }
    if (bad)
        throw NonSimpleEigenvaluesError("stage " + std::to_string(k) +
                                            ": slow matrix loses eigenvalue simplicity",
                                        bad_begin, bad_end);
}

} // namespace

ChainStage build_stage(const MatrixPath& a_prev, const MatrixPath& g_prev, int k,
                       const StageOptions& opts, const MatrixPath* v_cum_prev) {
    if (k < 1) throw InvalidInputError("build_stage: stage index must be >= 1");
    if (a_prev.grid != g_prev.grid)
        throw InvalidInputError("build_stage: slow/fast paths must share the grid");

    ChainStage st;
    st.k = k;
    st.eigpath = track_eigens(a_prev, opts.track);
    check_simplicity(st.eigpath, a_prev, opts, k);
    st.alpha_max = st.eigpath.alpha_max();
    st.v = MatrixPath(a_prev.grid, st.eigpath.vectors);
    st.v_dot = path_derivative(st.v);

    const std::size_t m = a_prev.size();
    const Eigen::Index n = a_prev.dim();
    std::vector<Cmat> g_vals(m), ghat_vals(m), vcum_vals(m), anext_vals(m), gnext_vals(m);
    std::vector<double> gn(m), ghn(m), vn(m), vin(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Cmat& v = st.v.values[i];
        Eigen::PartialPivLU<Cmat> lu(v);
        const Cmat v_inv = lu.inverse();
        const Cmat rot = v_inv * st.v_dot.values[i]; // v^-1 dv/dt
        const Cmat g_fast = v_inv * g_prev.values[i] * v;
        // x = v y turns x' = (a + g) x into y' = (Lambda - v^-1 v' + v^-1 g v) y.
        g_vals[i] = -rot + g_fast;
        ghat_vals[i] = hat_g(g_vals[i]);
        gn[i] = spectral_norm(g_vals[i]);
        ghn[i] = spectral_norm(ghat_vals[i]);
        Cmat lam = Cmat::Zero(n, n);
        lam.diagonal() = st.eigpath.lambdas[i];
        anext_vals[i] = lam - rot;
        gnext_vals[i] = g_fast;
        vcum_vals[i] = v_cum_prev ? Cmat(v_cum_prev->values[i] * v) : v;
        vn[i] = spectral_norm(vcum_vals[i]);
        vin[i] = spectral_norm(Cmat(Eigen::PartialPivLU<Cmat>(vcum_vals[i]).inverse()));
    }
    st.g = MatrixPath(a_prev.grid, std::move(g_vals));
    st.g_hat = MatrixPath(a_prev.grid, std::move(ghat_vals));
    st.g_norm = ScalarPath(a_prev.grid, std::move(gn));
    st.g_hat_norm = ScalarPath(a_prev.grid, std::move(ghn));
    st.v_cum = MatrixPath(a_prev.grid, std::move(vcum_vals));
    st.v_cum_norm = ScalarPath(a_prev.grid, std::move(vn));
    st.v_cum_inv_norm = ScalarPath(a_prev.grid, std::move(vin));
    st.a_next = MatrixPath(a_prev.grid, std::move(anext_vals));
    st.g_next = MatrixPath(a_prev.grid, std::move(gnext_vals));
    return st;
}

std::vector<ChainStage> build_chain(const MatrixPath& a0, const MatrixPath& g0, int depth,
                                    const StageOptions& opts) {
    if (depth < 1) throw InvalidInputError("build_chain: depth must be >= 1");
    std::vector<ChainStage> chain;
    chain.reserve(static_cast<std::size_t>(depth));
    chain.push_back(build_stage(a0, g0, 1, opts));
    for (int k = 2; k <= depth; ++k) {
        const ChainStage& prev = chain.back();
        chain.push_back(build_stage(prev.a_next, prev.g_next, k, opts, &prev.v_cum));
    }
    return chain;
}

Cmat hat_g(const Cmat& g) {
    Cmat out = g;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        out(i, i) = Complex(g(i, i).real(), 0.0);
    return out;
}

MatrixPath hat_g(const MatrixPath& g) {
    std::vector<Cmat> vals;
    vals.reserve(g.size());
    for (const Cmat& m : g.values) vals.push_back(hat_g(m));
    return MatrixPath(g.grid, std::move(vals));
}

EtaReduction eta_reduction(const Rvec& alpha) {
    if (alpha.size() == 0 || !alpha.allFinite())
        throw InvalidInputError("eta_reduction: need finite nonempty alpha");
    const double amax = alpha.maxCoeff();
    const double amin = alpha.minCoeff();
    EtaReduction r;
    r.value = amax;
    r.eta_star = 0.5 * (amax + amin);
    r.minimizing_set_upper = r.eta_star;
    return r;
}

double PolyBound::eval(double t, double z) const {
    double acc = 0.0;
    for (const Term& term : terms) acc += term.coeff(t) * std::pow(z, term.exponent);
    return acc;
}

ScalarPath PolyBound::linear_slope(double z_hat) const {
    if (z_hat < 0.0) throw InvalidInputError("PolyBound: z_hat must be nonnegative");
    std::vector<double> v(grid.size(), 0.0);
    for (const Term& term : terms)
        for (std::size_t i = 0; i < grid.size(); ++i)
            v[i] += term.coeff.values[i] * std::pow(z_hat, term.exponent - 1);
    return ScalarPath(grid, std::move(v));
}

PolyBound PolyBound::zero(const std::vector<double>& g) {
    PolyBound b;
    b.grid = g;
    return b;
}

PolyBound push_nonlinearity(const ChainStage& stage, const PolyBoundSpec& spec) {
    const Eigen::Index n = stage.v_cum.dim();
    spec.validate(static_cast<int>(n));

    PolyBound out;
    out.grid = stage.grid();
    for (const BoundTerm& term : spec.terms) {
        std::vector<double> c(out.grid.size());
        for (std::size_t i = 0; i < out.grid.size(); ++i) {
            const Cmat& vc = stage.v_cum.values[i];
            double prod = 1.0;
            for (Eigen::Index row = 0; row < n; ++row) {
                const int p = term.exponents[static_cast<std::size_t>(row)];
                if (p == 0) continue;
                const double s = vc.row(row).cwiseAbs().sum();
                prod *= std::pow(s, p);
            }
            c[i] = stage.v_cum_inv_norm.values[i] * term.coeff_abs(out.grid[i]) * prod;
        }
        out.terms.push_back(PolyBound::Term{term.degree(), ScalarPath(out.grid, std::move(c))});
    }
    return out;
}

ScalarPath linearize_bound(const PolyBound& bound, double z_hat) {
    return bound.linear_slope(z_hat);
}

} // namespace auxbound
