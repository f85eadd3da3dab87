#pragma once

#include "auxbound/linalg.hpp"
#include "auxbound/systems.hpp"
#include "auxbound/types.hpp"

namespace auxbound {

struct StageOptions {
    /// Samples with min_gap below gap_rel_tol * max(1, ||a||) or vec_cond
    /// above cond_max are treated as non-simple.
    double gap_rel_tol = 1e-6;
    double cond_max = 1e6;
    TrackOptions track;
};

/// Stage-k data of the transform chain. The slow matrix a_{k-1} is
/// diagonalized along the grid; the residual G collects the transform
/// derivative and the transformed fast part.
struct ChainStage {
    int k = 1;
    EigenPath eigpath;       // of a_{k-1}
    ScalarPath alpha_max;    // max_i Re(lambda_i(t))
    MatrixPath v;            // eigenmatrix path v_k(t), unit columns
    MatrixPath v_dot;
    MatrixPath g;            // residual G_k(t) = -v^-1 v_dot + v^-1 g_{k-1} v
    MatrixPath g_hat;        // G_k with the imaginary part of its diagonal removed
    ScalarPath g_norm;
    ScalarPath g_hat_norm;
    MatrixPath v_cum;        // cumulative transform V_k(t)
    ScalarPath v_cum_norm;
    ScalarPath v_cum_inv_norm;
    MatrixPath a_next;       // a_k = Lambda_k - v^-1 v_dot (input to stage k+1)
    MatrixPath g_next;       // g_k = v^-1 g_{k-1} v

    const std::vector<double>& grid() const { return eigpath.grid; }
};

/// Build stage k from the previous slow/fast pair. `v_cum_prev` is the
/// cumulative transform of stage k-1 (null for k = 1). Throws
/// NonSimpleEigenvaluesError when the slow matrix loses simplicity.
ChainStage build_stage(const MatrixPath& a_prev, const MatrixPath& g_prev, int k,
                       const StageOptions& opts = {}, const MatrixPath* v_cum_prev = nullptr);

/// Full chain a_0 -> stage 1 -> ... -> stage depth.
std::vector<ChainStage> build_chain(const MatrixPath& a0, const MatrixPath& g0, int depth,
                                    const StageOptions& opts = {});

/// Zero the imaginary part of the diagonal, leave off-diagonals untouched.
MatrixPath hat_g(const MatrixPath& g);
Cmat hat_g(const Cmat& g);

struct EtaReduction {
    double eta_star;        // midpoint minimizer (alpha_max + alpha_min) / 2
    double value;           // min_eta (eta + max_i |alpha_i - eta|) = max_i alpha_i
    double minimizing_set_upper; // the minimizing set is (-inf, this]
};

/// Closed form of the scalar reduction used for the auxiliary-equation
/// drift coefficient.
EtaReduction eta_reduction(const Rvec& alpha);

/// Time-varying scalar majorant L(t, z) = sum_j c_j(t) z^{p_j}.
struct PolyBound {
    std::vector<double> grid;
    struct Term {
        int exponent;
        ScalarPath coeff;
    };
    std::vector<Term> terms;

    double eval(double t, double z) const;
    bool empty() const { return terms.empty(); }
    /// Linear majorant slope on [0, z_hat]: l(t) = sum_j c_j(t) z_hat^{p_j - 1}.
    ScalarPath linear_slope(double z_hat) const;
    static PolyBound zero(const std::vector<double>& grid);
};

/// Push the componentwise bound through the cumulative transform of a stage:
/// each term becomes ||V^-1|| * |a_i(t)| * prod_m s_m(t)^{p_m} * z^deg with
/// s_m the absolute row sums of V.
PolyBound push_nonlinearity(const ChainStage& stage, const PolyBoundSpec& spec);

/// L(t, z) <= l(t, z_hat) z on [0, z_hat].
ScalarPath linearize_bound(const PolyBound& bound, double z_hat);

} // namespace auxbound
