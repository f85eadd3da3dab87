#pragma once

#include "auxbound/types.hpp"

namespace auxbound {

/// Induced 2-norm (largest singular value); Euclidean norm for vectors.
double spectral_norm(const Cmat& m);
double spectral_norm(const Rmat& m);

struct EigenDecomposition {
    Cvec lambdas;    // descending by real part, ties by descending imaginary part
    Cmat vectors;    // unit-norm columns, column i pairs lambdas[i]
    double min_gap;  // minimal pairwise eigenvalue distance
    double vec_cond; // 2-norm condition number of the eigenvector matrix
};

struct EigenOptions {
    double residual_tol_rel = 1e-9; // residual accepted up to tol * (1 + ||A||)
};

/// Eigendecomposition of a dense square matrix with deterministic ordering
/// and phase (largest-magnitude component of each column made real positive).
/// Near-defective inputs are returned with diagnostics, not rejected.
EigenDecomposition eig_sorted(const Cmat& a, const EigenOptions& opts = {});

/// Eigenvalue/eigenvector data along a matrix path. The first sample is
/// ordered like eig_sorted; later samples follow the continuity matching, so
/// the per-sample descending-real-part order is anchored at the first sample
/// and preserved only when eigenvalue paths do not cross.
struct EigenPath {
    std::vector<double> grid;
    std::vector<Cvec> lambdas;
    std::vector<Cmat> vectors;
    std::vector<double> min_gap;
    std::vector<double> vec_cond;

    std::size_t size() const { return grid.size(); }
    Eigen::Index dim() const { return lambdas.empty() ? 0 : lambdas.front().size(); }

    /// max_i Re(lambda_i) per sample.
    ScalarPath alpha_max() const;
};

struct TrackOptions {
    EigenOptions eig;
    /// Two matchings whose costs differ by less than this (relative to the
    /// eigenvalue scale) and that permute well-separated eigenvalues trigger
    /// a RefineGridError.
    double ambiguity_tol = 1e-9;
    /// Eigenvalues closer than this (relative to scale) are treated as
    /// coalesced: permutations among them are not considered ambiguous.
    double degenerate_tol = 1e-9;
};

/// Track eigenvalues/eigenvectors across a matrix path: consecutive samples
/// are matched by minimal total eigenvalue displacement and eigenvector
/// columns are phase-rotated for continuity.
EigenPath track_eigens(const MatrixPath& path, const TrackOptions& opts = {});

/// Finite-difference derivative of a matrix path: central differences at
/// interior points, one-sided second order at the endpoints. Requires a
/// uniform (or near-uniform) grid of at least 3 points.
MatrixPath path_derivative(const MatrixPath& path);

} // namespace auxbound
