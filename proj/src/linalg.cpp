#include "auxbound/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace auxbound {

double spectral_norm(const Cmat& m) {
    if (!m.allFinite()) throw InvalidInputError("spectral_norm: non-finite entries");
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Cmat> svd(m);
    return svd.singularValues()(0);
}

double spectral_norm(const Rmat& m) { return spectral_norm(Cmat(m.cast<Complex>())); }

namespace {

double min_pairwise_gap(const Cvec& lambdas) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < lambdas.size(); ++i)
        for (Eigen::Index j = i + 1; j < lambdas.size(); ++j)
            gap = std::min(gap, std::abs(lambdas(i) - lambdas(j)));
    return lambdas.size() < 2 ? std::numeric_limits<double>::infinity() : gap;
}

double condition_number(const Cmat& v) {
    Eigen::JacobiSVD<Cmat> svd(v);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

// Rotate so the largest-magnitude component is real positive.
void normalize_phase_anchor(Cmat& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index imax = 0;
        v.col(c).cwiseAbs().maxCoeff(&imax);
        const Complex pivot = v(imax, c);
        if (std::abs(pivot) > 0.0) v.col(c) *= std::conj(pivot) / std::abs(pivot);
    }
}

} // namespace

EigenDecomposition eig_sorted(const Cmat& a, const EigenOptions& opts) {
    if (a.rows() != a.cols()) throw InvalidInputError("eig_sorted: matrix must be square");
    if (!a.allFinite()) throw InvalidInputError("eig_sorted: non-finite entries");
    const Eigen::Index n = a.rows();

    Eigen::ComplexEigenSolver<Cmat> solver(a, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw NumericError("eig_sorted: eigensolver failed to converge");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const Cvec& raw = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&raw](Eigen::Index i, Eigen::Index j) {
        const Complex a = raw(i), b = raw(j);
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });

    EigenDecomposition out;
    out.lambdas = Cvec(n);
    out.vectors = Cmat(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.lambdas(k) = raw(order[static_cast<std::size_t>(k)]);
        Cvec col = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
        const double nrm = col.norm();
        if (nrm > 0.0) col /= nrm;
        out.vectors.col(k) = col;
    }
    normalize_phase_anchor(out.vectors);

    const double scale = a.cwiseAbs().maxCoeff();
    const double res = (a * out.vectors - out.vectors * out.lambdas.asDiagonal()).cwiseAbs().maxCoeff();
    if (res > opts.residual_tol_rel * (1.0 + scale) * 1e3)
        throw NumericError("eig_sorted: eigendecomposition residual too large");

    out.min_gap = min_pairwise_gap(out.lambdas);
    out.vec_cond = condition_number(out.vectors);
    return out;
}

namespace {

// Best and second-best eigenvalue matchings between consecutive samples by
// total displacement, over all permutations (n is small).
struct MatchResult {
    std::vector<Eigen::Index> perm;
    double cost = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> second_perm;
    double second_cost = std::numeric_limits<double>::infinity();
};

MatchResult match_eigenvalues(const Cvec& prev, const Cvec& next) {
    const auto n = static_cast<std::size_t>(prev.size());
    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    MatchResult best;
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            cost += std::abs(next(perm[i]) - prev(static_cast<Eigen::Index>(i)));
        if (cost < best.cost) {
            best.second_cost = best.cost;
            best.second_perm = best.perm;
            best.cost = cost;
            best.perm = perm;
        } else if (cost < best.second_cost) {
            best.second_cost = cost;
            best.second_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Whether two permutations differ only on eigenvalues that coalesce at this
// sample (distance below tol); such swaps are phase-irrelevant.
bool differs_only_on_degenerate(const std::vector<Eigen::Index>& a,
                                const std::vector<Eigen::Index>& b, const Cvec& lambdas,
                                double tol) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        if (std::abs(lambdas(a[i]) - lambdas(b[i])) > tol) return false;
    }
    return true;
}

} // namespace

EigenPath track_eigens(const MatrixPath& path, const TrackOptions& opts) {
    if (path.size() < 2) throw InvalidInputError("track_eigens: path needs >= 2 samples");
    const Eigen::Index n = path.dim();
    if (n > 8)
        throw InvalidInputError("track_eigens: permutation matching limited to n <= 8");

    EigenPath out;
    out.grid = path.grid;
    out.lambdas.reserve(path.size());
    out.vectors.reserve(path.size());
    out.min_gap.reserve(path.size());
    out.vec_cond.reserve(path.size());

    EigenDecomposition first = eig_sorted(path.values.front(), opts.eig);
    out.lambdas.push_back(first.lambdas);
    out.vectors.push_back(first.vectors);
    out.min_gap.push_back(first.min_gap);
    out.vec_cond.push_back(first.vec_cond);

    for (std::size_t m = 1; m < path.size(); ++m) {
        EigenDecomposition cur = eig_sorted(path.values[m], opts.eig);
        const double scale = std::max(1.0, cur.lambdas.cwiseAbs().maxCoeff());
        MatchResult match = match_eigenvalues(out.lambdas.back(), cur.lambdas);
        if (match.second_cost < std::numeric_limits<double>::infinity() &&
            match.second_cost - match.cost < opts.ambiguity_tol * scale &&
            !differs_only_on_degenerate(match.perm, match.second_perm, cur.lambdas,
                                        opts.degenerate_tol * scale)) {
            throw RefineGridError("track_eigens: ambiguous eigenvalue matching",
                                  path.grid[m - 1], path.grid[m]);
        }

        Cvec lam(n);
        Cmat vec(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            lam(i) = cur.lambdas(match.perm[static_cast<std::size_t>(i)]);
            vec.col(i) = cur.vectors.col(match.perm[static_cast<std::size_t>(i)]);
        }
        // Phase continuity: make <v_prev, v_new> real nonnegative.
        const Cmat& prev = out.vectors.back();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Complex overlap = prev.col(i).dot(vec.col(i));
            if (std::abs(overlap) > 0.0) vec.col(i) *= std::conj(overlap) / std::abs(overlap);
        }
        out.lambdas.push_back(std::move(lam));
        out.vectors.push_back(std::move(vec));
        out.min_gap.push_back(min_pairwise_gap(out.lambdas.back()));
        out.vec_cond.push_back(condition_number(out.vectors.back()));
    }
    return out;
}

ScalarPath EigenPath::alpha_max() const {
    std::vector<double> v(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) v[m] = lambdas[m].real().maxCoeff();
    return ScalarPath(grid, std::move(v));
}

MatrixPath path_derivative(const MatrixPath& path) {
    if (path.size() < 3)
        throw InvalidInputError("path_derivative: need at least 3 grid points");
    const std::size_t m = path.size();
    std::vector<Cmat> d(m);

    // Three-point stencils on a possibly slightly nonuniform grid.
    auto h = [&path](std::size_t i) { return path.grid[i + 1] - path.grid[i]; };
    {
        const double h0 = h(0), h1 = h(1);
        d[0] = (-(2.0 * h0 + h1) / (h0 * (h0 + h1))) * path.values[0] +
               ((h0 + h1) / (h0 * h1)) * path.values[1] +
               (-h0 / (h1 * (h0 + h1))) * path.values[2];
    }
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double hl = h(i - 1), hr = h(i);
        d[i] = (-hr / (hl * (hl + hr))) * path.values[i - 1] +
               ((hr - hl) / (hl * hr)) * path.values[i] +
               (hl / (hr * (hl + hr))) * path.values[i + 1];
    }
    {
        const double h0 = h(m - 2), h1 = h(m - 3);
        d[m - 1] = ((2.0 * h0 + h1) / (h0 * (h0 + h1))) * path.values[m - 1] +
                   (-(h0 + h1) / (h0 * h1)) * path.values[m - 2] +
                   (h0 / (h1 * (h0 + h1))) * path.values[m - 3];
    }
    return MatrixPath(path.grid, std::move(d));
}

} // namespace auxbound
