#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "auxbound/errors.hpp"

namespace auxbound {

using Complex = std::complex<double>;
using Cmat = Eigen::MatrixXcd;
using Cvec = Eigen::VectorXcd;
using Rmat = Eigen::MatrixXd;
using Rvec = Eigen::VectorXd;

/// Scalar function of time sampled on a grid, evaluated between samples by
/// linear interpolation. Duplicated abscissae encode jump discontinuities
/// (left sample = left limit, right sample = right limit).
struct ScalarPath {
    std::vector<double> grid;
    std::vector<double> values;

    ScalarPath() = default;
    ScalarPath(std::vector<double> g, std::vector<double> v);

    std::size_t size() const { return grid.size(); }
    double t_begin() const { return grid.front(); }
    double t_end() const { return grid.back(); }

    /// Piecewise-linear value at t (clamped to the covered span).
    double operator()(double t) const;

    /// Cumulative trapezoid integral from the first grid point.
    ScalarPath cumulative_integral() const;

    /// Trapezoid integral over the whole span divided by the span length.
    double average() const;
    /// Same, restricted to [t_begin, t_cut].
    double average_until(double t_cut) const;
    /// Average over [t_from, t_end].
    double average_from(double t_from) const;

    double max_value() const;
    double min_value() const;
    /// Index of the maximal sample.
    std::size_t argmax() const;

    static ScalarPath constant(const std::vector<double>& grid, double value);
    static ScalarPath sampled(const std::vector<double>& grid,
                              const std::function<double(double)>& f);
    /// Pointwise map of another path's samples.
    static ScalarPath map(const ScalarPath& a, const std::function<double(double)>& f);
};

/// Square-matrix function of time sampled on a strictly increasing grid.
struct MatrixPath {
    std::vector<double> grid;
    std::vector<Cmat> values;

    MatrixPath() = default;
    MatrixPath(std::vector<double> g, std::vector<Cmat> v);

    std::size_t size() const { return grid.size(); }
    Eigen::Index dim() const { return values.empty() ? 0 : values.front().rows(); }
    double t_begin() const { return grid.front(); }
    double t_end() const { return grid.back(); }

    /// Per-entry linear interpolation at t (clamped to the covered span).
    Cmat operator()(double t) const;

    static MatrixPath sampled(const std::vector<double>& grid,
                              const std::function<Cmat(double)>& f);
    static MatrixPath sampled_real(const std::vector<double>& grid,
                                   const std::function<Rmat(double)>& f);
};

/// Uniform grid of n_points samples covering [t0, t1].
std::vector<double> uniform_grid(double t0, double t1, std::size_t n_points);
/// Uniform grid with step at most `step` (endpoint included exactly).
std::vector<double> uniform_grid_step(double t0, double t1, double step);

/// Index of the last grid point <= t (clamped to [0, size-2] for segments).
std::size_t segment_index(const std::vector<double>& grid, double t);

namespace detail {
void require_grid(const std::vector<double>& grid, std::size_t min_points,
                  const char* what, bool strictly_increasing = true);
}

} // namespace auxbound
