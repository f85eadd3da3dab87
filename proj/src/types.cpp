#include "auxbound/types.hpp"

#include <algorithm>
#include <cmath>

namespace auxbound {

namespace detail {

void require_grid(const std::vector<double>& grid, std::size_t min_points,
                  const char* what, bool strictly_increasing) {
    if (grid.size() < min_points)
        throw InvalidInputError(std::string(what) + ": grid needs at least " +
                                std::to_string(min_points) + " points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw InvalidInputError(std::string(what) + ": non-finite grid point");
        const bool ok = strictly_increasing ? grid[i] < grid[i + 1] : grid[i] <= grid[i + 1];
        if (!ok)
            throw InvalidInputError(std::string(what) + ": grid not increasing at index " +
                                    std::to_string(i));
    }
    if (!std::isfinite(grid.back()))
        throw InvalidInputError(std::string(what) + ": non-finite grid point");
}

} // namespace detail

ScalarPath::ScalarPath(std::vector<double> g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    // Nondecreasing: duplicated abscissae are allowed (jump representation).
    detail::require_grid(grid, 2, "ScalarPath", /*strictly_increasing=*/false);
    if (grid.size() != values.size())
        throw InvalidInputError("ScalarPath: grid/value size mismatch");
}

std::size_t segment_index(const std::vector<double>& grid, double t) {
    if (t <= grid.front()) return 0;
    if (t >= grid.back()) return grid.size() - 2;
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    return std::min(i, grid.size() - 2);
}

double ScalarPath::operator()(double t) const {
    if (t <= grid.front()) return values.front();
    if (t >= grid.back()) return values.back();
    std::size_t i = segment_index(grid, t);
    const double h = grid[i + 1] - grid[i];
    if (h <= 0.0) return values[i + 1]; // jump point: right limit
    const double w = (t - grid[i]) / h;
    return (1.0 - w) * values[i] + w * values[i + 1];
}

ScalarPath ScalarPath::cumulative_integral() const {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    return ScalarPath(grid, std::move(out));
}

double ScalarPath::average() const {
    const double span = grid.back() - grid.front();
    if (span <= 0.0) throw InvalidInputError("ScalarPath::average: zero span");
    double acc = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i)
        acc += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    return acc / span;
}

double ScalarPath::average_until(double t_cut) const {
    const double span = t_cut - grid.front();
    if (span <= 0.0) throw InvalidInputError("ScalarPath::average_until: empty span");
    double acc = 0.0;
    for (std::size_t i = 1; i < values.size() && grid[i - 1] < t_cut; ++i) {
        const double a = grid[i - 1];
        const double b = std::min(grid[i], t_cut);
        acc += 0.5 * ((*this)(a) + (*this)(b)) * (b - a);
    }
    return acc / span;
}

double ScalarPath::average_from(double t_from) const {
    const double span = grid.back() - t_from;
    if (span <= 0.0) throw InvalidInputError("ScalarPath::average_from: empty span");
    double acc = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (grid[i] <= t_from) continue;
        const double a = std::max(grid[i - 1], t_from);
        const double b = grid[i];
        acc += 0.5 * ((*this)(a) + (*this)(b)) * (b - a);
    }
    return acc / span;
}

double ScalarPath::max_value() const { return *std::max_element(values.begin(), values.end()); }
double ScalarPath::min_value() const { return *std::min_element(values.begin(), values.end()); }

std::size_t ScalarPath::argmax() const {
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) -
                                    values.begin());
}

ScalarPath ScalarPath::constant(const std::vector<double>& grid, double value) {
    return ScalarPath(grid, std::vector<double>(grid.size(), value));
}

ScalarPath ScalarPath::sampled(const std::vector<double>& grid,
                               const std::function<double(double)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return ScalarPath(grid, std::move(v));
}

ScalarPath ScalarPath::map(const ScalarPath& a, const std::function<double(double)>& f) {
    std::vector<double> v(a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) v[i] = f(a.values[i]);
    return ScalarPath(a.grid, std::move(v));
}

MatrixPath::MatrixPath(std::vector<double> g, std::vector<Cmat> v)
    : grid(std::move(g)), values(std::move(v)) {
    detail::require_grid(grid, 2, "MatrixPath");
    if (grid.size() != values.size())
        throw InvalidInputError("MatrixPath: grid/value size mismatch");
    const Eigen::Index n = values.front().rows();
    for (const Cmat& m : values) {
        if (m.rows() != n || m.cols() != n)
            throw InvalidInputError("MatrixPath: matrices must share a square dimension");
        if (!m.allFinite())
            throw InvalidInputError("MatrixPath: non-finite matrix entry");
    }
}

Cmat MatrixPath::operator()(double t) const {
    if (t <= grid.front()) return values.front();
    if (t >= grid.back()) return values.back();
    std::size_t i = segment_index(grid, t);
    const double h = grid[i + 1] - grid[i];
    if (h <= 0.0) return values[i + 1];
    const double w = (t - grid[i]) / h;
    return (1.0 - w) * values[i] + w * values[i + 1];
}

MatrixPath MatrixPath::sampled(const std::vector<double>& grid,
                               const std::function<Cmat(double)>& f) {
    std::vector<Cmat> v;
    v.reserve(grid.size());
    for (double t : grid) v.push_back(f(t));
    return MatrixPath(grid, std::move(v));
}

MatrixPath MatrixPath::sampled_real(const std::vector<double>& grid,
                                    const std::function<Rmat(double)>& f) {
    std::vector<Cmat> v;
    v.reserve(grid.size());
    for (double t : grid) v.push_back(f(t).cast<Complex>());
    return MatrixPath(grid, std::move(v));
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t n_points) {
    if (n_points < 2 || !(t1 > t0))
        throw InvalidInputError("uniform_grid: need t1 > t0 and at least 2 points");
    std::vector<double> g(n_points);
    const double h = (t1 - t0) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) g[i] = t0 + h * static_cast<double>(i);
    g.back() = t1;
    return g;
}

std::vector<double> uniform_grid_step(double t0, double t1, double step) {
    if (!(step > 0.0)) throw InvalidInputError("uniform_grid_step: step must be positive");
    const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / step - 1e-12)) + 1;
    return uniform_grid(t0, t1, std::max<std::size_t>(n, 2));
}

} // namespace auxbound
