/*
   Copyright 2026 The mckean-lab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace mckean {

/// Uniform grid on [-L, L], symmetric about 0. Node i mirrors node n-1-i
/// exactly in floating point: x(i) = (2i - (n-1)) * c with integer prefactor,
/// so negation is bit-exact and symmetric densities stay representable.
class Grid {
  public:
    Grid(double half_width, int n) : n_(n), c_(half_width / (n - 1)) {
        if (!(half_width > 0.0)) throw std::invalid_argument("Grid: half_width must be positive");
        if (n < 16) throw std::invalid_argument("Grid: need at least 16 nodes");
    }

    int n() const { return n_; }
    double x(int i) const { return static_cast<double>(2 * i - (n_ - 1)) * c_; }
    double dx() const { return 2.0 * c_; }
    double lo() const { return x(0); }
    double hi() const { return x(n_ - 1); }

    /// Trapezoid weight of node i.
    double weight(int i) const { return (i == 0 || i == n_ - 1) ? c_ : 2.0 * c_; }

    friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_ && a.c_ == b.c_; }

  private:
    int n_;
    double c_;
};

/// Trapezoid quadrature of per-node values, summed over mirror pairs so that
/// mirror-symmetric integrands cancel (or agree) exactly.
inline double trapezoid(const Grid& g, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != g.n()) throw std::invalid_argument("trapezoid: size mismatch");
    const int n = g.n();
    double acc = 0.0;
    for (int i = 0, j = n - 1; i < j; ++i, --j) acc += g.weight(i) * (values[i] + values[j]);
    if (n % 2 == 1) acc += g.weight(n / 2) * values[n / 2];
    return acc;
}

/// Probability density sampled on a symmetric grid: nonnegative values with
/// unit trapezoid mass (within 1e-8).
class GridDensity {
  public:
    GridDensity(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != grid_.n()) throw std::invalid_argument("GridDensity: size mismatch");
        for (double v : values_)
            if (!(v >= 0.0)) throw std::invalid_argument("GridDensity: negative or NaN value");
        const double m = trapezoid(grid_, values_);
        if (std::abs(m - 1.0) > 1e-8) throw std::invalid_argument("GridDensity: mass deviates from 1 beyond 1e-8");
    }

    /// Builds a density from raw nonnegative samples by normalizing their
    /// trapezoid mass to 1.
    static GridDensity normalized(const Grid& grid, std::vector<double> raw) {
        for (double& v : raw) {
            if (!std::isfinite(v)) throw std::invalid_argument("GridDensity: non-finite sample");
            if (v < 0.0) throw std::invalid_argument("GridDensity: negative sample");
        }
        const double m = trapezoid(grid, raw);
        if (!(m > 0.0)) throw std::invalid_argument("GridDensity: zero mass");
        for (double& v : raw) v /= m;
        return GridDensity(grid, std::move(raw));
    }

    static GridDensity from_function(const Grid& grid, const std::function<double(double)>& f) {
        std::vector<double> raw(static_cast<std::size_t>(grid.n()));
        for (int i = 0; i < grid.n(); ++i) raw[static_cast<std::size_t>(i)] = f(grid.x(i));
        return normalized(grid, std::move(raw));
    }

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    int n() const { return grid_.n(); }

    double mass() const { return trapezoid(grid_, values_); }

  private:
    Grid grid_;
    std::vector<double> values_;
};

inline GridDensity gaussian_density(const Grid& grid, double mean, double stddev) {
    if (!(stddev > 0.0)) throw std::invalid_argument("gaussian_density: stddev must be positive");
    return GridDensity::from_function(grid, [&](double x) {
        const double z = (x - mean) / stddev;
        return std::exp(-0.5 * z * z);
    });
}

/// Weighted Gaussian mixture, normalized on the grid.
inline GridDensity mixture_density(const Grid& grid, const std::vector<double>& means,
                                   const std::vector<double>& stddevs, const std::vector<double>& weights) {
    if (means.size() != stddevs.size() || means.size() != weights.size() || means.empty())
        throw std::invalid_argument("mixture_density: component lists must match and be nonempty");
    return GridDensity::from_function(grid, [&](double x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < means.size(); ++k) {
            const double z = (x - means[k]) / stddevs[k];
            acc += weights[k] / stddevs[k] * std::exp(-0.5 * z * z);
        }
        return acc;
    });
}

inline GridDensity uniform_density(const Grid& grid, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("uniform_density: need lo < hi");
    return GridDensity::from_function(grid, [&](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

inline GridDensity triangle_density(const Grid& grid, double center, double half_width) {
    if (!(half_width > 0.0)) throw std::invalid_argument("triangle_density: half_width must be positive");
    return GridDensity::from_function(
        grid, [&](double x) { return std::max(0.0, 1.0 - std::abs(x - center) / half_width); });
}

/// Piecewise-linear CDF of a grid density (cumulative trapezoid rule),
/// normalized to end at exactly 1. quantile() inverts it by binary search and
/// linear interpolation; used to draw particle clouds from a density.
class CumulativeDistribution {
  public:
    explicit CumulativeDistribution(const GridDensity& u) : grid_(u.grid()), cdf_(static_cast<std::size_t>(u.n())) {
        cdf_[0] = 0.0;
        const double dx = grid_.dx();
        for (int i = 1; i < grid_.n(); ++i)
            cdf_[static_cast<std::size_t>(i)] =
                cdf_[static_cast<std::size_t>(i - 1)] + 0.5 * dx * (u[i - 1] + u[i]);
        const double total = cdf_.back();
        if (!(total > 0.0)) throw std::invalid_argument("CumulativeDistribution: zero mass");
        for (double& v : cdf_) v /= total;
        cdf_.back() = 1.0;
    }

    double quantile(double p) const {
        if (p <= 0.0) return grid_.x(0);
        if (p >= 1.0) return grid_.x(grid_.n() - 1);
        int lo = 0, hi = grid_.n() - 1;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            if (cdf_[static_cast<std::size_t>(mid)] < p)
                lo = mid;
            else
                hi = mid;
        }
        const double c0 = cdf_[static_cast<std::size_t>(lo)];
        const double c1 = cdf_[static_cast<std::size_t>(hi)];
        const double t = (c1 > c0) ? (p - c0) / (c1 - c0) : 0.5;
        return grid_.x(lo) + t * (grid_.x(hi) - grid_.x(lo));
    }

  private:
    Grid grid_;
    std::vector<double> cdf_;
};

}  // namespace mckean
