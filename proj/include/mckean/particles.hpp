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

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mckean/grid.hpp"
#include "mckean/measures.hpp"
#include "mckean/potentials.hpp"
#include "mckean/rng.hpp"

namespace mckean {

struct NumericalBlowup : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// N particle positions plus the deterministic RNG cursor: noise for step k
/// and particle i is Philox(seed, k+1, i), so trajectories are bit-for-bit
/// reproducible. Stream 0 is reserved for drawing the initial cloud.
struct ParticleState {
    std::vector<double> positions;
    double t = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t step_index = 0;
};

/// Initial law: either a density sampled by inverse CDF or an explicit cloud.
using InitialLaw = std::variant<GridDensity, std::vector<double>>;

struct ParticleConfig {
    int n_particles;
    double eps;
    double dt;
    double t_end;
    std::uint64_t seed = 0;
    int record_every = 50;
    double blowup_guard = 1e6;
    double kde_bandwidth = 0.0;  // 0 -> Silverman's rule

    ParticleConfig(int n, double eps_, double dt_, double t_end_) : n_particles(n), eps(eps_), dt(dt_), t_end(t_end_) {
        if (n < 2) throw std::invalid_argument("ParticleConfig: need at least 2 particles");
        if (!(dt > 0.0)) throw std::invalid_argument("ParticleConfig: dt must be positive");
        if (!(eps >= 0.0)) throw std::invalid_argument("ParticleConfig: eps must be nonnegative");
    }
};

/// Empirical power sums S_k = (1/N) sum_j x_j^k, k = 0..K.
inline std::vector<double> power_sums(const std::vector<double>& xs, int K) {
    std::vector<double> s(static_cast<std::size_t>(K) + 1, 0.0);
    for (double x : xs) {
        double p = 1.0;
        s[0] += 1.0;
        for (int k = 1; k <= K; ++k) {
            p *= x;
            s[static_cast<std::size_t>(k)] += p;
        }
    }
    const double inv = 1.0 / static_cast<double>(xs.size());
    for (double& v : s) v *= inv;
    return s;
}

/// Drift -V'(x_i) - (1/N) sum_j F'(x_i - x_j) for every particle. Since F' is
/// an odd polynomial, the pair sum collapses to a polynomial in x_i whose
/// coefficients are built from the empirical power sums, giving O(N deg F)
/// instead of O(N^2). The sum includes j = i; F'(0) = 0 makes it vanish.
inline std::vector<double> drift_all(const std::vector<double>& positions, const ConfiningPotential& V,
                                     const InteractionPotential& F) {
    const std::vector<double> s = power_sums(positions, F.dpoly.degree());
    const Polynomial mean_force = convolve_with_moments(F.dpoly, s);
    std::vector<double> out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) out[i] = -(V.dV(positions[i]) + mean_force(positions[i]));
    return out;
}

/// One Euler-Maruyama step: x += drift dt + sqrt(eps dt) xi with iid standard
/// normals from the per-particle substream. Throws NumericalBlowup when any
/// position escapes the guard (dt too coarse for the potential growth).
inline ParticleState em_step(const ParticleState& state, const ParticleConfig& cfg, const ConfiningPotential& V,
                             const InteractionPotential& F) {
    ParticleState next = state;
    const std::vector<double> drift = drift_all(state.positions, V, F);
    const double noise_scale = std::sqrt(cfg.eps * cfg.dt);
    for (std::size_t i = 0; i < next.positions.size(); ++i) {
        double xi = 0.0;
        if (cfg.eps > 0.0) xi = standard_normal(state.seed, state.step_index + 1, static_cast<std::uint64_t>(i));
        next.positions[i] += drift[i] * cfg.dt + noise_scale * xi;
        if (!(std::abs(next.positions[i]) <= cfg.blowup_guard))
            throw NumericalBlowup("particle " + std::to_string(i) + " escaped to " +
                                  std::to_string(next.positions[i]) + " at t = " + std::to_string(state.t));
    }
    next.t += cfg.dt;
    next.step_index += 1;
    return next;
}

/// Discrete analogue of the free-energy potential:
/// (1/N) sum_j V(x_j) + (1/2N^2) sum_i sum_j F(x_i - x_j), by direct double
/// sum. For deg F <= 4 the value is cross-checked against the power-sum route.
inline double upsilon_N(const std::vector<double>& xs, const ConfiningPotential& V, const InteractionPotential& F) {
    if (xs.empty()) throw std::invalid_argument("upsilon_N: empty configuration");
    const double n = static_cast<double>(xs.size());
    double conf = 0.0;
    for (double x : xs) conf += V(x);
    conf /= n;
    double inter = 0.0;
    for (double xi : xs)
        for (double xj : xs) inter += F(xi - xj);
    inter /= 2.0 * n * n;
    const double direct = conf + inter;
    if (F.poly.degree() <= 4) {
        const std::vector<double> s = power_sums(xs, F.poly.degree());
        const Polynomial conv = convolve_with_moments(F.poly, s);
        double fast = 0.0;
        for (double x : xs) fast += conv(x);
        fast = conf + 0.5 * fast / n;
        if (std::abs(fast - direct) > 1e-8 * std::max(1.0, std::abs(direct)))
            throw std::logic_error("upsilon_N: power-sum cross-check failed");
    }
    return direct;
}

/// Power-sum route only; exact for polynomial F, O(N deg F). Used by the
/// recorder at large N.
inline double upsilon_N_fast(const std::vector<double>& xs, const ConfiningPotential& V,
                             const InteractionPotential& F) {
    const double n = static_cast<double>(xs.size());
    const std::vector<double> s = power_sums(xs, F.poly.degree());
    const Polynomial conv = convolve_with_moments(F.poly, s);
    double acc = 0.0;
    for (double x : xs) acc += V(x) + 0.5 * conv(x);
    return acc / n;
}

/// Draws N samples from a grid density by inverse CDF, addressed through RNG
/// stream 0 so the cloud is reproducible.
inline std::vector<double> sample_density(const GridDensity& u, int n, std::uint64_t seed) {
    const CumulativeDistribution cdf(u);
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto [b0, b1] = Philox2x64::block(seed, 0, static_cast<std::uint64_t>(i));
        (void)b1;
        xs[static_cast<std::size_t>(i)] = cdf.quantile(uniform01(b0));
    }
    return xs;
}

/// Gaussian kernel density of a cloud on a grid. bandwidth 0 selects
/// Silverman's rule 0.9 min(sigma, IQR/1.34) N^{-1/5}.
inline GridDensity kde_density(const std::vector<double>& xs, const Grid& grid, double bandwidth = 0.0) {
    if (xs.size() < 2) throw std::invalid_argument("kde_density: need at least 2 points");
    double h = bandwidth;
    if (h <= 0.0) {
        const double n = static_cast<double>(xs.size());
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= n;
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= (n - 1.0);
        std::vector<double> sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        const double q1 = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
        const double q3 = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
        const double spread = std::min(std::sqrt(var), (q3 - q1) / 1.34);
        h = 0.9 * spread * std::pow(n, -0.2);
        if (!(h > 0.0)) h = grid.dx();
    }
    std::vector<double> vals(static_cast<std::size_t>(grid.n()), 0.0);
    const double cut = 8.0 * h;
    for (double x : xs) {
        const int i_lo = std::max(0, static_cast<int>(std::floor((x - cut - grid.lo()) / grid.dx())));
        const int i_hi = std::min(grid.n() - 1, static_cast<int>(std::ceil((x + cut - grid.lo()) / grid.dx())));
        for (int i = i_lo; i <= i_hi; ++i) {
            const double z = (grid.x(i) - x) / h;
            vals[static_cast<std::size_t>(i)] += std::exp(-0.5 * z * z);
        }
    }
    return GridDensity::normalized(grid, std::move(vals));
}

/// Sampled history of a particle run: empirical moments m1..m4 and the
/// discrete potential, plus the final cloud and its kernel-density estimate.
struct ParticleRecord {
    std::vector<double> times;
    std::vector<std::array<double, 4>> moment_history;
    std::vector<double> upsilon;
    ParticleState final_state;
    std::vector<GridDensity> kde_snapshots;  // empty unless a grid is supplied
};

inline std::array<double, 4> empirical_moments(const std::vector<double>& xs) {
    const std::vector<double> s = power_sums(xs, 4);
    return {s[1], s[2], s[3], s[4]};
}

/// Runs the mean-field system with Euler-Maruyama. If kde_grid is non-null, a
/// kernel-density snapshot of the final cloud is appended for comparison with
/// the PDE solution.
inline ParticleRecord run_particles(const ParticleConfig& cfg, const InitialLaw& u0, const ConfiningPotential& V,
                                    const InteractionPotential& F, const Grid* kde_grid = nullptr) {
    ParticleState state;
    state.seed = cfg.seed;
    if (std::holds_alternative<GridDensity>(u0))
        state.positions = sample_density(std::get<GridDensity>(u0), cfg.n_particles, cfg.seed);
    else {
        state.positions = std::get<std::vector<double>>(u0);
        if (static_cast<int>(state.positions.size()) != cfg.n_particles)
            throw std::invalid_argument("run_particles: cloud size does not match n_particles");
    }

    ParticleRecord rec;
    auto record = [&]() {
        rec.times.push_back(state.t);
        rec.moment_history.push_back(empirical_moments(state.positions));
        rec.upsilon.push_back(upsilon_N_fast(state.positions, V, F));
    };
    record();
    const long steps = std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-12));
    for (long k = 1; k <= steps; ++k) {
        state = em_step(state, cfg, V, F);
        if (k % cfg.record_every == 0 || k == steps) record();
    }
    rec.final_state = state;
    if (kde_grid != nullptr) rec.kde_snapshots.push_back(kde_density(state.positions, *kde_grid, cfg.kde_bandwidth));
    return rec;
}

}  // namespace mckean
