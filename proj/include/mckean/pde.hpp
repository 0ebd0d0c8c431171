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
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mckean/measures.hpp"

namespace mckean {

struct StabilityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PositivityLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonmonotoneEnergy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scheme { explicit_upwind, semi_implicit };

/// Time-stepping configuration for the nonlinear Fokker-Planck evolution.
/// The explicit scheme declares the CFL bound dt <= 0.4 min(dx^2/eps,
/// dx/max|b|), re-checked each step against the current drift; the
/// semi-implicit scheme is unconditionally stable.
struct SolverConfig {
    double eps;
    double dt;
    double t_end;
    Scheme scheme = Scheme::semi_implicit;
    int record_every = 20;

    double eta_tol = 1e-7;        // convergence detector on the interface flux residual
    double fe_window_tol = 1e-12; // and on the free-energy decrement per record
    double monotone_tol = 1e-9;   // allowed free-energy increase before NonmonotoneEnergy
    int moment_count = 4;
    bool store_snapshots = false;
    bool detect_convergence = true;

    SolverConfig(double eps_, double dt_, double t_end_, Scheme scheme_ = Scheme::semi_implicit,
                 int record_every_ = 20)
        : eps(eps_), dt(dt_), t_end(t_end_), scheme(scheme_), record_every(record_every_) {
        if (!(eps > 0.0)) throw std::invalid_argument("SolverConfig: eps must be positive");
        if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be positive");
        if (!(t_end >= 0.0)) throw std::invalid_argument("SolverConfig: t_end must be nonnegative");
        if (record_every < 1) throw std::invalid_argument("SolverConfig: record_every must be >= 1");
    }
};

enum class RunStatus { finished, converged };

/// Sampled history of one evolution: free energy xi(t), the dissipation
/// integral of eta^2/u, and the leading moments; plus the final density.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> free_energy;
    std::vector<double> dissipation;
    std::vector<MomentVector> moment_history;
    std::vector<double> mass_history;
    std::vector<double> flux_residual_history;
    std::vector<GridDensity> snapshots;  // only when store_snapshots
    GridDensity final_density;
    RunStatus status = RunStatus::finished;
};

namespace pde_detail {

/// Bernoulli function w / (e^w - 1), the exponential-fitting weight.
inline double bernoulli(double w) {
    const double aw = std::abs(w);
    if (aw < 1e-5) return 1.0 - 0.5 * w + w * w / 12.0;
    if (w > 700.0) return 0.0;
    return w / std::expm1(w);
}

/// Effective potential W = V + F*u with the interaction frozen at the current
/// moments of u.
inline Polynomial effective_potential(const std::vector<double>& values, const Grid& g,
                                      const ConfiningPotential& V, const InteractionPotential& F) {
    GridDensity u(g, values);
    const MomentVector mom = moments(u, F.poly.degree());
    return V.poly + convolve_with_moments(F.poly, mom.m);
}

struct FluxCoefficients {
    // flux_{i+1/2} = (D/dx) * (up[i] * u_{i+1} - dn[i] * u_i), i = 0..n-2
    std::vector<double> up, dn;
    double d_over_dx;
    double max_drift;  // max |W(x_{i+1}) - W(x_i)| / dx
};

inline FluxCoefficients flux_coefficients(const Grid& g, const Polynomial& W, double eps) {
    const int n = g.n();
    const double D = 0.5 * eps;
    const double dx = g.dx();
    FluxCoefficients fc;
    fc.up.resize(static_cast<std::size_t>(n - 1));
    fc.dn.resize(static_cast<std::size_t>(n - 1));
    fc.d_over_dx = D / dx;
    fc.max_drift = 0.0;
    double wl = W(g.x(0));
    for (int i = 0; i < n - 1; ++i) {
        const double wr = W(g.x(i + 1));
        const double w = (wr - wl) / D;
        fc.up[static_cast<std::size_t>(i)] = bernoulli(-w);
        fc.dn[static_cast<std::size_t>(i)] = bernoulli(w);
        fc.max_drift = std::max(fc.max_drift, std::abs(wr - wl) / dx);
        wl = wr;
    }
    return fc;
}

/// Clamp sub-roundoff negatives to zero; anything bigger means the step lost
/// positivity for real.
inline void enforce_positivity(std::vector<double>& v, const Grid& g) {
    double undershoot = 0.0;
    for (double x : v) undershoot = std::min(undershoot, x);
    if (undershoot < -1e-12)
        throw PositivityLoss("density undershoot " + std::to_string(undershoot) + " exceeds 1e-12");
    if (undershoot < 0.0) {
        for (double& x : v) x = std::max(x, 0.0);
        const double m = trapezoid(g, v);
        for (double& x : v) x /= m;
    }
}

}  // namespace pde_detail

/// The flux eta = (eps/2) du/dx + u (V' + F'*u), evaluated per node with
/// centered differences inside and one-sided differences at the boundary.
/// eta vanishes identically exactly at stationary measures.
inline std::vector<double> eta(const GridDensity& u, const ConfiningPotential& V, const InteractionPotential& F,
                               double eps) {
    const Grid& g = u.grid();
    const int n = g.n();
    const double dx = g.dx();
    const MomentVector mom = moments(u, F.dpoly.degree());
    const Polynomial conv_dF = convolve_with_moments(F.dpoly, mom.m);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double du;
        if (i == 0)
            du = (u[1] - u[0]) / dx;
        else if (i == n - 1)
            du = (u[n - 1] - u[n - 2]) / dx;
        else
            du = (u[i + 1] - u[i - 1]) / (2.0 * dx);
        const double x = g.x(i);
        out[static_cast<std::size_t>(i)] = 0.5 * eps * du + u[i] * (V.dV(x) + conv_dF(x));
    }
    return out;
}

inline double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// The scheme-consistent discrete flux at the n-1 cell interfaces. This is
/// the quantity the stepper drives to zero: it vanishes to roundoff exactly
/// at the discrete Gibbs state of the current effective potential, so its sup
/// norm certifies stationarity independently of how a candidate was produced.
/// (The node-centered eta above carries an O(dx^2) differencing floor and is
/// kept for the dissipation diagnostics.)
inline std::vector<double> flux_residual(const GridDensity& u, const ConfiningPotential& V,
                                         const InteractionPotential& F, double eps) {
    const Grid& g = u.grid();
    const Polynomial W = pde_detail::effective_potential(u.values(), g, V, F);
    const pde_detail::FluxCoefficients fc = pde_detail::flux_coefficients(g, W, eps);
    std::vector<double> out(static_cast<std::size_t>(g.n() - 1));
    for (int i = 0; i + 1 < g.n(); ++i)
        out[static_cast<std::size_t>(i)] = fc.d_over_dx * (fc.up[static_cast<std::size_t>(i)] * u[i + 1] -
                                                           fc.dn[static_cast<std::size_t>(i)] * u[i]);
    return out;
}

/// CFL time step for the explicit scheme: 0.4 min(dx^2/eps, dx/max|b|).
inline double cfl_dt(const Grid& g, double eps, double max_drift) {
    const double dx = g.dx();
    double dt = 0.4 * dx * dx / eps;
    if (max_drift > 0.0) dt = std::min(dt, 0.4 * dx / max_drift);
    return dt;
}

/// Max |V' + F'*u| over the grid for the current density; the advective scale
/// entering the CFL rule.
inline double max_drift(const GridDensity& u, const ConfiningPotential& V, const InteractionPotential& F) {
    const Grid& g = u.grid();
    const MomentVector mom = moments(u, F.dpoly.degree());
    const Polynomial conv_dF = convolve_with_moments(F.dpoly, mom.m);
    double m = 0.0;
    for (int i = 0; i < g.n(); ++i) m = std::max(m, std::abs(V.dV(g.x(i)) + conv_dF(g.x(i))));
    return m;
}

/// One step of the granular-media equation in conservative flux form with
/// zero-flux boundaries. The flux is exponentially fitted (Chang-Cooper
/// style), so the discrete Gibbs state of the frozen effective potential is an
/// exact fixed point; the interaction enters through moments frozen once per
/// step. Mass is conserved to roundoff.
inline GridDensity step(const GridDensity& u, const SolverConfig& cfg, const ConfiningPotential& V,
                        const InteractionPotential& F) {
    using namespace pde_detail;
    const Grid& g = u.grid();
    const int n = g.n();

    const Polynomial W = effective_potential(u.values(), g, V, F);
    const FluxCoefficients fc = flux_coefficients(g, W, cfg.eps);

    std::vector<double> out(static_cast<std::size_t>(n));
    if (cfg.scheme == Scheme::explicit_upwind) {
        const double dt_max = cfl_dt(g, cfg.eps, fc.max_drift);
        if (cfg.dt > dt_max)
            throw StabilityViolation("dt = " + std::to_string(cfg.dt) + " exceeds CFL bound " +
                                     std::to_string(dt_max));
        double flux_left = 0.0;
        for (int i = 0; i < n; ++i) {
            const double flux_right =
                (i == n - 1) ? 0.0
                             : fc.d_over_dx * (fc.up[static_cast<std::size_t>(i)] * u[i + 1] -
                                               fc.dn[static_cast<std::size_t>(i)] * u[i]);
            out[static_cast<std::size_t>(i)] = u[i] + cfg.dt / g.weight(i) * (flux_right - flux_left);
            flux_left = flux_right;
        }
    } else {
        // Backward Euler on the frozen-coefficient operator: tridiagonal
        // M-matrix, solved by the Thomas algorithm. Unconditionally positive
        // and mass-conservative.
        std::vector<double> diag(static_cast<std::size_t>(n)), upper(static_cast<std::size_t>(n) - 1),
            lower(static_cast<std::size_t>(n) - 1), rhs = u.values();
        for (int i = 0; i < n; ++i) {
            const double scale = cfg.dt / g.weight(i) * fc.d_over_dx;
            double d = 1.0;
            if (i < n - 1) {
                d += scale * fc.dn[static_cast<std::size_t>(i)];
                upper[static_cast<std::size_t>(i)] = -scale * fc.up[static_cast<std::size_t>(i)];
            }
            if (i > 0) {
                d += scale * fc.up[static_cast<std::size_t>(i - 1)];
                lower[static_cast<std::size_t>(i - 1)] = -scale * fc.dn[static_cast<std::size_t>(i - 1)];
            }
            diag[static_cast<std::size_t>(i)] = d;
        }
        for (int i = 1; i < n; ++i) {
            const double w = lower[static_cast<std::size_t>(i - 1)] / diag[static_cast<std::size_t>(i - 1)];
            diag[static_cast<std::size_t>(i)] -= w * upper[static_cast<std::size_t>(i - 1)];
            rhs[static_cast<std::size_t>(i)] -= w * rhs[static_cast<std::size_t>(i - 1)];
        }
        out[static_cast<std::size_t>(n - 1)] = rhs[static_cast<std::size_t>(n - 1)] / diag[static_cast<std::size_t>(n - 1)];
        for (int i = n - 2; i >= 0; --i)
            out[static_cast<std::size_t>(i)] = (rhs[static_cast<std::size_t>(i)] -
                                                upper[static_cast<std::size_t>(i)] * out[static_cast<std::size_t>(i + 1)]) /
                                               diag[static_cast<std::size_t>(i)];
    }

    enforce_positivity(out, g);
    return GridDensity(g, std::move(out));
}

/// Evolves u0 until t_end, recording free energy, dissipation and moments
/// every record_every steps. Stops early (status converged) once max|eta| and
/// the free-energy decrement both drop below the configured tolerances.
/// Throws NonmonotoneEnergy if the recorded free energy ever rises beyond the
/// scheme tolerance.
inline TrajectoryRecord evolve(const GridDensity& u0, const SolverConfig& cfg, const ConfiningPotential& V,
                               const InteractionPotential& F) {
    GridDensity u = u0;
    const long steps = std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-12));

    TrajectoryRecord rec{.times = {},
                         .free_energy = {},
                         .dissipation = {},
                         .moment_history = {},
                         .mass_history = {},
                         .flux_residual_history = {},
                         .snapshots = {},
                         .final_density = u0,
                         .status = RunStatus::finished};

    auto record = [&](double t) -> bool {
        const std::vector<double> et = eta(u, V, F, cfg.eps);
        const double eta_sup = sup_norm(flux_residual(u, V, F, cfg.eps));
        double diss = 0.0;
        {
            const Grid& g = u.grid();
            std::vector<double> integrand(static_cast<std::size_t>(g.n()), 0.0);
            for (int i = 0; i < g.n(); ++i)
                if (u[i] > 0.0)
                    integrand[static_cast<std::size_t>(i)] =
                        et[static_cast<std::size_t>(i)] * et[static_cast<std::size_t>(i)] / u[i];
            diss = trapezoid(g, integrand);
        }
        const FreeEnergyBreakdown fe = free_energy(u, V, F, cfg.eps);
        if (!rec.free_energy.empty() && fe.total > rec.free_energy.back() + cfg.monotone_tol)
            throw NonmonotoneEnergy("free energy rose by " + std::to_string(fe.total - rec.free_energy.back()) +
                                    " at t = " + std::to_string(t));
        const bool settled = cfg.detect_convergence && !rec.free_energy.empty() && eta_sup < cfg.eta_tol &&
                             std::abs(fe.total - rec.free_energy.back()) < cfg.fe_window_tol;
        rec.times.push_back(t);
        rec.free_energy.push_back(fe.total);
        rec.dissipation.push_back(diss);
        rec.moment_history.push_back(moments(u, cfg.moment_count));
        rec.mass_history.push_back(u.mass());
        rec.flux_residual_history.push_back(eta_sup);
        if (cfg.store_snapshots) rec.snapshots.push_back(u);
        return settled;
    };

    record(0.0);
    for (long k = 1; k <= steps; ++k) {
        u = step(u, cfg, V, F);
        if (k % cfg.record_every == 0 || k == steps) {
            if (record(static_cast<double>(k) * cfg.dt)) {
                rec.status = RunStatus::converged;
                break;
            }
        }
    }
    rec.final_density = u;
    return rec;
}

/// Comparison of the finite-difference slope of xi(t) against the recorded
/// dissipation integral. max_violation is the largest amount by which
/// xi' <= -integral(eta^2/u) fails over the interior samples; nonpositive
/// values mean the inequality held everywhere.
struct DissipationReport {
    double max_violation = 0.0;
    std::vector<double> violations;  // per interior sample
};

inline DissipationReport dissipation_check(const TrajectoryRecord& rec) {
    if (rec.times.size() < 3) throw std::invalid_argument("dissipation_check: need at least 3 samples");
    DissipationReport out;
    out.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < rec.times.size(); ++k) {
        const double dtw = rec.times[k + 1] - rec.times[k - 1];
        const double slope = (rec.free_energy[k + 1] - rec.free_energy[k - 1]) / dtw;
        const double viol = slope + rec.dissipation[k];
        out.violations.push_back(viol);
        out.max_violation = std::max(out.max_violation, viol);
    }
    return out;
}

}  // namespace mckean
