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

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mckean/measures.hpp"
#include "mckean/pde.hpp"
#include "mckean/potentials.hpp"

namespace mckean {

struct DegenerateNormalization : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoAdmissibleRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SymmetryClass { symmetric, asymmetric_plus, asymmetric_minus };

inline const char* to_string(SymmetryClass s) {
    switch (s) {
        case SymmetryClass::symmetric: return "sym";
        case SymmetryClass::asymmetric_plus: return "plus";
        case SymmetryClass::asymmetric_minus: return "minus";
    }
    return "?";
}

/// A certified fixed point of the self-consistency map: residual is the final
/// moment-vector change of the damped iteration, eta_norm the independently
/// recomputed sup of the stationarity flux. Both certificates are below their
/// tolerances for every measure returned by fixed_point_solve.
struct StationaryMeasure {
    GridDensity density;
    MomentVector moments;
    FreeEnergyBreakdown free_energy;
    SymmetryClass symmetry;
    double residual;
    double eta_norm;
};

/// Gibbs density for the effective potential W = V + F*u with F*u frozen at
/// the given moments: u = Z^{-1} exp[-(2/eps) W]. min W is subtracted before
/// exponentiating, and the result is normalized by trapezoid quadrature.
inline GridDensity gibbs_density(const MomentVector& mom, const ConfiningPotential& V, const InteractionPotential& F,
                                 double eps, const Grid& grid) {
    if (!(eps > 0.0)) throw std::invalid_argument("gibbs_density: eps must be positive");
    const Polynomial W = V.poly + convolve_with_moments(F.poly, mom.m);
    const int n = grid.n();
    std::vector<double> w(static_cast<std::size_t>(n));
    double wmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double wi = W(grid.x(i));
        if (!std::isfinite(wi))
            throw DegenerateNormalization("effective potential overflows at x = " + std::to_string(grid.x(i)));
        w[static_cast<std::size_t>(i)] = wi;
        wmin = std::min(wmin, wi);
    }
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = std::exp(-2.0 / eps * (w[static_cast<std::size_t>(i)] - wmin));
    const double z = trapezoid(grid, vals);
    if (!(z > 1e-300)) throw DegenerateNormalization("normalization constant underflowed: Z = " + std::to_string(z));
    for (double& v : vals) v /= z;
    return GridDensity(grid, std::move(vals));
}

struct FixedPointConfig {
    double damping = 0.5;      // adaptive: halved whenever the residual grows
    double tol = 1e-12;        // sup-norm change of the iterated moment vector
    int max_iter = 2000;
    double eta_tol = 1e-7;     // independent stationarity certificate
    double sym_tol = 1e-9;     // odd-moment threshold for the symmetric class
    int report_moments = 0;    // 0 -> default_moment_count
};

enum class SolveStatus { converged, no_convergence, degenerate };

struct FixedPointOutcome {
    SolveStatus status;
    std::optional<StationaryMeasure> measure;
    double last_residual = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
};

namespace stationary_detail {

inline SymmetryClass classify(const MomentVector& mom, double sym_tol) {
    double odd = 0.0;
    for (int l = 1; l <= mom.order(); l += 2) odd = std::max(odd, std::abs(mom[l]));
    if (odd <= sym_tol) return SymmetryClass::symmetric;
    const double m1 = mom.order() >= 1 ? mom[1] : 0.0;
    if (m1 != 0.0) return m1 > 0.0 ? SymmetryClass::asymmetric_plus : SymmetryClass::asymmetric_minus;
    return mom[3] > 0.0 ? SymmetryClass::asymmetric_plus : SymmetryClass::asymmetric_minus;
}

}  // namespace stationary_detail

/// Damped self-consistent iteration m <- (1-lambda) m + lambda moments(gibbs(m))
/// on the moment vector up to deg F (all the map depends on). On convergence
/// the measure is certified twice: by the final residual and by recomputing
/// the stationarity flux eta through the PDE module.
inline FixedPointOutcome fixed_point_solve(const MomentVector& seed, const ConfiningPotential& V,
                                           const InteractionPotential& F, double eps, const Grid& grid,
                                           const FixedPointConfig& cfg = {}) {
    const int k_iter = F.poly.degree();
    if (seed.order() < k_iter) throw MomentVectorTooShort(k_iter, seed.order());
    for (double v : seed.m)
        if (!std::isfinite(v)) throw std::invalid_argument("fixed_point_solve: non-finite seed moment");

    std::vector<double> cur(seed.m.begin(), seed.m.begin() + k_iter + 1);
    double lambda = cfg.damping;
    double prev_residual = std::numeric_limits<double>::infinity();
    FixedPointOutcome out{SolveStatus::no_convergence, std::nullopt, prev_residual, 0};

    for (int it = 1; it <= cfg.max_iter; ++it) {
        GridDensity u = gibbs_density(MomentVector{cur}, V, F, eps, grid);
        const MomentVector next = moments(u, k_iter);
        double residual = 0.0;
        for (int l = 0; l <= k_iter; ++l) residual = std::max(residual, std::abs(next[l] - cur[static_cast<std::size_t>(l)]));
        if (residual > prev_residual) lambda = std::max(0.5 * lambda, 1e-3);
        prev_residual = residual;
        out.last_residual = residual;
        out.iterations = it;

        if (residual < cfg.tol) {
            const double eta_sup = sup_norm(flux_residual(u, V, F, eps));
            if (eta_sup > cfg.eta_tol) {
                out.status = SolveStatus::no_convergence;
                return out;
            }
            const int k_rep = cfg.report_moments > 0 ? cfg.report_moments : default_moment_count(V, F);
            StationaryMeasure sm{u,
                                 moments(u, std::max(k_rep, 4)),
                                 free_energy(u, V, F, eps),
                                 SymmetryClass::symmetric,
                                 residual,
                                 eta_sup};
            sm.symmetry = stationary_detail::classify(sm.moments, cfg.sym_tol);
            out.status = SolveStatus::converged;
            out.measure = std::move(sm);
            return out;
        }
        for (int l = 0; l <= k_iter; ++l)
            cur[static_cast<std::size_t>(l)] = (1.0 - lambda) * cur[static_cast<std::size_t>(l)] + lambda * next[l];
    }
    return out;
}

/// The concentration point of the symmetric small-noise limit: the unique
/// nonnegative root of G(x) = V'(x) + F'(2x)/2 whose effective curvature
/// V''(x) + (F''(0) + F''(2x))/2 is positive. Throws NoAdmissibleRoot when
/// zero or several candidates pass, which contradicts the standing
/// assumptions.
inline double find_x0(const ConfiningPotential& V, const InteractionPotential& F) {
    const Polynomial g = V.dpoly + 0.5 * F.dpoly.scaled_argument(2.0);
    const double bound = roots::cauchy_bound(g) + 1.0;
    std::vector<double> candidates = roots::real_roots_in(g, 0.0, bound);
    candidates.insert(candidates.begin(), 0.0);  // G is odd, so G(0) = 0 always

    std::vector<double> admissible;
    for (double x : candidates) {
        if (std::abs(g(x)) > 1e-9) continue;
        const double curvature = V.ddV(x) + 0.5 * (F.fpp0 + F.ddpoly(2.0 * x));
        if (curvature > 0.0) admissible.push_back(x);
    }
    if (admissible.size() != 1) {
        std::string list;
        for (double x : admissible) list += " " + std::to_string(x);
        throw NoAdmissibleRoot("expected exactly one admissible root of V' + F'(2x)/2, found " +
                               std::to_string(admissible.size()) + ":" + list);
    }
    return admissible.front();
}

enum class M3Status { M3, M3_prime, zero_m1_only, other };

inline const char* to_string(M3Status s) {
    switch (s) {
        case M3Status::M3: return "M3";
        case M3Status::M3_prime: return "M3_prime";
        case M3Status::zero_m1_only: return "0M1";
        case M3Status::other: return "other";
    }
    return "?";
}

struct EnumerateConfig {
    FixedPointConfig fp{};
    double seed_std = 0.2;
    double dedup_tol = 1e-6;  // Euclidean distance on (m1..m4)
    double energy_cap = std::numeric_limits<double>::infinity();  // the M of (M3)'
    std::vector<double> extra_seed_means{};
};

/// Result of the seed-battery enumeration. The count is a seed-battery count,
/// not a completeness certificate; measures above the energy cap are kept in
/// `excluded` but do not enter the status classification.
struct EnumerationReport {
    std::vector<StationaryMeasure> measures;
    std::vector<StationaryMeasure> excluded;  // above the energy cap
    M3Status m3_status = M3Status::other;
    bool ordering_ok = false;
    std::vector<std::string> seed_notes;
};

namespace stationary_detail {

inline double moment_distance(const MomentVector& a, const MomentVector& b) {
    double acc = 0.0;
    for (int l = 1; l <= 4; ++l) {
        const double d = a[l] - b[l];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace stationary_detail

/// Runs the fixed-point solver from Gaussian bumps at {0, +-x0, +-a, +-a/2}
/// plus any user-supplied means, deduplicates by moment distance, classifies
/// symmetry and checks the free-energy ordering of the asymmetric pair
/// against the symmetric measure.
inline EnumerationReport enumerate_stationary(const ConfiningPotential& V, const InteractionPotential& F, double eps,
                                              const Grid& grid, const EnumerateConfig& cfg = {}) {
    std::vector<double> means{0.0, V.a, -V.a, 0.5 * V.a, -0.5 * V.a};
    try {
        const double x0 = find_x0(V, F);
        if (x0 > 1e-9) {
            means.push_back(x0);
            means.push_back(-x0);
        }
    } catch (const NoAdmissibleRoot&) {
        // seeds at +-a and the origin still cover the limit points
    }
    means.insert(means.end(), cfg.extra_seed_means.begin(), cfg.extra_seed_means.end());

    const int k_seed = std::max(4, F.poly.degree());
    std::vector<std::future<FixedPointOutcome>> jobs;
    jobs.reserve(means.size());
    for (double mu : means)
        jobs.push_back(std::async(std::launch::async, [&, mu] {
            const GridDensity bump = gaussian_density(grid, mu, cfg.seed_std);
            return fixed_point_solve(moments(bump, k_seed), V, F, eps, grid, cfg.fp);
        }));

    EnumerationReport rep;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        FixedPointOutcome oc = [&]() -> FixedPointOutcome {
            try {
                return jobs[j].get();
            } catch (const DegenerateNormalization& e) {
                rep.seed_notes.push_back("seed " + std::to_string(means[j]) + ": " + e.what());
                return {SolveStatus::degenerate, std::nullopt, 0.0, 0};
            }
        }();
        if (oc.status != SolveStatus::converged) {
            if (oc.status == SolveStatus::no_convergence)
                rep.seed_notes.push_back("seed " + std::to_string(means[j]) + ": no convergence, residual " +
                                         std::to_string(oc.last_residual));
            continue;
        }
        StationaryMeasure& sm = *oc.measure;
        const bool duplicate =
            std::any_of(rep.measures.begin(), rep.measures.end(),
                        [&](const StationaryMeasure& other) {
                            return stationary_detail::moment_distance(other.moments, sm.moments) < cfg.dedup_tol;
                        }) ||
            std::any_of(rep.excluded.begin(), rep.excluded.end(), [&](const StationaryMeasure& other) {
                return stationary_detail::moment_distance(other.moments, sm.moments) < cfg.dedup_tol;
            });
        if (duplicate) continue;
        if (sm.free_energy.total > cfg.energy_cap)
            rep.excluded.push_back(std::move(sm));
        else
            rep.measures.push_back(std::move(sm));
    }

    std::sort(rep.measures.begin(), rep.measures.end(),
              [](const StationaryMeasure& a, const StationaryMeasure& b) { return a.moments[1] < b.moments[1]; });

    const StationaryMeasure* sym = nullptr;
    const StationaryMeasure* plus = nullptr;
    const StationaryMeasure* minus = nullptr;
    for (const StationaryMeasure& sm : rep.measures) {
        if (sm.symmetry == SymmetryClass::symmetric && !sym) sym = &sm;
        if (sm.symmetry == SymmetryClass::asymmetric_plus && !plus) plus = &sm;
        if (sm.symmetry == SymmetryClass::asymmetric_minus && !minus) minus = &sm;
    }
    if (sym && plus && minus) {
        rep.ordering_ok = std::abs(plus->free_energy.total - minus->free_energy.total) <= 1e-9 &&
                          plus->free_energy.total < sym->free_energy.total;
        if (rep.measures.size() == 3)
            rep.m3_status = rep.excluded.empty() ? M3Status::M3 : M3Status::M3_prime;
        else
            rep.m3_status = M3Status::other;
    } else if (sym && rep.measures.size() == 1) {
        rep.m3_status = M3Status::zero_m1_only;
        rep.ordering_ok = false;
    } else {
        rep.m3_status = M3Status::other;
        rep.ordering_ok = false;
    }
    return rep;
}

}  // namespace mckean
