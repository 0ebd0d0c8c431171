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
#include <future>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mckean/quadrature.hpp"
#include "mckean/roots.hpp"
#include "mckean/stationary.hpp"

namespace mckean {

struct GrowthPreconditionFails : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BranchLost : std::runtime_error {
    BranchLost(double eps, const std::string& which)
        : std::runtime_error("branch '" + which + "' lost at eps = " + std::to_string(eps)), eps(eps) {}
    double eps;
};

/// All global minimum locations of a coercive polynomial, ascending: root
/// isolation of U' followed by a value comparison within tol.
inline std::vector<double> extract_minima(const Polynomial& u, double tol = 1e-9) {
    if (u.degree() < 2 || u.degree() % 2 != 0 || u.leading() <= 0.0)
        throw std::invalid_argument("extract_minima: polynomial is not coercive");
    const std::vector<double> crit = roots::real_roots(u.derivative());
    double vmin = std::numeric_limits<double>::infinity();
    for (double x : crit) vmin = std::min(vmin, u(x));
    std::vector<double> out;
    for (double x : crit)
        if (u(x) <= vmin + tol) out.push_back(x);
    return out;
}

namespace asym_detail {

/// Integration window: beyond it, exp(-2(U - Umin)/eps) is below underflow.
/// The edges are the outermost crossings of the level umin + 400 eps, found by
/// root isolation of the shifted polynomial, so every sublevel region is
/// inside the window.
inline std::pair<double, double> laplace_window(const Polynomial& u, double umin, double eps) {
    const Polynomial shifted = u - Polynomial{umin + 400.0 * eps};
    const std::vector<double> crossings = roots::real_roots(shifted);
    if (crossings.size() < 2) throw std::logic_error("laplace_window: level set has no width");
    return {crossings.front() - 1e-9, crossings.back() + 1e-9};
}

}  // namespace asym_detail

/// Laplace moment ratio: integral of x^l exp(-2U/eps) over the integral of
/// exp(-2U/eps), with min U subtracted before exponentiating (the shift
/// cancels between the two integrals). For even U, odd-l ratios vanish by
/// symmetry of the quadrature domain and even-l ratios use the half domain.
/// Relative quadrature error around 1e-10.
inline double laplace_ratio(const Polynomial& u, double eps, int l) {
    if (!(eps > 0.0)) throw std::invalid_argument("laplace_ratio: eps must be positive");
    if (l < 0) throw std::invalid_argument("laplace_ratio: negative moment order");
    if (u.degree() < 2 || u.degree() % 2 != 0 || u.leading() <= 0.0)
        throw GrowthPreconditionFails("laplace_ratio: U must grow at infinity (even degree, positive leading)");

    const double umin = roots::global_minimum(u).value;
    const auto [lo, hi] = asym_detail::laplace_window(u, umin, eps);
    auto weight = [&](double x) { return std::exp(-2.0 / eps * (u(x) - umin)); };

    if (u.is_even()) {
        if (l % 2 == 1) return 0.0;  // odd integrand on a symmetric window
        auto num = [&](double x) { return std::pow(x, l) * weight(x); };
        const double top = quad::integrate_relative(num, 0.0, hi, 1e-11);
        const double bot = quad::integrate_relative(weight, 0.0, hi, 1e-11);
        return top / bot;
    }
    auto num = [&](double x) { return std::pow(x, l) * weight(x); };
    const double top = quad::integrate_relative(num, lo, hi, 1e-11);
    const double bot = quad::integrate_relative(weight, lo, hi, 1e-11);
    return top / bot;
}

/// Per-epsilon snapshot of a Laplace ratio experiment: the minima of U, the
/// observed mass fractions of their Voronoi cells, and the requested ratios.
struct LaplaceReport {
    double eps;
    std::vector<double> minima;
    std::vector<double> weights;
    std::vector<double> ratios;  // ratios[l] for l = 0..max_order
};

inline LaplaceReport laplace_report(const Polynomial& u, double eps, int max_order) {
    LaplaceReport rep;
    rep.eps = eps;
    rep.minima = extract_minima(u);
    const double umin = roots::global_minimum(u).value;
    const auto [lo, hi] = asym_detail::laplace_window(u, umin, eps);
    auto weight = [&](double x) { return std::exp(-2.0 / eps * (u(x) - umin)); };
    const double total = quad::integrate_relative(weight, lo, hi, 1e-11);

    // observed per-cell mass fractions (Voronoi cells of the minima)
    for (std::size_t j = 0; j < rep.minima.size(); ++j) {
        const double left = j == 0 ? lo : 0.5 * (rep.minima[j - 1] + rep.minima[j]);
        const double right = j + 1 == rep.minima.size() ? hi : 0.5 * (rep.minima[j] + rep.minima[j + 1]);
        rep.weights.push_back(quad::integrate_relative(weight, left, right, 1e-11) / total);
    }
    for (int l = 0; l <= max_order; ++l) rep.ratios.push_back(laplace_ratio(u, eps, l));
    return rep;
}

/// Free energies of the three stationary branches along a decreasing epsilon
/// sweep, with the small-noise limits they should approach.
struct SweepReport {
    std::vector<double> eps_values;
    std::vector<double> fe_sym, fe_plus, fe_minus;
    double predicted_asym_limit;  // V(a)
    double predicted_sym_limit;   // V(x0) + F(2 x0)/4
    bool sym_monotone = true;     // |fe - limit| decreasing along the sweep
    bool asym_monotone = true;
};

/// Enumerates the stationary measures at every epsilon (in parallel), tracks
/// the branches by symmetry class, and records their free energies. Throws
/// BranchLost naming the epsilon where a branch is missing.
inline SweepReport free_energy_sweep(const ConfiningPotential& V, const InteractionPotential& F,
                                     const std::vector<double>& eps_list, const Grid& grid,
                                     const EnumerateConfig& cfg = {}) {
    if (eps_list.empty()) throw std::invalid_argument("free_energy_sweep: empty eps list");
    for (std::size_t k = 0; k + 1 < eps_list.size(); ++k)
        if (!(eps_list[k] > eps_list[k + 1]))
            throw std::invalid_argument("free_energy_sweep: eps values must be strictly decreasing");

    SweepReport rep;
    rep.eps_values = eps_list;
    rep.predicted_asym_limit = V(V.a);
    const double x0 = find_x0(V, F);
    rep.predicted_sym_limit = V(x0) + 0.25 * F(2.0 * x0);

    std::vector<std::future<EnumerationReport>> jobs;
    jobs.reserve(eps_list.size());
    for (double eps : eps_list)
        jobs.push_back(std::async(std::launch::async,
                                  [&, eps] { return enumerate_stationary(V, F, eps, grid, cfg); }));

    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const EnumerationReport er = jobs[k].get();
        std::optional<double> sym, plus, minus;
        for (const auto& m : er.measures) {
            if (m.symmetry == SymmetryClass::symmetric) sym = m.free_energy.total;
            if (m.symmetry == SymmetryClass::asymmetric_plus) plus = m.free_energy.total;
            if (m.symmetry == SymmetryClass::asymmetric_minus) minus = m.free_energy.total;
        }
        if (!sym) throw BranchLost(eps_list[k], "sym");
        if (!plus) throw BranchLost(eps_list[k], "plus");
        if (!minus) throw BranchLost(eps_list[k], "minus");
        rep.fe_sym.push_back(*sym);
        rep.fe_plus.push_back(*plus);
        rep.fe_minus.push_back(*minus);
    }

    for (std::size_t k = 0; k + 1 < rep.fe_sym.size(); ++k) {
        if (std::abs(rep.fe_sym[k + 1] - rep.predicted_sym_limit) >
            std::abs(rep.fe_sym[k] - rep.predicted_sym_limit))
            rep.sym_monotone = false;
        if (std::abs(rep.fe_plus[k + 1] - rep.predicted_asym_limit) >
            std::abs(rep.fe_plus[k] - rep.predicted_asym_limit))
            rep.asym_monotone = false;
    }
    return rep;
}

}  // namespace mckean
