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
#include <span>
#include <vector>

#include "mckean/grid.hpp"
#include "mckean/potentials.hpp"

namespace mckean {

/// First K moments of a measure, m[l] = integral of x^l. m[0] is the computed
/// mass (1 up to quadrature for a valid density). This finite vector is the
/// whole parametrization of the interaction convolution.
struct MomentVector {
    std::vector<double> m;

    int order() const { return static_cast<int>(m.size()) - 1; }
    double operator[](int l) const { return m[static_cast<std::size_t>(l)]; }

    /// Mass ~ 1, even moments nonnegative, Jensen m2 >= m1^2.
    bool consistent(double mass_tol = 1e-6) const {
        if (m.empty() || std::abs(m[0] - 1.0) > mass_tol) return false;
        for (std::size_t l = 2; l < m.size(); l += 2)
            if (m[l] < 0.0) return false;
        if (m.size() > 2 && m[2] < m[1] * m[1] - 1e-12) return false;
        return true;
    }
};

/// Default number of recorded moments: max(8 q^2, 2 deg F) capped at 16,
/// with q = max(m, n).
inline int default_moment_count(const ConfiningPotential& V, const InteractionPotential& F) {
    const int q = std::max(V.m, F.n);
    return std::min(16, std::max(8 * q * q, 4 * F.n));
}

/// Trapezoid moments m_0..m_K. Mirror pairs are summed together, so odd
/// moments of an exactly symmetric density vanish exactly.
inline MomentVector moments(const GridDensity& u, int K) {
    if (K < 0) throw std::invalid_argument("moments: negative order");
    const Grid& g = u.grid();
    const int n = g.n();
    MomentVector out;
    out.m.assign(static_cast<std::size_t>(K) + 1, 0.0);
    for (int i = 0, j = n - 1; i <= j; ++i, --j) {
        const double w = g.weight(i);
        const double x = g.x(j);  // x(j) = -x(i) exactly, x(j) >= 0
        const double ui = u[i], uj = u[j];
        double powx = 1.0;
        if (i == j) {
            out.m[0] += w * ui;
            for (int l = 1; l <= K; ++l) {
                powx *= x;
                out.m[static_cast<std::size_t>(l)] += w * ui * powx;
            }
        } else {
            out.m[0] += w * (ui + uj);
            double sign = 1.0;
            for (int l = 1; l <= K; ++l) {
                powx *= x;
                sign = -sign;
                out.m[static_cast<std::size_t>(l)] += w * powx * (uj + sign * ui);
            }
        }
    }
    return out;
}

/// Trapezoid integral of u log u with the continuous extension 0 log 0 := 0.
inline double entropy(const GridDensity& u) {
    const Grid& g = u.grid();
    const int n = g.n();
    auto f = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
    double acc = 0.0;
    for (int i = 0, j = n - 1; i < j; ++i, --j) acc += g.weight(i) * (f(u[i]) + f(u[j]));
    if (n % 2 == 1) acc += g.weight(n / 2) * f(u[n / 2]);
    return acc;
}

/// The free energy split into its three terms. total is the plain sum of the
/// fields, in that order.
struct FreeEnergyBreakdown {
    double entropy_term = 0.0;      // (eps/2) * integral u log u
    double confinement_term = 0.0;  // integral V u
    double interaction_term = 0.0;  // (1/2) integral (F*u) u
    double total = 0.0;
};

/// Free energy of u: entropy term plus confinement plus interaction. The
/// interaction term uses the moment-parametrized convolution, so the cost is
/// O(n deg F) rather than O(n^2).
inline FreeEnergyBreakdown free_energy(const GridDensity& u, const ConfiningPotential& V,
                                       const InteractionPotential& F, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("free_energy: eps must be positive");
    const Grid& g = u.grid();
    const int n = g.n();

    FreeEnergyBreakdown out;
    out.entropy_term = 0.5 * eps * entropy(u);

    double conf = 0.0;
    for (int i = 0, j = n - 1; i < j; ++i, --j)
        conf += g.weight(i) * (V(g.x(i)) * u[i] + V(g.x(j)) * u[j]);
    if (n % 2 == 1) conf += g.weight(n / 2) * V(g.x(n / 2)) * u[n / 2];
    out.confinement_term = conf;

    const MomentVector mom = moments(u, F.poly.degree());
    const Polynomial conv = convolve_with_moments(F.poly, mom.m);
    double inter = 0.0;
    for (int i = 0, j = n - 1; i < j; ++i, --j)
        inter += g.weight(i) * (conv(g.x(i)) * u[i] + conv(g.x(j)) * u[j]);
    if (n % 2 == 1) inter += g.weight(n / 2) * conv(g.x(n / 2)) * u[n / 2];
    out.interaction_term = 0.5 * inter;

    out.total = out.entropy_term + out.confinement_term + out.interaction_term;
    return out;
}

/// Reduced functional: keeps only the negative part of the entropy term and
/// the confinement integral. Lower-bounds the free energy.
inline double free_energy_reduced(const GridDensity& u, const ConfiningPotential& V, double eps) {
    const Grid& g = u.grid();
    double acc = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const double v = u[i];
        double term = V(g.x(i)) * v;
        if (v > 0.0 && v < 1.0) term += 0.5 * eps * v * std::log(v);
        acc += g.weight(i) * term;
    }
    return acc;
}

/// Uniform lower bound on the free energy over all densities:
/// -eps/4 - 4 eps/e + min_x (V(x) - eps x^2 / 4), the minimum located by root
/// isolation of the derivative.
inline double free_energy_lower_bound(const ConfiningPotential& V, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("free_energy_lower_bound: eps must be positive");
    Polynomial shifted = V.poly;
    {
        std::vector<double> c = shifted.coeffs();
        c[2] -= 0.25 * eps;
        shifted = Polynomial(std::move(c));
    }
    const double vmin = roots::global_minimum(shifted).value;
    return -0.25 * eps - 4.0 * eps / std::exp(1.0) + vmin;
}

inline GridDensity symmetrize(const GridDensity& u) {
    const int n = u.n();
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = 0.5 * (u[i] + u[n - 1 - i]);
    return GridDensity::normalized(u.grid(), std::move(vals));
}

inline bool is_symmetric(const GridDensity& u, double tol) {
    const int n = u.n();
    double worst = 0.0;
    for (int i = 0, j = n - 1; i < j; ++i, --j) worst = std::max(worst, std::abs(u[i] - u[j]));
    return worst <= tol;
}

/// Truncation half-width for the computational domain: the smallest L with
/// V(L) - eps L^2/4 >= V(a) + 40 eps, so the Gibbs tail mass outside is
/// negligible relative to every tolerance in use.
inline double choose_half_width(const ConfiningPotential& V, double eps) {
    const double target = V(V.a) + 40.0 * eps;
    auto g = [&](double x) { return V(x) - 0.25 * eps * x * x - target; };
    double hi = std::max(2.0 * V.a, 1.0);
    while (g(hi) < 0.0) hi *= 1.5;
    double lo = V.a;
    for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace mckean
