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

#include <optional>
#include <span>
#include <string>
#include <variant>

#include "mckean/polynomial.hpp"
#include "mckean/roots.hpp"

namespace mckean {

/// Double-well confining potential: even polynomial of degree 2m >= 4, wells
/// at +-a, local maximum at the origin, V(0) = 0, convex second derivative,
/// and a quartic-minus-quadratic growth floor witnessed by (c4, c2).
struct ConfiningPotential {
    Polynomial poly;
    Polynomial dpoly;   // V'
    Polynomial ddpoly;  // V''
    double a = 0.0;     // well location, a > 0
    int m = 0;          // half-degree
    double growth_c4 = 0.0;
    double growth_c2 = 0.0;

    double operator()(double x) const { return poly(x); }
    double dV(double x) const { return dpoly(x); }
    double ddV(double x) const { return ddpoly(x); }
};

/// Attractive interaction potential: even convex polynomial of degree
/// 2n >= 2 with F(0) = 0 and convex F''.
struct InteractionPotential {
    Polynomial poly;
    Polynomial dpoly;   // F'
    Polynomial ddpoly;  // F''
    int n = 0;          // half-degree
    bool linear_force = false;  // F' linear
    double fpp0 = 0.0;          // F''(0)

    double operator()(double x) const { return poly(x); }
    double dF(double x) const { return dpoly(x); }
};

enum class PotentialViolation {
    odd_coefficient,
    degree_too_low,
    wrong_critical_points,
    nonconvex_second_derivative,
    growth_bound_fails,
    nonzero_at_origin,
    not_convex,
};

struct PotentialRejection {
    PotentialViolation violation;
    std::string assumption;  // e.g. "(V-2)"
    std::string detail;
};

inline const char* to_string(PotentialViolation v) {
    switch (v) {
        case PotentialViolation::odd_coefficient: return "OddCoefficient";
        case PotentialViolation::degree_too_low: return "DegreeTooLow";
        case PotentialViolation::wrong_critical_points: return "WrongCriticalPoints";
        case PotentialViolation::nonconvex_second_derivative: return "NonconvexSecondDerivative";
        case PotentialViolation::growth_bound_fails: return "GrowthBoundFails";
        case PotentialViolation::nonzero_at_origin: return "NonzeroAtOrigin";
        case PotentialViolation::not_convex: return "NotConvex";
    }
    return "?";
}

namespace detail {
inline std::optional<int> first_odd_coefficient(const Polynomial& p) {
    for (int k = 1; k <= p.degree(); k += 2)
        if (p.coeff(k) != 0.0) return k;
    return std::nullopt;
}
}  // namespace detail

/// Validates a confining potential from an ascending coefficient list.
/// Returns the validated potential or the first violated assumption. The well
/// location is found by Sturm isolation of V' on (0, cauchy bound] followed by
/// bisection; the growth witness picks c4 = lead/2 and the smallest slack c2.
inline std::variant<ConfiningPotential, PotentialRejection> validate_confining(const std::vector<double>& coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("validate_confining: empty coefficient list");
    const Polynomial v(coeffs);

    if (auto k = detail::first_odd_coefficient(v))
        return PotentialRejection{PotentialViolation::odd_coefficient, "(V-1)",
                                  "odd coefficient c" + std::to_string(*k) + " is nonzero"};

    const Polynomial dv = v.derivative();
    const Polynomial ddv = v.derivative(2);

    // (V-2): V' vanishes exactly at -a, 0, a. V' is odd, so it suffices that
    // it has exactly one distinct positive root and the curvature signs hold.
    const double bound = roots::cauchy_bound(dv) + 1.0;
    const std::vector<double> pos = roots::real_roots_in(dv, 0.0, bound);
    if (pos.size() != 1)
        return PotentialRejection{PotentialViolation::wrong_critical_points, "(V-2)",
                                  "V' has " + std::to_string(pos.size()) + " distinct positive roots, expected 1"};
    const double a = pos.front();
    if (!(ddv(a) > 0.0))
        return PotentialRejection{PotentialViolation::wrong_critical_points, "(V-2)",
                                  "V''(a) <= 0 at a = " + std::to_string(a)};
    if (!(ddv(0.0) < 0.0))
        return PotentialRejection{PotentialViolation::wrong_critical_points, "(V-2)", "V''(0) >= 0"};

    if (v.degree() < 4)
        return PotentialRejection{PotentialViolation::degree_too_low, "(V-1)",
                                  "degree " + std::to_string(v.degree()) + " < 4"};

    if (v.coeff(0) != 0.0)
        return PotentialRejection{PotentialViolation::nonzero_at_origin, "(V-6)", "V(0) != 0"};

    if (!roots::is_nonnegative(v.derivative(4)))
        return PotentialRejection{PotentialViolation::nonconvex_second_derivative, "(V-5)", "V'''' takes negative values"};

    // (V-3): exhibit c4, c2 > 0 with V(x) >= c4 x^4 - c2 x^2. With c0 = c1 = 0
    // the slack (V - c4 x^4)/x^2 is again a polynomial; its global minimum
    // gives the smallest admissible c2.
    if (v.leading() <= 0.0)
        return PotentialRejection{PotentialViolation::growth_bound_fails, "(V-3)", "leading coefficient <= 0"};
    const double c4 = v.degree() == 4 ? 0.5 * v.leading() : 0.5;
    Polynomial h = v;
    {
        std::vector<double> hc = h.coeffs();
        hc.resize(std::max<std::size_t>(hc.size(), 5), 0.0);
        hc[4] -= c4;
        h = Polynomial(std::move(hc));
    }
    const Polynomial slack = h.shifted_down(2);
    const double c2 = std::max(1e-9, -roots::global_minimum(slack).value + 1e-9);
    {
        std::vector<double> gc = h.coeffs();
        gc[2] += c2;
        const Polynomial witness(std::move(gc));
        if (roots::global_minimum(witness).value < -1e-10)
            return PotentialRejection{PotentialViolation::growth_bound_fails, "(V-3)", "no growth witness found"};
    }

    ConfiningPotential out;
    out.poly = v;
    out.dpoly = dv;
    out.ddpoly = ddv;
    out.a = a;
    out.m = v.degree() / 2;
    out.growth_c4 = c4;
    out.growth_c2 = c2;
    return out;
}

/// Validates an interaction potential: even, degree >= 2, F(0) = 0, and both
/// F and F'' convex. Also reports whether the force F' is linear and the
/// value F''(0).
inline std::variant<InteractionPotential, PotentialRejection> validate_interaction(const std::vector<double>& coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("validate_interaction: empty coefficient list");
    const Polynomial f(coeffs);

    if (auto k = detail::first_odd_coefficient(f))
        return PotentialRejection{PotentialViolation::odd_coefficient, "(F-1)",
                                  "odd coefficient c" + std::to_string(*k) + " is nonzero"};
    if (f.degree() < 2)
        return PotentialRejection{PotentialViolation::degree_too_low, "(F-1)",
                                  "degree " + std::to_string(f.degree()) + " < 2"};
    if (f.coeff(0) != 0.0)
        return PotentialRejection{PotentialViolation::nonzero_at_origin, "(F-3)", "F(0) != 0"};

    const Polynomial ddf = f.derivative(2);
    if (!roots::is_nonnegative(ddf))
        return PotentialRejection{PotentialViolation::not_convex, "(F-2)", "F'' takes negative values"};
    if (!roots::is_nonnegative(f.derivative(4)))
        return PotentialRejection{PotentialViolation::not_convex, "(F-2)", "F'''' takes negative values"};

    InteractionPotential out;
    out.poly = f;
    out.dpoly = f.derivative();
    out.ddpoly = ddf;
    out.n = f.degree() / 2;
    out.linear_force = f.degree() <= 2;
    out.fpp0 = ddf(0.0);
    return out;
}

struct MomentVectorTooShort : std::runtime_error {
    MomentVectorTooShort(int needed, int have)
        : std::runtime_error("convolution needs moments up to order " + std::to_string(needed) + ", got " +
                             std::to_string(have)) {}
};

/// The polynomial x -> integral of f(x - y) du(y) for a measure du with the
/// given moments (moments[l] = l-th moment, moments[0] = mass). Exact in exact
/// arithmetic: expand f(x - y) binomially and integrate y term by term.
inline Polynomial convolve_with_moments(const Polynomial& f, std::span<const double> moments) {
    const int deg = f.degree();
    if (static_cast<int>(moments.size()) < deg + 1)
        throw MomentVectorTooShort(deg, static_cast<int>(moments.size()) - 1);

    // Pascal triangle up to the needed order.
    std::vector<std::vector<double>> binom(static_cast<std::size_t>(deg) + 1);
    for (int d = 0; d <= deg; ++d) {
        binom[static_cast<std::size_t>(d)].assign(static_cast<std::size_t>(d) + 1, 1.0);
        for (int k = 1; k < d; ++k)
            binom[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)] =
                binom[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(k - 1)] +
                binom[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(k)];
    }

    std::vector<double> out(static_cast<std::size_t>(deg) + 1, 0.0);
    for (int d = 0; d <= deg; ++d) {
        const double fd = f.coeff(d);
        if (fd == 0.0) continue;
        for (int k = 0; k <= d; ++k) {
            const double sign = ((d - k) % 2 == 0) ? 1.0 : -1.0;
            out[static_cast<std::size_t>(k)] +=
                fd * binom[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)] * sign *
                moments[static_cast<std::size_t>(d - k)];
        }
    }
    return Polynomial(std::move(out));
}

}  // namespace mckean
