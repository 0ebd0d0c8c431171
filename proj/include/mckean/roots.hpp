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
#include <limits>
#include <vector>

#include "mckean/polynomial.hpp"

namespace mckean {

/// Sturm-sequence machinery for exact counting of distinct real roots, plus
/// the bisection/Newton refinement built on top of it. Coefficients are
/// doubles, so each chain element is rescaled to unit magnitude and dust-sized
/// coefficients are dropped; adequate for the low-degree polynomials handled
/// here.
namespace roots {

constexpr double kCoeffDust = 1e-14;

inline Polynomial normalized_unit(const Polynomial& p) {
    double scale = 0.0;
    for (double c : p.coeffs()) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return Polynomial{};
    std::vector<double> c = p.coeffs();
    for (double& v : c) {
        v /= scale;
        if (std::abs(v) <= kCoeffDust) v = 0.0;
    }
    return Polynomial(std::move(c));
}

/// Remainder of a/b by long division (b nonzero).
inline Polynomial remainder(const Polynomial& a, const Polynomial& b) {
    std::vector<double> r = a.coeffs();
    const std::vector<double>& d = b.coeffs();
    const int db = b.degree();
    while (static_cast<int>(r.size()) - 1 >= db) {
        const int dr = static_cast<int>(r.size()) - 1;
        const double q = r.back() / d.back();
        for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(dr - db + j)] -= q * d[static_cast<std::size_t>(j)];
        r.pop_back();
        while (r.size() > 1 && r.back() == 0.0) r.pop_back();
        if (r.size() == 1 && r[0] == 0.0) break;
    }
    if (r.empty()) r.push_back(0.0);
    return Polynomial(std::move(r));
}

inline std::vector<Polynomial> sturm_sequence(const Polynomial& p) {
    std::vector<Polynomial> chain;
    Polynomial p0 = normalized_unit(p);
    if (p0.is_zero()) return chain;
    chain.push_back(p0);
    if (p0.degree() == 0) return chain;
    Polynomial p1 = normalized_unit(p0.derivative());
    if (p1.is_zero()) return chain;
    chain.push_back(p1);
    while (chain.back().degree() > 0) {
        const Polynomial raw = remainder(chain[chain.size() - 2], chain.back());
        // chain elements are unit-normalized, so a remainder this small means
        // the chain has terminated at a (near-)common factor
        double rmax = 0.0;
        for (double c : raw.coeffs()) rmax = std::max(rmax, std::abs(c));
        if (rmax <= 1e-12) break;
        chain.push_back(normalized_unit(-raw));
    }
    return chain;
}

inline int sign_changes(const std::vector<Polynomial>& chain, double x) {
    int changes = 0;
    int prev = 0;
    for (const Polynomial& q : chain) {
        const double v = q(x);
        const int s = (v > 0.0) - (v < 0.0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

/// Number of distinct real roots of p in (lo, hi].
inline int count_roots(const std::vector<Polynomial>& chain, double lo, double hi) {
    if (chain.empty()) return 0;
    return sign_changes(chain, lo) - sign_changes(chain, hi);
}

inline int count_roots(const Polynomial& p, double lo, double hi) {
    return count_roots(sturm_sequence(p), lo, hi);
}

/// Cauchy bound: all real roots lie in [-R, R].
inline double cauchy_bound(const Polynomial& p) {
    if (p.degree() == 0) return 1.0;
    double m = 0.0;
    const double lead = std::abs(p.leading());
    for (int k = 0; k < p.degree(); ++k) m = std::max(m, std::abs(p.coeff(k)) / lead);
    return 1.0 + m;
}

/// Shrinks an isolating bracket (lo, hi] containing exactly one distinct root
/// down to the requested width, counting roots rather than relying on sign
/// changes so even-multiplicity roots are handled.
inline double refine_root(const std::vector<Polynomial>& chain, double lo, double hi, double tol = 1e-13) {
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_roots(chain, lo, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

inline double newton_polish(const Polynomial& p, double x0, int iters = 8) {
    const Polynomial dp = p.derivative();
    double x = x0;
    double best = std::abs(p(x));
    double bestx = x;
    for (int it = 0; it < iters; ++it) {
        const double d = dp(x);
        if (d == 0.0) break;
        x -= p(x) / d;
        if (!std::isfinite(x)) break;
        const double r = std::abs(p(x));
        if (r < best) {
            best = r;
            bestx = x;
        }
    }
    return bestx;
}

/// All distinct real roots of p in (lo, hi], ascending, refined to ~1e-13.
inline std::vector<double> real_roots_in(const Polynomial& p, double lo, double hi) {
    std::vector<double> out;
    const std::vector<Polynomial> chain = sturm_sequence(p);
    if (chain.empty() || p.degree() == 0) return out;
    struct Bracket {
        double lo, hi;
        int count;
    };
    std::vector<Bracket> stack{{lo, hi, count_roots(chain, lo, hi)}};
    while (!stack.empty()) {
        const Bracket b = stack.back();
        stack.pop_back();
        if (b.count == 0) continue;
        const double width_floor = 1e-13 * std::max({1.0, std::abs(b.lo), std::abs(b.hi)});
        if (b.count == 1 || b.hi - b.lo < width_floor) {
            // roots closer than the width floor are numerically coincident
            double r = refine_root(chain, b.lo, b.hi);
            r = newton_polish(p, r);
            if (r <= b.lo || r > b.hi + 1e-12) r = refine_root(chain, b.lo, b.hi);
            out.push_back(r);
            continue;
        }
        const double mid = 0.5 * (b.lo + b.hi);
        const int left = count_roots(chain, b.lo, mid);
        stack.push_back({b.lo, mid, left});
        stack.push_back({mid, b.hi, b.count - left});
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<double> real_roots(const Polynomial& p) {
    if (p.degree() == 0) return {};
    const double r = cauchy_bound(p);
    return real_roots_in(p, -r - 1.0, r + 1.0);
}

/// True when p(x) >= 0 for all real x. Checks leading behavior, then samples
/// between the isolated distinct roots (touch points are allowed).
inline bool is_nonnegative(const Polynomial& p) {
    if (p.is_zero()) return true;
    if (p.degree() == 0) return p.coeff(0) >= 0.0;
    if (p.degree() % 2 != 0) return false;
    if (p.leading() < 0.0) return false;
    const double bound = cauchy_bound(p) + 1.0;
    std::vector<double> pts = real_roots(p);
    pts.insert(pts.begin(), -bound);
    pts.push_back(bound);
    double scale = 0.0;
    for (double c : p.coeffs()) scale = std::max(scale, std::abs(c));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = 0.5 * (pts[i] + pts[i + 1]);
        if (p(mid) < -1e-12 * scale) return false;
    }
    return true;
}

struct Minimum {
    double location;
    double value;
};

/// Global minimum of a coercive polynomial (even degree, positive leading
/// coefficient) over the real line.
inline Minimum global_minimum(const Polynomial& p) {
    if (p.degree() == 0) return {0.0, p.coeff(0)};
    if (p.degree() % 2 != 0 || p.leading() <= 0.0)
        throw std::invalid_argument("global_minimum: polynomial is not coercive");
    const std::vector<double> crit = real_roots(p.derivative());
    Minimum best{0.0, p(0.0)};
    for (double x : crit) {
        const double v = p(x);
        if (v < best.value) best = {x, v};
    }
    return best;
}

/// Minimum over the closed interval [lo, hi].
inline Minimum minimum_on(const Polynomial& p, double lo, double hi) {
    Minimum best{lo, p(lo)};
    if (p(hi) < best.value) best = {hi, p(hi)};
    for (double x : real_roots_in(p.derivative(), lo, hi)) {
        const double v = p(x);
        if (v < best.value) best = {x, v};
    }
    return best;
}

}  // namespace roots
}  // namespace mckean
