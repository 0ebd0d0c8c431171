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

namespace mckean {

/// Adaptive Simpson quadrature with the usual 15x error estimate. The
/// absolute tolerance is distributed over subintervals; callers convert a
/// relative target using a coarse first pass.
namespace quad {

namespace detail {
template <class Fn>
double simpson_rec(const Fn& f, double a, double fa, double b, double fb, double m, double fm, double whole,
                   double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class Fn>
double adaptive_simpson(const Fn& f, double a, double b, double abs_tol, int max_depth = 48) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

/// Two-pass wrapper: coarse estimate fixes the absolute tolerance for the
/// refined pass so the result meets a relative target.
template <class Fn>
double integrate_relative(const Fn& f, double a, double b, double rel_tol) {
    const double coarse = adaptive_simpson(f, a, b, 1e-8);
    const double scale = std::max(std::abs(coarse), 1e-30);
    return adaptive_simpson(f, a, b, rel_tol * scale);
}

}  // namespace quad
}  // namespace mckean
