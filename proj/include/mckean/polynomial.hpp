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
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace mckean {

/// Dense univariate polynomial with real coefficients in ascending order
/// (coeffs[k] multiplies x^k). Trailing zero coefficients are trimmed, so the
/// leading coefficient is nonzero unless the polynomial is identically zero.
class Polynomial {
  public:
    Polynomial() : coeffs_{0.0} {}

    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("Polynomial: empty coefficient list");
        trim();
    }

    Polynomial(std::initializer_list<double> coeffs) : Polynomial(std::vector<double>(coeffs)) {}

    static Polynomial constant(double c) { return Polynomial{std::vector<double>{c}}; }

    const std::vector<double>& coeffs() const { return coeffs_; }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

    /// True when every odd-order coefficient is exactly zero.
    bool is_even() const {
        for (std::size_t k = 1; k < coeffs_.size(); k += 2)
            if (coeffs_[k] != 0.0) return false;
        return true;
    }

    double leading() const { return coeffs_.back(); }

    /// Coefficient of x^k; zero beyond the degree.
    double coeff(int k) const {
        if (k < 0) throw std::invalid_argument("Polynomial::coeff: negative index");
        return static_cast<std::size_t>(k) < coeffs_.size() ? coeffs_[static_cast<std::size_t>(k)] : 0.0;
    }

    /// Horner evaluation.
    double operator()(double x) const {
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 0;) acc = coeffs_[k] + x * acc;
        return acc;
    }

    /// k-fold formal derivative.
    Polynomial derivative(int k = 1) const {
        if (k < 0) throw std::invalid_argument("Polynomial::derivative: negative order");
        std::vector<double> c = coeffs_;
        for (int pass = 0; pass < k; ++pass) {
            if (c.size() == 1) {
                c[0] = 0.0;
                break;
            }
            std::vector<double> d(c.size() - 1);
            for (std::size_t j = 1; j < c.size(); ++j) d[j - 1] = static_cast<double>(j) * c[j];
            c = std::move(d);
        }
        return Polynomial(std::move(c));
    }

    /// The polynomial x -> p(s*x).
    Polynomial scaled_argument(double s) const {
        std::vector<double> c = coeffs_;
        double pw = 1.0;
        for (std::size_t k = 1; k < c.size(); ++k) {
            pw *= s;
            c[k] *= pw;
        }
        return Polynomial(std::move(c));
    }

    /// Divides by x^k; requires the k lowest coefficients to be exactly zero.
    Polynomial shifted_down(int k) const {
        if (k < 0 || static_cast<std::size_t>(k) >= coeffs_.size() + 1)
            throw std::invalid_argument("Polynomial::shifted_down: bad shift");
        for (int j = 0; j < k && static_cast<std::size_t>(j) < coeffs_.size(); ++j)
            if (coeffs_[static_cast<std::size_t>(j)] != 0.0)
                throw std::invalid_argument("Polynomial::shifted_down: nonzero low-order coefficient");
        if (static_cast<std::size_t>(k) >= coeffs_.size()) return Polynomial{};
        return Polynomial(std::vector<double>(coeffs_.begin() + k, coeffs_.end()));
    }

    Polynomial operator-() const {
        std::vector<double> c = coeffs_;
        for (double& v : c) v = -v;
        return Polynomial(std::move(c));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k));
        return Polynomial(std::move(c));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

    friend Polynomial operator*(double s, const Polynomial& p) {
        std::vector<double> c = p.coeffs_;
        for (double& v : c) v *= s;
        return Polynomial(std::move(c));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(c));
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

    std::string to_string() const {
        std::string out;
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            if (k) out += ", ";
            out += std::to_string(coeffs_[k]);
        }
        return "[" + out + "]";
    }

  private:
    void trim() {
        while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    }

    std::vector<double> coeffs_;
};

}  // namespace mckean
