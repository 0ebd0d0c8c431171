#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mckean/potentials.hpp"

using namespace mckean;

namespace {

ConfiningPotential require_confining(const std::vector<double>& c) {
    auto r = validate_confining(c);
    REQUIRE(std::holds_alternative<ConfiningPotential>(r));
    return std::get<ConfiningPotential>(r);
}

InteractionPotential require_interaction(const std::vector<double>& c) {
    auto r = validate_interaction(c);
    REQUIRE(std::holds_alternative<InteractionPotential>(r));
    return std::get<InteractionPotential>(r);
}

PotentialViolation rejection_of_confining(const std::vector<double>& c) {
    auto r = validate_confining(c);
    REQUIRE(std::holds_alternative<PotentialRejection>(r));
    return std::get<PotentialRejection>(r).violation;
}

}  // namespace

TEST_CASE("standard quartic validates with well at 1") {
    const ConfiningPotential v = require_confining({0.0, 0.0, -0.5, 0.0, 0.25});
    CHECK(v.a == Catch::Approx(1.0).margin(1e-11));
    CHECK(v.m == 2);
    CHECK(v.growth_c4 > 0.0);
    CHECK(v.growth_c2 > 0.0);
    // witness actually is a lower bound on a sample of points
    for (double x : {-3.0, -1.0, -0.2, 0.0, 0.7, 2.5})
        CHECK(v(x) >= v.growth_c4 * x * x * x * x - v.growth_c2 * x * x - 1e-9);
}

TEST_CASE("pure quadratic is rejected for its critical points") {
    CHECK(rejection_of_confining({0.0, 0.0, 1.0}) == PotentialViolation::wrong_critical_points);
}

TEST_CASE("sixth-order double well validates") {
    // x^6/6 - x^2/2: V' = x^5 - x, positive root 1, V''(1) = 4, V''(0) = -1
    const ConfiningPotential v = require_confining({0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 1.0 / 6.0});
    CHECK(v.a == Catch::Approx(1.0).margin(1e-10));
    CHECK(v.m == 3);
    CHECK(v.ddV(1.0) == Catch::Approx(4.0).margin(1e-12));
    CHECK(v.ddV(0.0) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("nonconvex second derivative is rejected") {
    // x^8/8 - 0.3 x^4 - x^2/2: three critical points with the right
    // curvatures, but V'''' = 210 x^4 - 7.2 dips negative near the origin
    CHECK(rejection_of_confining({0.0, 0.0, -0.5, 0.0, -0.3, 0.0, 0.0, 0.0, 0.125}) ==
          PotentialViolation::nonconvex_second_derivative);
}

TEST_CASE("interaction with convex F but nonconvex F'' is rejected") {
    // F'' = x^4 - x^2 + 1/2 > 0 everywhere, yet F'''' = 12 x^2 - 2 < 0 at 0
    auto r = validate_interaction({0.0, 0.0, 0.25, 0.0, -1.0 / 12.0, 0.0, 1.0 / 30.0});
    REQUIRE(std::holds_alternative<PotentialRejection>(r));
    CHECK(std::get<PotentialRejection>(r).violation == PotentialViolation::not_convex);
    CHECK(std::get<PotentialRejection>(r).detail.find("F''''") != std::string::npos);
}

TEST_CASE("confining rejections name the first violated assumption") {
    auto r = validate_confining({0.0, 0.1, -0.5, 0.0, 0.25});
    REQUIRE(std::holds_alternative<PotentialRejection>(r));
    CHECK(std::get<PotentialRejection>(r).violation == PotentialViolation::odd_coefficient);
    CHECK(std::get<PotentialRejection>(r).assumption == "(V-1)");

    // triple well: V' = x(x^2-1)(x^2-4) has positive roots 1 and 2
    Polynomial vp = Polynomial{0.0, 1.0} * Polynomial{-1.0, 0.0, 1.0} * Polynomial{-4.0, 0.0, 1.0};
    std::vector<double> vc(7, 0.0);
    for (int k = 0; k <= vp.degree(); ++k) vc[static_cast<std::size_t>(k) + 1] = vp.coeff(k) / (k + 1.0);
    CHECK(rejection_of_confining(vc) == PotentialViolation::wrong_critical_points);

    // shifted quartic: V(0) != 0
    CHECK(rejection_of_confining({0.5, 0.0, -0.5, 0.0, 0.25}) == PotentialViolation::nonzero_at_origin);

    CHECK_THROWS_AS(validate_confining({}), std::invalid_argument);
}

TEST_CASE("quadratic interaction validates and reports the linear-force flag") {
    const InteractionPotential f = require_interaction({0.0, 0.0, 0.25});  // 0.5 * x^2/2
    CHECK(f.n == 1);
    CHECK(f.linear_force);
    CHECK(f.fpp0 == Catch::Approx(0.5).margin(0));
}

TEST_CASE("quartic interaction validates without linear force") {
    const InteractionPotential f = require_interaction({0.0, 0.0, 0.0, 0.0, 0.25});  // x^4/4
    CHECK(f.n == 2);
    CHECK_FALSE(f.linear_force);
    CHECK(f.fpp0 == 0.0);
}

TEST_CASE("concave interaction is rejected") {
    auto r = validate_interaction({0.0, 0.0, -1.0});
    REQUIRE(std::holds_alternative<PotentialRejection>(r));
    CHECK(std::get<PotentialRejection>(r).violation == PotentialViolation::not_convex);
}

TEST_CASE("interaction rejections for parity and degree") {
    auto odd = validate_interaction({0.0, 1.0, 0.5});
    REQUIRE(std::holds_alternative<PotentialRejection>(odd));
    CHECK(std::get<PotentialRejection>(odd).violation == PotentialViolation::odd_coefficient);

    auto low = validate_interaction({0.0});
    REQUIRE(std::holds_alternative<PotentialRejection>(low));
    CHECK(std::get<PotentialRejection>(low).violation == PotentialViolation::degree_too_low);
}

TEST_CASE("validation terminates and stays consistent on fuzzed coefficients") {
    std::mt19937_64 gen(515);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_int_distribution<int> len(1, 9);
    std::uniform_int_distribution<int> mode(0, 2);
    std::uniform_real_distribution<double> at(-2.5, 2.5);

    for (int rep = 0; rep < 400; ++rep) {
        std::vector<double> c(static_cast<std::size_t>(len(gen)), 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            const int m = mode(gen);
            c[k] = m == 0 ? 0.0 : coeff(gen);
            if (mode(gen) == 0 && k % 2 == 1) c[k] = 0.0;  // bias toward even polynomials
        }

        auto vr = validate_confining(c);
        if (std::holds_alternative<ConfiningPotential>(vr)) {
            const auto& v = std::get<ConfiningPotential>(vr);
            CHECK(v.a > 0.0);
            CHECK(std::abs(v.dV(v.a)) < 1e-7);
            CHECK(v.ddV(v.a) > 0.0);
            CHECK(v.ddV(0.0) < 0.0);
            for (int s = 0; s < 8; ++s) {
                const double x = at(gen);
                CHECK(v(x) >= v.growth_c4 * x * x * x * x - v.growth_c2 * x * x - 1e-8);
            }
        }

        auto fr = validate_interaction(c);
        if (std::holds_alternative<InteractionPotential>(fr)) {
            const auto& f = std::get<InteractionPotential>(fr);
            CHECK(f(0.0) == 0.0);
            for (int s = 0; s < 8; ++s) CHECK(f.ddpoly(at(gen)) >= -1e-9);
        }
    }
}

TEST_CASE("convolution against explicit moments") {
    // F = x^2/2 with moments (1, m1, m2) -> (x^2 - 2 m1 x + m2)/2
    const Polynomial f{0.0, 0.0, 0.5};
    const std::vector<double> mom{1.0, 0.3, 0.7};
    const Polynomial conv = convolve_with_moments(f, mom);
    CHECK(conv.coeff(2) == Catch::Approx(0.5).margin(0));
    CHECK(conv.coeff(1) == Catch::Approx(-0.3).margin(1e-15));
    CHECK(conv.coeff(0) == Catch::Approx(0.35).margin(1e-15));

    // point mass at a: F*delta_a evaluated at a is F(0) = 0
    const double a = 1.37;
    const Polynomial conv_pt = convolve_with_moments(f, std::vector<double>{1.0, a, a * a});
    CHECK(conv_pt(a) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("convolution of a quartic with standard Gaussian moments") {
    // oracle: expand (x-y)^4 against moments (1, 0, 1, 0, 3):
    // integral = x^4 + 6 x^2 + 3, so F = x^4/4 gives (x^4 + 6x^2 + 3)/4
    const Polynomial f{0.0, 0.0, 0.0, 0.0, 0.25};
    const Polynomial conv = convolve_with_moments(f, std::vector<double>{1.0, 0.0, 1.0, 0.0, 3.0});
    CHECK(conv.coeff(4) == Catch::Approx(0.25).margin(0));
    CHECK(conv.coeff(3) == Catch::Approx(0.0).margin(0));
    CHECK(conv.coeff(2) == Catch::Approx(1.5).margin(1e-15));
    CHECK(conv.coeff(1) == Catch::Approx(0.0).margin(0));
    CHECK(conv.coeff(0) == Catch::Approx(0.75).margin(1e-15));

    CHECK_THROWS_AS(convolve_with_moments(f, std::vector<double>{1.0, 0.0, 1.0}), MomentVectorTooShort);
}

TEST_CASE("convolution properties") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    const Polynomial f{0.0, 0.0, 0.3, 0.0, 0.1};  // even, degree 4

    SECTION("against a point mass it reproduces F(x - c)") {
        for (int rep = 0; rep < 25; ++rep) {
            const double c = unif(gen), x = unif(gen);
            std::vector<double> mom(5);
            mom[0] = 1.0;
            for (int l = 1; l <= 4; ++l) mom[static_cast<std::size_t>(l)] = mom[static_cast<std::size_t>(l - 1)] * c;
            CHECK(convolve_with_moments(f, mom)(x) == Catch::Approx(f(x - c)).margin(1e-12));
        }
    }

    SECTION("linear in the moment vector") {
        std::vector<double> ma(5), mb(5);
        for (double& v : ma) v = unif(gen);
        for (double& v : mb) v = unif(gen);
        const double lam = 0.37;
        std::vector<double> mix(5);
        for (int l = 0; l < 5; ++l)
            mix[static_cast<std::size_t>(l)] =
                lam * ma[static_cast<std::size_t>(l)] + (1.0 - lam) * mb[static_cast<std::size_t>(l)];
        const Polynomial ca = convolve_with_moments(f, ma);
        const Polynomial cb = convolve_with_moments(f, mb);
        const Polynomial cmix = convolve_with_moments(f, mix);
        for (int k = 0; k <= 4; ++k)
            CHECK(cmix.coeff(k) == Catch::Approx(lam * ca.coeff(k) + (1.0 - lam) * cb.coeff(k)).margin(1e-12));
    }

    SECTION("even F and symmetric moments give an even polynomial") {
        const Polynomial conv = convolve_with_moments(f, std::vector<double>{1.0, 0.0, 0.8, 0.0, 2.0});
        CHECK(conv.is_even());
    }

    SECTION("differentiation commutes with convolution") {
        std::vector<double> mom{1.0, 0.2, 0.9, 0.1, 2.1};
        const Polynomial left = convolve_with_moments(f, mom).derivative();
        const Polynomial right = convolve_with_moments(f.derivative(), mom);
        for (int k = 0; k <= 3; ++k) CHECK(left.coeff(k) == Catch::Approx(right.coeff(k)).margin(1e-12));
    }
}
