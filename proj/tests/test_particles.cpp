#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "mckean/particles.hpp"
#include "test_support.hpp"

using namespace mckean;

namespace {

const ConfiningPotential V = testsupport::standard_quartic();
const InteractionPotential F2 = testsupport::quadratic_interaction(0.5);

/// Brute-force pairwise oracle for the interaction drift, independent of the
/// power-sum path.
std::vector<double> drift_pairwise(const std::vector<double>& xs, const ConfiningPotential& v,
                                   const InteractionPotential& f) {
    const double n = static_cast<double>(xs.size());
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double inter = 0.0;
        for (double xj : xs) inter += f.dF(xs[i] - xj);
        out[i] = -(v.dV(xs[i]) + inter / n);
    }
    return out;
}

std::vector<double> random_positions(std::mt19937_64& gen, int max_n = 64) {
    std::uniform_int_distribution<int> count(2, max_n);
    std::uniform_real_distribution<double> pos(-2.5, 2.5);
    std::vector<double> xs(static_cast<std::size_t>(count(gen)));
    for (double& x : xs) x = pos(gen);
    return xs;
}

}  // namespace

TEST_CASE("fast drift path matches the pairwise oracle on 200 random configurations") {
    std::mt19937_64 gen(1234);
    const InteractionPotential F4 =
        std::get<InteractionPotential>(validate_interaction({0.0, 0.0, 0.3, 0.0, 0.25}));
    for (int rep = 0; rep < 200; ++rep) {
        const InteractionPotential& F = (rep % 2 == 0) ? F2 : F4;
        const std::vector<double> xs = random_positions(gen);
        const std::vector<double> fast = drift_all(xs, V, F);
        const std::vector<double> direct = drift_pairwise(xs, V, F);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double scale = std::max(1.0, std::abs(direct[i]));
            CHECK(std::abs(fast[i] - direct[i]) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("drift properties") {
    std::mt19937_64 gen(77);

    SECTION("coincident particles feel no interaction") {
        const std::vector<double> xs(8, 0.7);
        const std::vector<double> d = drift_all(xs, V, F2);
        for (double v : d) CHECK(v == Catch::Approx(-V.dV(0.7)).margin(1e-13));
    }

    SECTION("exchangeability: permuting positions permutes the drift") {
        const std::vector<double> xs = random_positions(gen);
        std::vector<double> perm = xs;
        std::shuffle(perm.begin(), perm.end(), gen);
        const std::vector<double> d1 = drift_all(xs, V, F2);
        const std::vector<double> d2 = drift_all(perm, V, F2);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const auto it = std::find(xs.begin(), xs.end(), perm[i]);
            REQUIRE(it != xs.end());
            CHECK(d2[i] == Catch::Approx(d1[static_cast<std::size_t>(it - xs.begin())]).margin(1e-12));
        }
    }

    SECTION("reflection equivariance: negating positions negates the drift") {
        const std::vector<double> xs = random_positions(gen);
        std::vector<double> neg = xs;
        for (double& x : neg) x = -x;
        const std::vector<double> d1 = drift_all(xs, V, F2);
        const std::vector<double> d2 = drift_all(neg, V, F2);
        for (std::size_t i = 0; i < xs.size(); ++i) CHECK(d2[i] == Catch::Approx(-d1[i]).margin(1e-12));
    }

    SECTION("drift is the negative scaled gradient of the discrete potential") {
        const std::vector<double> xs = random_positions(gen, 12);
        const double n = static_cast<double>(xs.size());
        const std::vector<double> d = drift_all(xs, V, F2);
        const double h = 1e-6;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::vector<double> up = xs, dn = xs;
            up[i] += h;
            dn[i] -= h;
            const double grad = (upsilon_N(up, V, F2) - upsilon_N(dn, V, F2)) / (2.0 * h);
            CHECK(d[i] == Catch::Approx(-n * grad).margin(1e-5));
        }
    }
}

TEST_CASE("euler-maruyama stepping") {
    SECTION("deterministic equilibrium at the well") {
        ParticleConfig cfg(2, 0.0, 1e-3, 1.0);
        ParticleState st{{1.0, 1.0}, 0.0, 7, 0};
        for (int k = 0; k < 100; ++k) st = em_step(st, cfg, V, F2);
        CHECK(st.positions[0] == Catch::Approx(1.0).margin(1e-12));
        CHECK(st.positions[1] == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("fixed seed reproduces the trajectory bit for bit") {
        ParticleConfig cfg(16, 0.3, 1e-3, 1.0);
        cfg.seed = 99;
        auto run = [&] {
            ParticleState st;
            st.seed = cfg.seed;
            st.positions.assign(16, 0.5);
            for (int k = 0; k < 50; ++k) st = em_step(st, cfg, V, F2);
            return st.positions;
        };
        const std::vector<double> a = run(), b = run();
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }

    SECTION("noiseless two-particle attraction matches an RK4 oracle") {
        const InteractionPotential Fstrong = testsupport::quadratic_interaction(5.0);
        ParticleConfig cfg(2, 0.0, 1e-4, 1.0);
        ParticleState st{{-0.5, 0.5}, 0.0, 0, 0};
        const long steps = 10000;
        for (long k = 0; k < steps; ++k) st = em_step(st, cfg, V, Fstrong);

        // RK4 on the same ODE at the same step size (RK4 error is negligible)
        std::vector<double> y{-0.5, 0.5};
        const double h = 1e-4;
        auto rhs = [&](const std::vector<double>& x) { return drift_all(x, V, Fstrong); };
        for (long k = 0; k < steps; ++k) {
            const auto k1 = rhs(y);
            std::vector<double> t1{y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]};
            const auto k2 = rhs(t1);
            std::vector<double> t2{y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]};
            const auto k3 = rhs(t2);
            std::vector<double> t3{y[0] + h * k3[0], y[1] + h * k3[1]};
            const auto k4 = rhs(t3);
            for (std::size_t i = 0; i < 2; ++i)
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        CHECK(st.positions[0] == Catch::Approx(y[0]).margin(5e-4));
        CHECK(st.positions[1] == Catch::Approx(y[1]).margin(5e-4));
        // strong attraction pulls the pair together
        CHECK(std::abs(st.positions[1] - st.positions[0]) < 0.2);
    }

    SECTION("blowup guard fires when dt is absurd") {
        ParticleConfig cfg(2, 0.0, 50.0, 100.0);
        cfg.blowup_guard = 1e3;
        ParticleState st{{2.0, -2.0}, 0.0, 0, 0};
        CHECK_THROWS_AS(
            [&] {
                for (int k = 0; k < 50; ++k) st = em_step(st, cfg, V, F2);
            }(),
            NumericalBlowup);
    }
}

TEST_CASE("discrete potential") {
    SECTION("all particles at the well give V(a)") {
        CHECK(upsilon_N(std::vector<double>(5, 1.0), V, F2) == Catch::Approx(-0.25).margin(1e-14));
    }

    SECTION("two particles at 0 and 1 with F = x^2/2") {
        const InteractionPotential F1 = std::get<InteractionPotential>(validate_interaction({0.0, 0.0, 0.5}));
        // (V(0) + V(1))/2 + (F(-1) + F(1))/8 = -1/8 + 1/8 = 0
        CHECK(upsilon_N({0.0, 1.0}, V, F1) == Catch::Approx(0.0).margin(1e-14));
    }

    SECTION("permutation invariance") {
        std::mt19937_64 gen(17);
        const std::vector<double> xs = random_positions(gen, 20);
        std::vector<double> perm = xs;
        std::shuffle(perm.begin(), perm.end(), gen);
        CHECK(upsilon_N(xs, V, F2) == Catch::Approx(upsilon_N(perm, V, F2)).margin(1e-12));
    }

    SECTION("power-sum route agrees with the double sum") {
        std::mt19937_64 gen(18);
        for (int rep = 0; rep < 20; ++rep) {
            const std::vector<double> xs = random_positions(gen, 40);
            CHECK(upsilon_N_fast(xs, V, F2) == Catch::Approx(upsilon_N(xs, V, F2)).margin(1e-11));
        }
    }

    SECTION("noiseless dynamics decreases the discrete potential monotonically") {
        ParticleConfig cfg(32, 0.0, 1e-3, 1.0);
        std::mt19937_64 gen(19);
        ParticleState st;
        st.positions = random_positions(gen, 32);
        st.positions.resize(32, 0.3);
        double prev = upsilon_N(st.positions, V, F2);
        for (int k = 0; k < 200; ++k) {
            st = em_step(st, cfg, V, F2);
            const double cur = upsilon_N(st.positions, V, F2);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("inverse-CDF sampling reproduces the density's moments") {
    const Grid g(4.0, 801);
    const GridDensity u = mixture_density(g, {-1.0, 1.0}, {0.3, 0.3}, {0.3, 0.7});
    const int n = 200000;
    const std::vector<double> xs = sample_density(u, n, 11);
    const MomentVector target = moments(u, 2);
    const std::vector<double> s = power_sums(xs, 2);
    const double se1 = std::sqrt((s[2] - s[1] * s[1]) / n);
    CHECK(std::abs(s[1] - target[1]) < 4.0 * se1);
    CHECK(std::abs(s[2] - target[2]) < 0.02);
}

TEST_CASE("kernel density estimate roughly recovers a smooth density") {
    const Grid g(4.0, 401);
    const GridDensity u = gaussian_density(g, 0.5, 0.6);
    const std::vector<double> xs = sample_density(u, 50000, 3);
    const GridDensity kde = kde_density(xs, g);
    double worst = 0.0;
    for (int i = 0; i < g.n(); ++i) worst = std::max(worst, std::abs(kde[i] - u[i]));
    CHECK(worst < 0.05);
}

TEST_CASE("full runs") {
    const Grid g(3.0, 401);
    const GridDensity u0 = gaussian_density(g, 0.8, 0.25);

    SECTION("records are reproducible and concentrate in the right well") {
        ParticleConfig cfg(2000, 0.1, 1e-3, 2.0);
        cfg.seed = 5;
        const ParticleRecord a = run_particles(cfg, u0, V, F2, &g);
        const ParticleRecord b = run_particles(cfg, u0, V, F2);
        CHECK(a.moment_history.back()[0] == b.moment_history.back()[0]);
        CHECK(a.moment_history.back()[0] > 0.9);
        CHECK(a.moment_history.back()[0] < 1.1);
        REQUIRE(a.kde_snapshots.size() == 1);
    }

    SECTION("a symmetric cloud keeps its mean near zero") {
        const GridDensity sym = mixture_density(g, {-0.9, 0.9}, {0.3, 0.3}, {0.5, 0.5});
        ParticleConfig cfg(5000, 0.3, 1e-3, 1.5);
        cfg.seed = 2;
        const ParticleRecord rec = run_particles(cfg, sym, V, F2);
        for (const auto& m : rec.moment_history) {
            const double se = std::sqrt(std::max(m[1] - m[0] * m[0], 0.0) / 5000.0);
            CHECK(std::abs(m[0]) < 5.0 * se);
        }
    }

    SECTION("doubling N roughly halves the variance of the final mean") {
        auto variance_of_mean = [&](int n) {
            std::vector<double> finals;
            for (std::uint64_t seed = 0; seed < 64; ++seed) {
                ParticleConfig cfg(n, 0.3, 5e-3, 0.5);
                cfg.seed = seed;
                cfg.record_every = 1000;
                finals.push_back(run_particles(cfg, u0, V, F2).moment_history.back()[0]);
            }
            double mean = 0.0;
            for (double v : finals) mean += v;
            mean /= static_cast<double>(finals.size());
            double var = 0.0;
            for (double v : finals) var += (v - mean) * (v - mean);
            return var / static_cast<double>(finals.size() - 1);
        };
        const double v1 = variance_of_mean(400);
        const double v2 = variance_of_mean(800);
        CHECK(v1 / v2 > 1.3);
        CHECK(v1 / v2 < 3.2);
    }
}

TEST_CASE("counter-based generator") {
    SECTION("same key and counter give the same block; any change decorrelates") {
        const auto a = Philox2x64::block(1, 2, 3);
        const auto b = Philox2x64::block(1, 2, 3);
        CHECK(a == b);
        CHECK(Philox2x64::block(1, 2, 4) != a);
        CHECK(Philox2x64::block(2, 2, 3) != a);
    }

    SECTION("normals have the right first two moments") {
        const int n = 100000;
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z = standard_normal(42, 1, static_cast<std::uint64_t>(i));
            s1 += z;
            s2 += z * z;
        }
        s1 /= n;
        s2 /= n;
        CHECK(std::abs(s1) < 0.01);
        CHECK(std::abs(s2 - 1.0) < 0.02);
    }

    SECTION("uniform01 stays inside the open interval") {
        CHECK(uniform01(0) > 0.0);
        CHECK(uniform01(~0ull) < 1.0);
    }
}
