#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mckean/pde.hpp"
#include "mckean/stationary.hpp"
#include "test_support.hpp"

using namespace mckean;

namespace {

const ConfiningPotential V = testsupport::standard_quartic();
const InteractionPotential F = testsupport::quadratic_interaction(0.5);

GridDensity classical_gibbs(const Grid& g, double eps) {
    // F ~ 0 limit: u ~ exp(-2V/eps)
    std::vector<double> vals(static_cast<std::size_t>(g.n()));
    for (int i = 0; i < g.n(); ++i) vals[static_cast<std::size_t>(i)] = std::exp(-2.0 / eps * V(g.x(i)));
    return GridDensity::normalized(g, std::move(vals));
}

}  // namespace

TEST_CASE("eta vanishes at self-consistent densities") {
    const Grid g(3.0, 601);
    const double eps = 0.3;

    SECTION("negligible interaction: classical Gibbs state") {
        const InteractionPotential F0 = testsupport::quadratic_interaction(1e-300);
        const GridDensity u = classical_gibbs(g, eps);
        const std::vector<double> et = eta(u, V, F0, eps);
        // centered differences leave an O(dx^2) residual; compare to the node scale
        double umax = 0.0;
        for (double v : u.values()) umax = std::max(umax, v);
        CHECK(sup_norm(et) < 5e-4 * umax);

        // on a fine grid the residual drops below 1e-6 of the node scale
        const Grid fine(3.0, 16001);
        const GridDensity uf = classical_gibbs(fine, eps);
        double ufmax = 0.0;
        for (double v : uf.values()) ufmax = std::max(ufmax, v);
        CHECK(sup_norm(eta(uf, V, F0, eps)) < 1e-6 * ufmax);
    }

    SECTION("self-consistent fixed point: scheme flux residual is roundoff") {
        const auto outcome = fixed_point_solve(moments(gaussian_density(g, 1.0, 0.2), 4), V, F, eps, g);
        REQUIRE(outcome.status == SolveStatus::converged);
        CHECK(outcome.measure->eta_norm <= 1e-7);
        // the node-centered eta is consistent too, within its O(dx^2) floor
        double umax = 0.0;
        for (double v : outcome.measure->density.values()) umax = std::max(umax, v);
        CHECK(sup_norm(eta(outcome.measure->density, V, F, eps)) < 1e-3 * umax);
    }

    SECTION("uniform bump far from equilibrium pushes mass toward the wells") {
        const GridDensity u = uniform_density(g, -0.25, 0.25);
        const std::vector<double> et = eta(u, V, F, eps);
        const int mid = (g.n() - 1) / 2;
        CHECK(et[static_cast<std::size_t>(mid + 20)] < 0.0);
        CHECK(et[static_cast<std::size_t>(mid - 20)] > 0.0);
    }
}

TEST_CASE("a single step preserves stationary inputs") {
    const Grid g(3.0, 401);
    const double eps = 0.3;
    const auto outcome = fixed_point_solve(moments(gaussian_density(g, 1.0, 0.2), 4), V, F, eps, g);
    REQUIRE(outcome.status == SolveStatus::converged);
    const GridDensity u = outcome.measure->density;

    for (Scheme s : {Scheme::semi_implicit, Scheme::explicit_upwind}) {
        SolverConfig cfg(eps, 1e-4, 1.0, s);
        const GridDensity next = step(u, cfg, V, F);
        double worst = 0.0;
        for (int i = 0; i < g.n(); ++i) worst = std::max(worst, std::abs(next[i] - u[i]));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("steps conserve mass and preserve symmetry") {
    const Grid g(3.0, 401);
    SolverConfig cfg(0.3, 2e-4, 1.0, Scheme::semi_implicit);

    GridDensity u = symmetrize(mixture_density(g, {-0.9, 0.9}, {0.3, 0.3}, {1.0, 1.0}));
    double mass_prev = u.mass();
    for (int k = 0; k < 200; ++k) {
        const GridDensity next = step(u, cfg, V, F);
        CHECK(std::abs(next.mass() - mass_prev) < 1e-13);
        mass_prev = next.mass();
        u = next;
    }
    CHECK(is_symmetric(u, 1e-12));
    CHECK(std::abs(u.mass() - 1.0) < 1e-10);
}

TEST_CASE("one step strictly decreases the free energy away from equilibrium") {
    const Grid g(3.0, 401);
    const double eps = 0.3;
    const GridDensity u = gaussian_density(g, 0.5, 0.3);
    const double fe0 = free_energy(u, V, F, eps).total;
    for (Scheme s : {Scheme::semi_implicit, Scheme::explicit_upwind}) {
        SolverConfig cfg(eps, 1e-4, 1.0, s);
        const GridDensity next = step(u, cfg, V, F);
        CHECK(free_energy(next, V, F, eps).total < fe0);
    }
}

TEST_CASE("explicit scheme rejects a CFL-violating time step") {
    const Grid g(3.0, 401);
    const GridDensity u = gaussian_density(g, 0.0, 0.5);
    SolverConfig cfg(0.3, 1.0, 2.0, Scheme::explicit_upwind);
    CHECK_THROWS_AS(step(u, cfg, V, F), StabilityViolation);
}

TEST_CASE("positivity enforcement clamps roundoff dust and rejects real undershoot") {
    const Grid g(1.0, 17);
    std::vector<double> dust(17, 1.0);
    dust[3] = -1e-13;
    pde_detail::enforce_positivity(dust, g);
    CHECK(dust[3] == 0.0);
    CHECK(std::abs(trapezoid(g, dust) - 1.0) < 2e-13);

    std::vector<double> bad(17, 1.0);
    bad[3] = -1e-9;
    CHECK_THROWS_AS(pde_detail::enforce_positivity(bad, g), PositivityLoss);
}

TEST_CASE("the nonmonotone-energy diagnostic throws when armed") {
    const Grid g(3.0, 201);
    SolverConfig cfg(0.3, 1e-3, 0.5, Scheme::semi_implicit, 10);
    cfg.monotone_tol = -1.0;  // impossible bar: any recorded pair trips it
    CHECK_THROWS_AS(evolve(gaussian_density(g, 0.4, 0.4), cfg, V, F), NonmonotoneEnergy);
}

TEST_CASE("evolve: monotone free energy, conserved mass, convergence detection") {
    const Grid g(3.0, 401);
    SolverConfig cfg(0.3, 1e-3, 40.0, Scheme::semi_implicit, 50);
    const TrajectoryRecord rec = evolve(gaussian_density(g, 0.6, 0.4), cfg, V, F);

    for (std::size_t k = 0; k + 1 < rec.free_energy.size(); ++k)
        CHECK(rec.free_energy[k + 1] <= rec.free_energy[k] + 1e-9);
    for (double m : rec.mass_history) CHECK(std::abs(m - 1.0) < 1e-10);
    CHECK(rec.status == RunStatus::converged);
    CHECK(rec.flux_residual_history.back() < 1e-7);
}

TEST_CASE("evolve from a stationary measure is a constant trajectory") {
    const Grid g(3.0, 401);
    const double eps = 0.3;
    const auto outcome = fixed_point_solve(moments(gaussian_density(g, -1.0, 0.2), 4), V, F, eps, g);
    REQUIRE(outcome.status == SolveStatus::converged);
    const GridDensity u0 = outcome.measure->density;

    SolverConfig cfg(eps, 1e-3, 2.0, Scheme::semi_implicit, 100);
    cfg.detect_convergence = false;
    const TrajectoryRecord rec = evolve(u0, cfg, V, F);
    double worst = 0.0;
    for (int i = 0; i < g.n(); ++i) worst = std::max(worst, std::abs(rec.final_density[i] - u0[i]));
    CHECK(worst < 1e-9);
    // dissipation carries the O(dx^2) floor of the node-centered eta
    for (double d : rec.dissipation) CHECK(d < 1e-5);
    for (double fe : rec.free_energy) CHECK(std::abs(fe - rec.free_energy.front()) < 1e-10);
}

TEST_CASE("dissipation inequality along recorded samples") {
    const Grid g(3.0, 401);
    SolverConfig cfg(0.3, 5e-4, 3.0, Scheme::semi_implicit, 20);
    cfg.detect_convergence = false;
    const TrajectoryRecord rec = evolve(gaussian_density(g, 0.4, 0.5), cfg, V, F);
    const DissipationReport rep = dissipation_check(rec);
    CHECK(rep.max_violation < 5e-3);

    SECTION("far from equilibrium the decay is strict at early times") {
        CHECK(rec.free_energy[1] < rec.free_energy[0] - 1e-6);
    }

    SECTION("violations shrink under simultaneous dt, dx refinement") {
        const Grid g2(3.0, 801);
        SolverConfig cfg2(0.3, 2.5e-4, 3.0, Scheme::semi_implicit, 40);
        cfg2.detect_convergence = false;
        const TrajectoryRecord rec2 = evolve(gaussian_density(g2, 0.4, 0.5), cfg2, V, F);
        const DissipationReport rep2 = dissipation_check(rec2);
        CHECK(std::max(rep2.max_violation, 0.0) <= std::max(0.5 * rep.max_violation, 1e-10));
    }
}

TEST_CASE("dissipation_check needs three samples") {
    const TrajectoryRecord rec{.times = {0.0, 1.0},
                               .free_energy = {1.0, 0.5},
                               .dissipation = {0.1, 0.1},
                               .moment_history = {},
                               .mass_history = {},
                               .flux_residual_history = {},
                               .snapshots = {},
                               .final_density = uniform_density(Grid(1.0, 17), -0.5, 0.5),
                               .status = RunStatus::finished};
    CHECK_THROWS_AS(dissipation_check(rec), std::invalid_argument);
}

TEST_CASE("recorded moments stay bounded along a run") {
    const Grid g(3.0, 401);
    SolverConfig cfg(1.0, 5e-4, 2.0, Scheme::semi_implicit, 40);
    cfg.moment_count = 8;
    const TrajectoryRecord rec = evolve(gaussian_density(g, 0.0, 0.8), cfg, V, F);
    for (const MomentVector& m : rec.moment_history)
        for (double v : m.m) CHECK(std::abs(v) < 1e6);
}

TEST_CASE("scheme consistency under refinement") {
    const double eps = 0.3;
    const double t_end = 0.25;

    SECTION("first order in dt") {
        const Grid g(3.0, 201);
        const GridDensity u0 = gaussian_density(g, 0.4, 0.5);
        auto run = [&](double dt) {
            SolverConfig cfg(eps, dt, t_end, Scheme::semi_implicit, 1 << 20);
            cfg.detect_convergence = false;
            return evolve(u0, cfg, V, F).final_density;
        };
        const GridDensity a = run(2.5e-3), b = run(1.25e-3), c = run(6.25e-4);
        double e1 = 0.0, e2 = 0.0;
        for (int i = 0; i < g.n(); ++i) {
            e1 = std::max(e1, std::abs(a[i] - b[i]));
            e2 = std::max(e2, std::abs(b[i] - c[i]));
        }
        CHECK(std::log2(e1 / e2) > 0.8);
    }

    SECTION("second order in dx") {
        auto run = [&](int n) {
            const Grid g(3.0, n);
            SolverConfig cfg(eps, 1e-4, t_end, Scheme::semi_implicit, 1 << 20);
            cfg.detect_convergence = false;
            return evolve(gaussian_density(g, 0.4, 0.5), cfg, V, F).final_density;
        };
        const GridDensity a = run(101), b = run(201), c = run(401);
        // nested grids share every second node
        double e1 = 0.0, e2 = 0.0;
        for (int i = 0; i < 101; ++i) e1 = std::max(e1, std::abs(a[i] - b[2 * i]));
        for (int i = 0; i < 201; ++i) e2 = std::max(e2, std::abs(b[i] - c[2 * i]));
        CHECK(std::log2(e1 / e2) > 1.5);
    }
}
