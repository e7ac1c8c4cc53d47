#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dirac/analysis.hpp"
#include "helpers.hpp"

using namespace dirac;

TEST_SUITE("analysis") {

TEST_CASE("estimate constant") {
    Geometry g = Geometry::strip();
    CHECK(estimate_constant(g, 0.0, 1.0) == 2.0);
    g.lapse = TimeFunction::sin_affine(1.0, 0.5, 1.0, 0.0);
    CHECK(estimate_constant(g, 0.0, 2.0 * std::numbers::pi) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(estimate_constant(g, 0.0, 0.5) <= estimate_constant(g, 0.0, 1.0));
    CHECK(estimate_constant(g, 0.2, 0.5) <= estimate_constant(g, 0.0, 0.5));
}

TEST_CASE("energy of the explicit solution is constant") {
    InitialData d;
    d.bumps.push_back({0.4, 0.2, Vec2(1.0, cplx(0.0, 0.3)), 0});
    const Grid grid = Grid::make(128);
    const double e0 = std::pow(h_norm(grid, exact_transmission_field(d, 0.0, grid)), 2);
    for (double s : {0.1, 0.37, 0.5, 0.93})
        CHECK(std::abs(std::pow(h_norm(grid, exact_transmission_field(d, s, grid)), 2) - e0) <= grid.h * grid.h * e0);
}

TEST_CASE("trajectory energy, flux and estimate") {
    const Geometry g = Geometry::strip();
    const CliffordModel m = make_clifford_model(1);
    const BoundaryOperatorSpec spec(g, m);
    const Grid grid = Grid::make(64);
    CauchyData zero;
    zero.t_end = 0.1;
    SolverOptions o;
    o.dt = 0.01;
    const Trajectory tz = solve_cauchy(zero, g, m, transmission_family(spec), grid, o);
    CHECK(energy(tz, 3) == 0.0);
    CHECK(boundary_flux(tz, 3) == 0.0);

    CauchyData d;
    d.psi0.bumps.push_back({0.5, 0.3, Vec2(1.0, 0.5), 0});
    d.t_begin = -0.5;
    d.t_end = 0.5;
    const Trajectory t = solve_cauchy(d, g, m, transmission_family(spec), grid, o);
    for (std::size_t n = 0; n < t.size(); ++n) CHECK(std::abs(boundary_flux(t, n)) < 1e-10 * energy(t, n));
    const auto fwd = check_energy_estimate(t, d.source, 0.0, 0.5);
    CHECK(fwd.pass);
    CHECK(fwd.constant == 2.0);
    CHECK(fwd.slack == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
    const auto back = check_energy_estimate(t, d.source, -0.5, 0.0, true);
    CHECK(back.pass);
}

TEST_CASE("space-time norm of a separable source") {
    const Geometry g = Geometry::strip();
    const Grid grid = Grid::make(101);
    const Source f({{0, TimeFunction::constant(2.0), 0.5, 0.2, Vec2(1.0, 0.0)}});
    InitialData shape;
    shape.bumps.push_back({0.5, 0.2, Vec2(1.0, 0.0), 0});
    const double x = std::pow(h_norm(grid, shape.sample(grid, 0)), 2);
    CHECK(spacetime_norm_sq(f, g, grid, 0.0, 0.5) == doctest::Approx(4.0 * 0.5 * x).epsilon(1e-12));
}

TEST_CASE("support on the transmission strip") {
    const Geometry g = Geometry::strip();
    const CliffordModel m = make_clifford_model(1);
    const BoundaryOperatorSpec spec(g, m);
    CauchyData d;
    d.psi0.bumps.push_back({0.3, 0.05, Vec2(1.0, 0.0), 0});
    d.t_end = 0.3;
    const CausalRegion at02 = allowed_region(g, d, 0.2, false);
    REQUIRE(at02.intervals().size() == 1);
    CHECK(at02.intervals()[0].lo == doctest::Approx(0.05));
    CHECK(at02.intervals()[0].hi == doctest::Approx(0.55));
    const CausalRegion at03 = allowed_region(g, d, 0.3, false);
    CHECK(at03.intervals().size() == 2);
    const CausalRegion local = allowed_region(g, d, 0.3, true);
    CHECK(local.intervals().size() == 1);

    const Grid grid = Grid::make(256);
    std::vector<Field> at(1, exact_transmission_field(d.psi0, 0.2, grid));
    CHECK(energy_fraction(grid, at, 0.6, 1.0) == 0.0);
    at[0] = exact_transmission_field(d.psi0, 0.3, grid);
    CHECK(energy_fraction(grid, at, 0.9, 1.0) >= 0.2);
}

}
