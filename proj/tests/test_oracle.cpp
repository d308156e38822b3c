#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qpnls/error.hpp"
#include "qpnls/oracle.hpp"

using namespace qpnls;
using qpnls::testing::constant_mode;
using qpnls::testing::standard_basis;

TEST_CASE("galerkin right hand side") {
  // constant mode: dc/dt = i eps |c|^2 c
  const auto rhs = galerkin_rhs(constant_mode(2.0), 0.5);
  REQUIRE(rhs.size() == 1);
  CHECK(rhs[0].real() == doctest::Approx(0.0));
  CHECK(rhs[0].imag() == doctest::Approx(4.0));

  // eps = 0 is pure rotation
  const auto init = generate_initial(standard_basis(), {1, 1}, DecayProfile::exponential(1, 1), 3);
  const auto lin = galerkin_rhs(init, 0.0);
  const auto disp = dispersions(init.basis(), init.table());
  for (std::size_t i = 0; i < lin.size(); ++i)
    CHECK(std::abs(lin[i] - Complex(0.0, -disp[i]) * init.at(0, i)) < 1e-15);
}

TEST_CASE("rk4 on the constant mode") {
  const auto grid = TimeGrid::uniform(1.0, 10);
  const auto run = rk4_integrate(constant_mode(), 0.1, grid, 1000);
  CHECK(run.steps == 1000);
  for (std::size_t i = 0; i < grid.num_points(); ++i)
    CHECK(std::abs(run.field.at(i, 0) - std::polar(1.0, 0.1 * grid.time(i))) < 1e-10);
  CHECK(run.mass_drift < 1e-12);

  // fourth order: halving the step cuts the error by about 16
  const double e1 = std::abs(rk4_integrate(constant_mode(), 2.0, grid, 20).field.at(10, 0) -
                             std::polar(1.0, 2.0));
  const double e2 = std::abs(rk4_integrate(constant_mode(), 2.0, grid, 40).field.at(10, 0) -
                             std::polar(1.0, 2.0));
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.08));

  CHECK_THROWS_AS(rk4_integrate(constant_mode(), 0.1, grid, 15), ValidationError);
  CHECK_THROWS_AS(rk4_integrate(constant_mode(), 0.1, TimeGrid::single(), 10), ValidationError);
}

TEST_CASE("rk4 with eps = 0 is the linear flow") {
  const auto init = generate_initial(standard_basis(), {2, 1}, DecayProfile::exponential(1, 1), 7);
  const auto grid = TimeGrid::uniform(0.5, 4);
  const auto run = rk4_integrate(init, 0.0, grid, 400);
  const auto lin = linear_evolution(init, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < lin.values().size(); ++i)
    worst = std::max(worst, std::abs(lin.values()[i] - run.field.values()[i]));
  CHECK(worst < 1e-9);
}

TEST_CASE("mass and energy") {
  CHECK(mass(constant_mode().node(0)) == 1.0);
  const std::vector<Complex> c = {Complex(1, 0), Complex(0, 0.5)};
  CHECK(mass(c) == doctest::Approx(1.25));

  CHECK(energy(constant_mode(), 0, 0.2) == doctest::Approx(-0.1));

  const auto init = generate_initial(standard_basis(), {1, 1}, DecayProfile::exponential(1, 1), 11);
  const double eps = 0.3;
  const auto run = rk4_integrate(init, eps, TimeGrid::uniform(0.5, 4), 2000);
  const double m0 = mass(init.node(0));
  const double h0 = energy(init, 0, eps);
  CHECK(run.mass_drift < 1e-10 * m0);
  CHECK(run.energy_drift < 1e-9 * std::max(1.0, std::abs(h0)));
  CHECK(std::abs(mass(run.field.node(4)) - m0) < 1e-10);
  CHECK(std::abs(energy(run.field, 4, eps) - h0) < 1e-9 * std::max(1.0, std::abs(h0)));
}

TEST_CASE("compare against a picard state") {
  const auto grid = TimeGrid::uniform(0.5, 16);
  const auto state = iterate(constant_mode(), grid, 0.1, PicardOptions{30, 1e-14});
  REQUIRE(state.converged);
  const auto run = rk4_integrate(constant_mode(), 0.1, grid, 160);
  CHECK(compare(state, run) < 1e-9);

  const auto other = rk4_integrate(constant_mode(), 0.1, TimeGrid::uniform(0.5, 8), 80);
  CHECK_THROWS_AS(compare(state, other), ValidationError);

  const auto partial = iterate(constant_mode(), grid, 0.1, PicardOptions{1, 0.0});
  CHECK_FALSE(partial.converged);
  CHECK_THROWS_AS(compare(partial, run), ValidationError);
}
