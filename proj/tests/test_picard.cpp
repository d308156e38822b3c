#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qpnls/error.hpp"
#include "qpnls/picard.hpp"

using namespace qpnls;
using qpnls::testing::constant_mode;
using qpnls::testing::standard_basis;

namespace {

using Poly = std::vector<Complex>;  // coefficients in s

Poly mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Complex eval(const Poly& p, double s) {
  Complex v{};
  for (std::size_t i = p.size(); i-- > 0;) v = v * s + p[i];
  return v;
}

// Exact k-th Picard iterate of the constant-mode problem, c_0 = 1.
Poly exact_iterate(int k, double eps) {
  Poly c{1.0};
  for (int j = 0; j < k; ++j) {
    Poly conj_c(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) conj_c[i] = std::conj(c[i]);
    const Poly g = mul(mul(c, conj_c), c);
    Poly next(g.size() + 1);
    next[0] = 1.0;
    for (std::size_t i = 0; i < g.size(); ++i) next[i + 1] = Complex(0.0, eps) * g[i] / double(i + 1);
    c = next;
  }
  return c;
}

}  // namespace

TEST_CASE("constant mode first and second iterates are exact") {
  const double eps = 0.3;
  const auto grid = TimeGrid::uniform(2.0, 8);
  const auto state = iterate(constant_mode(), grid, eps, PicardOptions{2, 0.0});
  REQUIRE(state.last_k() == 2);
  const auto p2 = exact_iterate(2, eps);
  for (std::size_t j = 0; j < grid.num_points(); ++j) {
    const double t = grid.time(j);
    CHECK(std::abs(state.iterates[1].at(j, 0) - Complex(1.0, eps * t)) < 1e-14);
    CHECK(std::abs(state.iterates[2].at(j, 0) - eval(p2, t)) < 1e-13);
  }
  CHECK(state.diff(1) == doctest::Approx(eps * 2.0));
}

TEST_CASE("constant mode converges to the exact solution") {
  const auto grid = TimeGrid::uniform(1.0, 64);
  const auto state = iterate(constant_mode(), grid, 0.1, PicardOptions{8, 1e-14});
  CHECK(std::abs(state.latest().at(64, 0) - std::polar(1.0, 0.1)) < 1e-6);
  CHECK(state.diff(1) == doctest::Approx(0.1));
}

TEST_CASE("quadrature order at fixed k") {
  const double eps = 1.0;
  const auto exact = eval(exact_iterate(3, eps), 1.0);
  double prev = 0.0;
  for (int n : {8, 16, 32}) {
    const auto state = iterate(constant_mode(), TimeGrid::uniform(1.0, n), eps, PicardOptions{3, 0.0});
    const double err = std::abs(state.latest().at(static_cast<std::size_t>(n), 0) - exact);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(4.0).epsilon(0.3 / 4.0));
    prev = err;
  }
}

TEST_CASE("epsilon zero is a fixed point") {
  const auto init = generate_initial(standard_basis(), {1, 1}, DecayProfile::exponential(1, 1), 2);
  const auto grid = TimeGrid::uniform(0.5, 4);
  const auto state = iterate(init, grid, 0.0, PicardOptions{10, 1e-12});
  CHECK(state.last_k() == 1);
  CHECK(state.diff(1) == 0.0);
  CHECK(state.converged);
  const auto lin = linear_evolution(init, grid);
  CHECK(cauchy_diff(state.latest(), lin) == 0.0);
}

TEST_CASE("parity and reflection invariants of seed-0 data") {
  const auto init = generate_initial(standard_basis(), {2, 2}, DecayProfile::exponential(1, 1), 0);
  const auto grid = TimeGrid::uniform(0.2, 8);
  const auto state = iterate(init, grid, 0.05, PicardOptions{4, 0.0});
  const auto& t = init.table();
  for (const auto& f : state.iterates)
    for (std::size_t j = 0; j < f.num_nodes(); ++j)
      for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(f.at(j, t.negation(i)) - f.at(j, i)) < 1e-15);
        ModeIndex mx = t[i];
        for (auto& x : mx.m) x = -x;
        CHECK(std::abs(f.at(j, *t.find(mx)) - f.at(j, i)) < 1e-15);
      }
  // conj(c(t,-m,-n)) differs from c(t,m,n) once the phases turn
  const auto i = *t.find({{1, 0}, {0, 0}});
  CHECK(std::abs(std::conj(state.latest().at(8, t.negation(i))) - state.latest().at(8, i)) > 1e-3);
}

TEST_CASE("gauge covariance") {
  const auto init = generate_initial(standard_basis(), {1, 1}, DecayProfile::exponential(1, 1), 8);
  auto rotated = init;
  const Complex g = std::polar(1.0, 0.7);
  for (std::size_t i = 0; i < init.num_modes(); ++i) rotated.at(0, i) *= g;
  const auto grid = TimeGrid::uniform(0.3, 8);
  const auto a = iterate(init, grid, 0.2, PicardOptions{4, 0.0});
  const auto b = iterate(rotated, grid, 0.2, PicardOptions{4, 0.0});
  for (int k = 0; k <= 4; ++k)
    for (std::size_t v = 0; v < a.iterates[0].values().size(); ++v)
      CHECK(std::abs(b.iterates[k].values()[v] - g * a.iterates[k].values()[v]) < 1e-12);
}

TEST_CASE("diffs decay geometrically on a radius-2 box") {
  const auto init = generate_initial(standard_basis(), {2, 2}, DecayProfile::exponential(1, 1), 0);
  const auto state = iterate(init, TimeGrid::uniform(0.1, 16), 0.01, PicardOptions{8, 0.0});
  for (int k = 2; k <= 8; ++k) CHECK(state.diff(k) < 0.1 * state.diff(k - 1));
}

TEST_CASE("divergence is reported with its step") {
  try {
    iterate(constant_mode(), TimeGrid::uniform(1.0, 8), 20.0, PicardOptions{30, 1e-12});
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() >= 3);
    CHECK(std::string(e.what()).find(std::to_string(e.step())) != std::string::npos);
  }
}

TEST_CASE("cauchy diff") {
  const auto init = generate_initial(standard_basis(), {1, 1}, DecayProfile::exponential(1, 1), 1);
  const auto lin = linear_evolution(init, TimeGrid::uniform(1.0, 4));
  CHECK(cauchy_diff(lin, lin) == 0.0);
  auto shifted = lin;
  shifted.at(2, 3) += 1e-3;
  CHECK(cauchy_diff(lin, shifted) == doctest::Approx(1e-3));
  CHECK_THROWS_AS(cauchy_diff(lin, init), ValidationError);
  CHECK_THROWS_AS(start_picard(init, TimeGrid::single(), 0.1), ValidationError);
}
