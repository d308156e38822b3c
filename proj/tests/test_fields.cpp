#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qpnls/error.hpp"
#include "qpnls/fields.hpp"

using namespace qpnls;
using qpnls::testing::standard_basis;

TEST_CASE("decay profiles") {
  const auto e = DecayProfile::exponential(1.0, 1.0);
  CHECK(e.weight(0, 0) == 1.0);
  CHECK(e.weight(1, 2) == doctest::Approx(std::exp(-3.0)));
  const auto p = DecayProfile::polynomial(3.0, 3.0);
  CHECK(p.weight(1, 1) == doctest::Approx(1.0 / 64.0));
  CHECK_NOTHROW(p.validate(2, 2));
  CHECK_THROWS_AS(DecayProfile::polynomial(2.0, 3.0).validate(2, 2), ValidationError);
  CHECK_THROWS_AS(DecayProfile::exponential(1.5, 1.0).validate(2, 2), ValidationError);
  CHECK_THROWS_AS(DecayProfile::exponential(0.0, 1.0).validate(2, 2), ValidationError);
}

TEST_CASE("time grid") {
  const auto g = TimeGrid::uniform(2.0, 8);
  CHECK(g.num_points() == 9);
  CHECK(g.time(0) == 0.0);
  CHECK(g.time(8) == 2.0);
  CHECK(g.step() == 0.25);
  CHECK_THROWS_AS(TimeGrid::uniform(1.0, 3), ValidationError);
  CHECK_THROWS_AS(TimeGrid::uniform(1.0, 0), ValidationError);
  CHECK_THROWS_AS(TimeGrid::uniform(-1.0, 2), ValidationError);
  CHECK(TimeGrid::single().num_points() == 1);
}

TEST_CASE("initial data attains the profile") {
  const auto b = standard_basis();
  const TruncationBox box{2, 2};
  const auto prof = DecayProfile::exponential(1.0, 1.0);
  const auto f = generate_initial(b, box, prof, 0);
  const auto& t = f.table();
  CHECK(f.at(0, 0) == Complex(1.0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(f.at(0, i).imag() == 0.0);
    CHECK(f.at(0, i).real() == doctest::Approx(std::exp(-double(t.l1_x(i) + t.l1_y(i)))));
  }
  const auto idx = *t.find({{1, 0}, {0, 2}});
  CHECK(f.at(0, idx).real() == doctest::Approx(std::exp(-3.0)));

  const auto g = generate_initial(b, box, prof, 42);
  const auto g2 = generate_initial(b, box, prof, 42);
  CHECK(g.values() == g2.values());
  bool some_complex = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(g.at(0, i)) == doctest::Approx(f.at(0, i).real()));
    some_complex = some_complex || std::abs(g.at(0, i).imag()) > 1e-3;
  }
  CHECK(some_complex);

  // weighted norm at rho = 0 against independent summation
  double s = 0.0;
  for (int a = -2; a <= 2; ++a)
    for (int b1 = -2; b1 <= 2; ++b1)
      for (int c = -2; c <= 2; ++c)
        for (int d = -2; d <= 2; ++d) {
          const int lm = std::abs(a) + std::abs(b1), ln = std::abs(c) + std::abs(d);
          if (lm <= 2 && ln <= 2) s += std::exp(-2.0 * (lm + ln));
        }
  CHECK(std::abs(weighted_h_norm(f, 0, 0.0, 0.0) - std::sqrt(s)) < 1e-12);
}

TEST_CASE("weighted norm") {
  auto one = qpnls::testing::constant_mode();
  CHECK(weighted_h_norm(one, 0, 0.3, 0.2) == 1.0);
  auto f = qpnls::testing::zero_field(standard_basis(), {1, 1});
  const auto a = *f.table().find({{1, 0}, {0, 0}});
  f.at(0, a) = 2.0;
  CHECK(weighted_h_norm(f, 0, 0.25, 0.0) == doctest::Approx(2.0 * std::exp(0.25)));
  f.at(0, a) = 1.0;
  f.at(0, 0) = Complex(0.0, 1.0);
  CHECK(weighted_h_norm(f, 0, 0.0, 0.0) == doctest::Approx(std::numbers::sqrt2));
  CHECK_THROWS_AS(weighted_h_norm(f, 0, -0.1, 0.0), ValidationError);
  CHECK(weighted_norm_in_range(DecayProfile::exponential(1, 1), 0.1, 0.1));
  CHECK_FALSE(weighted_norm_in_range(DecayProfile::exponential(1, 1), 0.25, 0.1));
}

TEST_CASE("synthesis") {
  auto one = qpnls::testing::constant_mode();
  const std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.3, -2.0}, {100.0, 7.0}};
  for (auto z : synthesize(one, 0, pts)) CHECK(std::abs(z - 1.0) < 1e-15);

  auto f = qpnls::testing::zero_field(standard_basis(), {1, 1});
  f.at(0, *f.table().find({{1, 0}, {0, 0}})) = 1.0;
  const std::vector<std::pair<double, double>> pi_pt{{std::numbers::pi, 0.0}};
  CHECK(std::abs(synthesize(f, 0, pi_pt)[0] - Complex(-1.0)) < 1e-14);

  const auto g = generate_initial(standard_basis(), {2, 1}, DecayProfile::exponential(1, 1), 5);
  Complex sum{};
  for (auto z : g.node(0)) sum += z;
  const std::vector<std::pair<double, double>> origin{{0.0, 0.0}};
  CHECK(std::abs(synthesize(g, 0, origin)[0] - sum) < 1e-14);

  CoefficientField scaled = g;
  const Complex alpha(0.3, -1.2);
  for (std::size_t i = 0; i < g.num_modes(); ++i) scaled.at(0, i) *= alpha;
  const auto u = synthesize(g, 0, pts);
  const auto v = synthesize(scaled, 0, pts);
  for (std::size_t p = 0; p < pts.size(); ++p) CHECK(std::abs(v[p] - alpha * u[p]) < 1e-13);
}

TEST_CASE("quasi-periodicity near-period spot check") {
  // 99/70 is a continued-fraction convergent of sqrt 2, so L = 2 pi * 70
  // nearly returns every active x-frequency m1 + m2 sqrt 2 to phase zero.
  const FrequencyBasis b({1.0, std::numbers::sqrt2}, {1.0, std::numbers::sqrt3});
  const auto g = generate_initial(b, {1, 0}, DecayProfile::exponential(1, 1), 3);
  const double L = 2.0 * std::numbers::pi * 70.0;
  const std::vector<std::pair<double, double>> pts{{0.4, 0.0}, {0.4 + L, 0.0}, {0.4 + 0.37 * L, 0.0}};
  const auto u = synthesize(g, 0, pts);
  CHECK(std::abs(u[1] - u[0]) < 0.05);
  CHECK(std::abs(u[2] - u[0]) > 0.05);
}

TEST_CASE("linear evolution") {
  const auto b = standard_basis();
  const auto init = generate_initial(b, {2, 2}, DecayProfile::exponential(1, 1), 9);
  const auto grid = TimeGrid::uniform(1.5, 6);
  const auto lin = linear_evolution(init, grid);
  for (std::size_t i = 0; i < init.num_modes(); ++i) CHECK(lin.at(0, i) == init.at(0, i));
  for (std::size_t j = 0; j < lin.num_nodes(); ++j) {
    CHECK(lin.at(j, 0) == init.at(0, 0));
    for (std::size_t i = 0; i < init.num_modes(); ++i)
      CHECK(std::abs(lin.at(j, i)) == doctest::Approx(std::abs(init.at(0, i))).epsilon(1e-14));
    CHECK(weighted_h_norm(lin, j, 0.1, 0.2) ==
          doctest::Approx(weighted_h_norm(init, 0, 0.1, 0.2)).epsilon(1e-13));
  }
}

TEST_CASE("sup weighted residual") {
  const auto prof = DecayProfile::exponential(1, 1);
  const auto zero = qpnls::testing::zero_field(standard_basis(), {2, 2});
  CHECK(sup_weighted_residual(zero, prof, 1.0) == 0.0);

  auto at_bound = zero;
  for (std::size_t i = 0; i < at_bound.num_modes(); ++i)
    at_bound.at(0, i) = std::exp(-0.5 * double(at_bound.table().l1_x(i) + at_bound.table().l1_y(i)));
  CHECK(sup_weighted_residual(at_bound, prof, 1.0) == doctest::Approx(1.0));

  const auto init = generate_initial(standard_basis(), {2, 2}, prof, 0);
  const auto lin = linear_evolution(init, TimeGrid::uniform(1.0, 4));
  CHECK(sup_weighted_residual(lin, prof, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sup_weighted_residual(lin, DecayProfile::polynomial(3, 3), 1.0), UnsupportedError);
}
