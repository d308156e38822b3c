#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qpnls/combin.hpp"
#include "qpnls/error.hpp"
#include "qpnls/verify.hpp"

using namespace qpnls;
using qpnls::testing::constant_mode;
using qpnls::testing::standard_basis;

namespace {

const auto kUnitProfile = DecayProfile::exponential(1.0, 1.0);

BoundReport by_name(const std::vector<BoundReport>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.bound_name == name) return r;
  FAIL("missing report " << name);
  return {};
}

}  // namespace

TEST_CASE("uniform decay reports") {
  const auto init = generate_initial(standard_basis(), {2, 2}, kUnitProfile, 0);
  const auto lin_only = start_picard(init, TimeGrid::uniform(0.01, 4), 0.01);
  const auto r = check_uniform_decay(lin_only, kUnitProfile);
  CHECK(r.pass);
  CHECK(r.in_regime);
  CHECK(r.worst_ratio == doctest::Approx(1.0 / 1944.0));

  const auto zero = qpnls::testing::zero_field(standard_basis(), {1, 1});
  const auto zs = iterate(zero, TimeGrid::uniform(0.1, 4), 0.5, PicardOptions{3, 0.0});
  CHECK(check_uniform_decay(zs, kUnitProfile).worst_ratio == 0.0);

  const auto cs = iterate(constant_mode(), TimeGrid::uniform(0.001, 4), 0.1, PicardOptions{6, 1e-14});
  const auto cr = check_uniform_decay(cs, kUnitProfile);
  CHECK(cr.in_regime);
  CHECK(cr.pass);

  // planted violation: twice the bound at one node
  auto planted = lin_only;
  planted.iterates[0].at(2, 5) *= 2.0 * 1944.0 / std::abs(planted.iterates[0].at(2, 5)) *
                                 std::exp(-0.5 * double(init.table().l1_x(5) + init.table().l1_y(5)));
  const auto pr = check_uniform_decay(planted, kUnitProfile);
  CHECK(pr.worst_ratio == doctest::Approx(2.0));
  CHECK_FALSE(pr.pass);
  CHECK(pr.worst_location.node == 2);
  CHECK(pr.worst_location.mode == 5);

  const auto poly = check_uniform_decay(lin_only, DecayProfile::polynomial(3, 3));
  CHECK(poly.informational);
  CHECK_FALSE(poly.in_regime);
}

TEST_CASE("cauchy reports") {
  const auto zero_eps = iterate(generate_initial(standard_basis(), {1, 1}, kUnitProfile, 0),
                                TimeGrid::uniform(1.0, 4), 0.0, PicardOptions{5, 1e-12});
  for (const auto& r : check_cauchy(zero_eps, kUnitProfile)) {
    CHECK(r.pass);
    CHECK(r.worst_ratio == 0.0);
  }

  const auto cs = iterate(constant_mode(), TimeGrid::uniform(1.0, 8), 0.1, PicardOptions{1, 0.0});
  const auto rs = check_cauchy(cs, kUnitProfile);
  CHECK(by_name(rs, "cauchy_kds").pass);
  CHECK(by_name(rs, "cauchy_kds").worst_ratio < 1e-6);
  CHECK_FALSE(by_name(rs, "cauchy_kds").in_regime);
  CHECK(by_name(rs, "cauchy_kds_nu_variant").informational);

  const double eps = 0.01;
  const double te = time_scale(kUnitProfile, 2, 2, eps);
  const auto init = generate_initial(standard_basis(), {2, 2}, kUnitProfile, 0);
  const auto run = iterate(init, TimeGrid::uniform(te, 16), eps, PicardOptions{6, 0.0});
  for (const auto& r : check_cauchy(run, kUnitProfile)) {
    CHECK(r.in_regime);
    CHECK(r.pass);
  }
}

TEST_CASE("l1 shell counts against brute force") {
  for (int nu = 1; nu <= 3; ++nu)
    for (int r = 0; r <= 5; ++r) {
      std::uint64_t brute = 0;
      const auto ball = l1_ball(nu, r);
      for (const auto& v : ball) brute += l1_norm(v) == r;
      CHECK(l1_shell_count(nu, r) == brute);
    }
}

TEST_CASE("truncation tails") {
  const double q = std::exp(-0.5);
  CHECK(direction_tail(1, 1.0, 0) == doctest::Approx(2 * q / (1 - q)).epsilon(1e-13));
  CHECK(direction_tail(1, 1.0, 0) == doctest::Approx(3.0830).epsilon(1e-4));
  double prev = 1e300;
  for (int r = 0; r <= 12; ++r) {
    const double t = direction_tail(2, 1.0, r);
    CHECK(t < prev);
    prev = t;
  }
  for (int r : {1, 2, 4, 8})
    CHECK(direction_tail(1, 1.0, 2 * r) <= std::exp(-r / 2.0) * direction_tail(1, 1.0, r) * (1 + 1e-12));

  // full two-direction tail against direct summation over a large cube
  const auto prof = DecayProfile::exponential(1.0, 0.8);
  const TruncationBox box{2, 1};
  double brute = 0.0;
  const int cut = 80;
  for (int a = -cut; a <= cut; ++a)
    for (int b = -cut; b <= cut; ++b) {
      const int lm = std::abs(a) + std::abs(b);
      if (lm > cut) continue;
      for (int c = -cut; c <= cut; ++c) {
        if (lm <= 2 && std::abs(c) <= 1) continue;
        brute += std::exp(-0.5 * lm - 0.4 * std::abs(c));
      }
    }
  CHECK(truncation_tail(prof, box, 2, 1) == doctest::Approx(brute).epsilon(1e-10));
  CHECK(truncation_tail(prof, {40, 40}, 2, 1) < 1e-4 * truncation_tail(prof, box, 2, 1));
  CHECK_THROWS_AS(truncation_tail(DecayProfile::polynomial(3, 3), box, 2, 2), UnsupportedError);
}

TEST_CASE("asymptotic deviation") {
  const auto grid = TimeGrid::uniform(1.0, 64);
  const auto cs = iterate(constant_mode(), grid, 0.1, PicardOptions{12, 1e-14});
  CHECK(asymptotic_deviation(cs.latest(), cs.iterates[0], kUnitProfile, 0.1, 0.1, 0) == 0.0);
  CHECK(asymptotic_deviation(cs.latest(), cs.iterates[0], kUnitProfile, 0.1, 0.1, 64) ==
        doctest::Approx(2 * std::sin(0.05)).epsilon(1e-8));
  CHECK_THROWS_AS(asymptotic_deviation(cs.latest(), cs.iterates[0], kUnitProfile, 0.3, 0.1, 64),
                  ValidationError);

  const auto init = generate_initial(standard_basis(), {1, 1}, kUnitProfile, 0);
  const auto zero = iterate(init, grid, 0.0, PicardOptions{3, 0.0});
  for (std::size_t j = 0; j < grid.num_points(); ++j)
    CHECK(asymptotic_deviation(zero.latest(), zero.iterates[0], kUnitProfile, 0.1, 0.1, j) == 0.0);

  // linear in epsilon at fixed t
  std::vector<double> scaled;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto s = iterate(init, TimeGrid::uniform(0.05, 16), eps, PicardOptions{20, 1e-15});
    scaled.push_back(asymptotic_deviation(s.latest(), s.iterates[0], kUnitProfile, 0.1, 0.1, 16) / eps);
    const auto r = check_asymptotic_deviation(s, kUnitProfile, 0.1, 0.1);
    CHECK(r.pass);
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  CHECK(*hi / *lo < 1.1);

  CHECK(deviation_constant(constant_mode(), kUnitProfile, 0.1, 0.1) == doctest::Approx(1.0));
}
