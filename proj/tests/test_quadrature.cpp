#include <doctest.h>

#include <cmath>

#include "qpnls/error.hpp"
#include "qpnls/quadrature.hpp"

using namespace qpnls;

namespace {

std::vector<Complex> sample(int n, double h, Complex (*f)(double)) {
  std::vector<Complex> v(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = f(i * h);
  return v;
}

}  // namespace

TEST_CASE("cumulative integral is exact on cubics") {
  auto cubic = [](double s) { return Complex(1.0 - 2.0 * s + 3.0 * s * s, s * s * s); };
  auto prim = [](double t) { return Complex(t - t * t + t * t * t, t * t * t * t / 4.0); };
  for (int n : {2, 3, 4, 5, 8, 9}) {
    const double h = 0.3;
    const auto q = cumulative_integral(sample(n, h, +cubic), h);
    REQUIRE(q.size() == static_cast<std::size_t>(n) + 1);
    CHECK(q[0] == Complex(0.0));
    for (int i = 1; i <= n; ++i) {
      // with only three samples the first step is the quadratic rule
      if (n == 2 && i == 1) continue;
      CHECK(std::abs(q[static_cast<std::size_t>(i)] - prim(i * h)) < 1e-13);
    }
  }
}

TEST_CASE("cumulative integral converges at fourth order") {
  auto f = [](double s) { return std::exp(Complex(0.0, 3.0) * s); };
  auto exact = [](double t) { return (std::exp(Complex(0.0, 3.0) * t) - 1.0) / Complex(0.0, 3.0); };
  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    const double h = 2.0 / n;
    const auto q = cumulative_integral(sample(n, h, +f), h);
    double err = 0.0;
    for (int i = 1; i <= n; ++i) err = std::max(err, std::abs(q[static_cast<std::size_t>(i)] - exact(i * h)));
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(4.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("cumulative integral input checks") {
  std::vector<Complex> two(2);
  CHECK_THROWS_AS(cumulative_integral(two, 0.1), ValidationError);
}
