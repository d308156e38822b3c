#include "qpnls/quadrature.hpp"

#include "qpnls/error.hpp"

namespace qpnls {

void cumulative_integral(std::span<const Complex> f, double h, std::vector<Complex>& out) {
  const std::size_t n = f.size();
  if (n < 3) throw ValidationError("cumulative quadrature needs at least three samples");
  out.assign(n, Complex{});

  // Simpson prefix sums at even indices.
  for (std::size_t i = 2; i < n; i += 2)
    out[i] = out[i - 2] + (h / 3.0) * (f[i - 2] + 4.0 * f[i - 1] + f[i]);

  if (n >= 4) {
    out[1] = (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  } else {
    out[1] = (h / 12.0) * (5.0 * f[0] + 8.0 * f[1] - f[2]);
  }

  for (std::size_t i = 3; i < n; i += 2)
    out[i] = out[i - 3] + (3.0 * h / 8.0) * (f[i - 3] + 3.0 * f[i - 2] + 3.0 * f[i - 1] + f[i]);
}

std::vector<Complex> cumulative_integral(std::span<const Complex> f, double h) {
  std::vector<Complex> out;
  cumulative_integral(f, h, out);
  return out;
}

}  // namespace qpnls
