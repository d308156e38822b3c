#pragma once

#include <span>
#include <vector>

#include "qpnls/lattice.hpp"

namespace qpnls {

// Cumulative integrals Q_i = int_0^{t_i} f on a uniform grid with spacing h.
//
// Even i: composite Simpson over [0, t_i]. Odd i >= 3: Simpson over the first
// i-3 intervals and the 3/8 rule over the last three. i = 1: integral of the
// cubic through f_0..f_3 (quadratic through f_0..f_2 when only three samples
// exist). Fourth order everywhere when at least four samples are given.
// Requires f.size() >= 3.
std::vector<Complex> cumulative_integral(std::span<const Complex> f, double h);

// Same scheme, writing into `out` (resized to f.size()).
void cumulative_integral(std::span<const Complex> f, double h, std::vector<Complex>& out);

}  // namespace qpnls
