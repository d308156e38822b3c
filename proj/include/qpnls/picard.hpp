#pragma once

// Picard iteration of the Duhamel formula on the truncated lattice:
//
//   c_0(t) = Phi^t c(0),
//   c_k(t) = Phi^t c(0) + i eps int_0^t Phi^{t-s} N(c_{k-1}(s)) ds,
//
// where Phi^t = exp(-i (<m,omega>^2 + <n,omega'>^2) t) and N is the cubic
// convolution. The integral uses the cumulative scheme in quadrature.hpp on
// the field's own time grid.

#include <vector>

#include "qpnls/convolution.hpp"
#include "qpnls/fields.hpp"

namespace qpnls {

struct PicardState {
  std::vector<CoefficientField> iterates;  // c_0 .. c_k
  double epsilon = 0.0;
  // cauchy[k-1] = max |c_k - c_{k-1}| over nodes and modes.
  std::vector<double> cauchy;
  bool converged = false;

  int last_k() const { return static_cast<int>(iterates.size()) - 1; }
  double diff(int k) const { return cauchy.at(static_cast<std::size_t>(k - 1)); }
  const CoefficientField& latest() const { return iterates.back(); }
};

struct PicardOptions {
  int k_max = 30;
  double tol = 1e-12;
};

// State holding only the linear solution c_0 on `grid`.
PicardState start_picard(const CoefficientField& initial, const TimeGrid& grid, double epsilon);

CoefficientField duhamel_step(const CoefficientField& prev, double epsilon,
                              const ConvolutionPlan& plan);
CoefficientField duhamel_step(const CoefficientField& prev, double epsilon);

// Extends `state` until k reaches k_max or the last Cauchy difference is at
// most tol. Throws DivergenceError when the difference grows more than tenfold
// on two consecutive steps.
PicardState iterate(PicardState state, const PicardOptions& options);

PicardState iterate(const CoefficientField& initial, const TimeGrid& grid, double epsilon,
                    const PicardOptions& options);

double cauchy_diff(const CoefficientField& a, const CoefficientField& b);

}  // namespace qpnls
