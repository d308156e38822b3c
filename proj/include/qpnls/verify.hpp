#pragma once

// Empirical checks of the decay, Cauchy and deviation estimates on computed
// Picard iterates. Every check reports the worst measured/claimed ratio.

#include <cstdint>
#include <string>
#include <vector>

#include "qpnls/fields.hpp"
#include "qpnls/picard.hpp"

namespace qpnls {

struct BoundLocation {
  int k = 0;
  std::size_t node = 0;
  std::size_t mode = 0;
};

struct BoundReport {
  std::string bound_name;
  double worst_ratio = 0.0;
  BoundLocation worst_location;
  double tol = 1e-12;
  bool pass = true;
  // t_end within the proven horizon and data of the exponential class.
  bool in_regime = true;
  // Reported for comparison only; never fails a verification.
  bool informational = false;
  std::string note;

  void finish() { pass = worst_ratio <= 1.0 + tol; }
};

constexpr double kDefaultBoundTol = 1e-12;

// Proven horizon for |epsilon| (infinite when epsilon is 0).
double regime_horizon(const DecayProfile& profile, int nu1, int nu2, double epsilon);

// |c_k(t,m,n)| <= A exp(-(kappa1/2)|m| - (kappa2/2)|n|) for every stored k, node, mode.
BoundReport check_uniform_decay(const PicardState& state, const DecayProfile& profile,
                                double tol = kDefaultBoundTol);

// Reports, in order:
//   cauchy_kds            sup-difference bound with the constant as printed
//   cauchy_kds_nu_variant same with exponents 2 nu_j inside the power (informational)
//   cauchy_cke            structural bound with the leaf convolution sum over the box
//   cauchy_ratio          diffs[k+1]/diffs[k] against X/(k+1) at t_end
std::vector<BoundReport> check_cauchy(const PicardState& state, const DecayProfile& profile,
                                      double tol = kDefaultBoundTol);

// Per-direction tail sum_{|a|_1 > R} exp(-(kappa/2)|a|_1) over Z^nu.
double direction_tail(int nu, double kappa, int radius);

// Number of a in Z^nu with |a|_1 = r.
std::uint64_t l1_shell_count(int nu, int r);

// Weight of the modes outside the box:
// sum_{|m| > R1 or |n| > R2} exp(-(kappa1/2)|m| - (kappa2/2)|n|).
double truncation_tail(const DecayProfile& profile, const TruncationBox& box, int nu1, int nu2);

// Weighted norm of (nonlinear - linear) at one node. Requires
// 0 < kappa_j/2 - 2 rho_j <= 1.
double asymptotic_deviation(const CoefficientField& nonlinear, const CoefficientField& linear,
                            const DecayProfile& profile, double rho1, double rho2,
                            std::size_t node);

// sqrt(sum_box exp(2 rho1|m| + 2 rho2|n|) W3(m,n)^2), W3 the in-box cubic
// convolution of exp(-(kappa1/2)|m| - (kappa2/2)|n|). A^3 eps t times this bounds the
// deviation norm of any iterate whose predecessor obeys the decay bound.
double deviation_constant(const CoefficientField& field, const DecayProfile& profile, double rho1,
                          double rho2);

// Deviation of the latest iterate against A^3 |eps| t S_box at every node.
BoundReport check_asymptotic_deviation(const PicardState& state, const DecayProfile& profile,
                                       double rho1, double rho2, double tol = kDefaultBoundTol);

}  // namespace qpnls
