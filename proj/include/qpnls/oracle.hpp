#pragma once

// Reference solution of the truncated Galerkin system by classical RK4,
//
//   dc/dt = -i D c + i eps N(c),
//
// assembled from the direct convolution so it shares no code with the
// Duhamel engine beyond the convolution sum itself.

#include <span>
#include <vector>

#include "qpnls/fields.hpp"
#include "qpnls/picard.hpp"

namespace qpnls {

struct OdeRun {
  CoefficientField field;  // sampled on the output grid
  int steps = 0;
  // max over RK4 steps of |M(t) - M(0)| and |H(t) - H(0)|
  double mass_drift = 0.0;
  double energy_drift = 0.0;
};

std::vector<Complex> galerkin_rhs(const ModeTable& table, std::span<const Complex> c,
                                  std::span<const double> disp, double epsilon);
// Derivative at node 0 of `snapshot`.
std::vector<Complex> galerkin_rhs(const CoefficientField& snapshot, double epsilon);

// Integrates node 0 of `initial` over `grid` with `steps` equal steps, which
// must be a multiple of the grid's interval count. Throws BlowUpError on a
// non-finite state.
OdeRun rk4_integrate(const CoefficientField& initial, double epsilon, const TimeGrid& grid,
                     int steps);

// sum |c|^2
double mass(std::span<const Complex> c);

// sum D |c|^2 - (eps/2) sum conj(c(m4)) c(m1) conj(c(m2)) c(m3) over in-box
// quadruples with m1 - m2 + m3 = m4.
double energy(const ModeTable& table, std::span<const Complex> c, std::span<const double> disp,
              double epsilon);
double energy(const CoefficientField& field, std::size_t node, double epsilon);

// sup over nodes and modes of |latest Picard iterate - RK4 trajectory|.
// Requires a converged state on the same box, basis and grid.
double compare(const PicardState& state, const OdeRun& run);

}  // namespace qpnls
