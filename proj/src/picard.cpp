#include "qpnls/picard.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qpnls/error.hpp"
#include "qpnls/quadrature.hpp"

namespace qpnls {

PicardState start_picard(const CoefficientField& initial, const TimeGrid& grid, double epsilon) {
  if (grid.is_single()) throw ValidationError("Picard iteration needs a grid with N >= 2");
  if (!std::isfinite(epsilon)) throw ValidationError("epsilon must be finite");
  PicardState state;
  state.epsilon = epsilon;
  state.iterates.push_back(linear_evolution(initial.snapshot(0), grid));
  return state;
}

CoefficientField duhamel_step(const CoefficientField& prev, double epsilon,
                              const ConvolutionPlan& plan) {
  const auto& grid = prev.grid();
  if (grid.is_single()) throw ValidationError("Duhamel step needs a grid with N >= 2");
  const std::size_t nodes = grid.num_points();
  const std::size_t modes = prev.num_modes();
  const auto disp = dispersions(prev.basis(), prev.table());

  // g(s) = Phi^{-s} N(c(s)), stored node-major.
  std::vector<Complex> g(nodes * modes);
  for (std::size_t j = 0; j < nodes; ++j) {
    std::span<Complex> dst(g.data() + j * modes, modes);
    plan.apply(prev.node(j), dst);
    const double s = grid.time(j);
    for (std::size_t i = 0; i < modes; ++i) dst[i] *= std::polar(1.0, disp[i] * s);
  }

  CoefficientField next(prev.basis(), prev.table_ptr(), grid);
  const auto c0 = prev.node(0);
  const Complex ie(0.0, epsilon);
  const double h = grid.step();
  std::vector<Complex> column(nodes), integral;
  for (std::size_t i = 0; i < modes; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) column[j] = g[j * modes + i];
    cumulative_integral(column, h, integral);
    next.at(0, i) = c0[i];
    for (std::size_t j = 1; j < nodes; ++j)
      next.at(j, i) = std::polar(1.0, -disp[i] * grid.time(j)) * (c0[i] + ie * integral[j]);
  }
  if (!next.all_finite())
    throw DivergenceError("Duhamel step produced non-finite coefficients", -1);
  return next;
}

CoefficientField duhamel_step(const CoefficientField& prev, double epsilon) {
  return duhamel_step(prev, epsilon, ConvolutionPlan(prev.table()));
}

PicardState iterate(PicardState state, const PicardOptions& options) {
  if (options.k_max < 1) throw ValidationError("k_max must be >= 1");
  if (state.iterates.empty()) throw ValidationError("Picard state has no linear iterate");
  const ConvolutionPlan plan(state.iterates.front().table());
  state.converged = !state.cauchy.empty() && state.cauchy.back() <= options.tol;
  while (!state.converged && state.last_k() < options.k_max) {
    const int k = state.last_k() + 1;
    CoefficientField next = [&] {
      try {
        return duhamel_step(state.latest(), state.epsilon, plan);
      } catch (const DivergenceError&) {
        throw DivergenceError("Picard step " + std::to_string(k) + " produced non-finite values", k);
      }
    }();
    const double d = cauchy_diff(next, state.latest());
    state.iterates.push_back(std::move(next));
    state.cauchy.push_back(d);
    const std::size_t n = state.cauchy.size();
    if (n >= 3 && state.cauchy[n - 1] > 10.0 * state.cauchy[n - 2] &&
        state.cauchy[n - 2] > 10.0 * state.cauchy[n - 3]) {
      throw DivergenceError("Picard iteration diverges at step " + std::to_string(k) +
                                ": difference grew more than tenfold twice in a row",
                            k);
    }
    state.converged = d <= options.tol;
  }
  return state;
}

PicardState iterate(const CoefficientField& initial, const TimeGrid& grid, double epsilon,
                    const PicardOptions& options) {
  return iterate(start_picard(initial, grid, epsilon), options);
}

double cauchy_diff(const CoefficientField& a, const CoefficientField& b) {
  if (!a.same_shape(b)) throw ValidationError("cauchy_diff needs fields of the same shape");
  double worst = 0.0;
  const auto& va = a.values();
  const auto& vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
  return worst;
}

}  // namespace qpnls
