#include "qpnls/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "qpnls/convolution.hpp"
#include "qpnls/error.hpp"

namespace qpnls {

std::vector<Complex> galerkin_rhs(const ModeTable& table, std::span<const Complex> c,
                                  std::span<const double> disp, double epsilon) {
  auto out = cubic_convolution_direct(table, c);
  const Complex ie(0.0, epsilon);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(0.0, -disp[i]) * c[i] + ie * out[i];
  return out;
}

std::vector<Complex> galerkin_rhs(const CoefficientField& snapshot, double epsilon) {
  const auto disp = dispersions(snapshot.basis(), snapshot.table());
  return galerkin_rhs(snapshot.table(), snapshot.node(0), disp, epsilon);
}

double mass(std::span<const Complex> c) {
  double m = 0.0;
  for (auto z : c) m += std::norm(z);
  return m;
}

namespace {

double energy_from(std::span<const Complex> c, std::span<const Complex> conv,
                   std::span<const double> disp, double epsilon) {
  double kinetic = 0.0;
  Complex quartic{};
  for (std::size_t i = 0; i < c.size(); ++i) {
    kinetic += disp[i] * std::norm(c[i]);
    quartic += std::conj(c[i]) * conv[i];
  }
  return kinetic - 0.5 * epsilon * quartic.real();
}

}  // namespace

double energy(const ModeTable& table, std::span<const Complex> c, std::span<const double> disp,
              double epsilon) {
  const auto conv = cubic_convolution_direct(table, c);
  return energy_from(c, conv, disp, epsilon);
}

double energy(const CoefficientField& field, std::size_t node, double epsilon) {
  const auto disp = dispersions(field.basis(), field.table());
  return energy(field.table(), field.node(node), disp, epsilon);
}

OdeRun rk4_integrate(const CoefficientField& initial, double epsilon, const TimeGrid& grid,
                     int steps) {
  if (grid.is_single()) throw ValidationError("RK4 needs an output grid with N >= 2");
  if (steps < 1 || steps % grid.intervals() != 0)
    throw ValidationError("RK4 step count must be a positive multiple of the grid intervals");
  const auto& table = initial.table();
  const std::size_t size = table.size();
  const auto disp = dispersions(initial.basis(), table);
  const double h = grid.t_end() / steps;
  const int stride = steps / grid.intervals();
  const Complex ie(0.0, epsilon);

  OdeRun run{CoefficientField(initial.basis(), initial.table_ptr(), grid), steps, 0.0, 0.0};
  std::vector<Complex> c(initial.node(0).begin(), initial.node(0).end());
  std::copy(c.begin(), c.end(), run.field.node(0).begin());

  // Stage derivative; keeps the convolution of the stage-1 state for the energy.
  std::vector<Complex> conv;
  auto rhs = [&](std::span<const Complex> y, bool keep) {
    auto n = cubic_convolution_direct(table, y);
    std::vector<Complex> d(size);
    for (std::size_t i = 0; i < size; ++i) d[i] = Complex(0.0, -disp[i]) * y[i] + ie * n[i];
    if (keep) conv = std::move(n);
    return d;
  };

  const double m0 = mass(c);
  double e0 = 0.0;
  std::vector<Complex> tmp(size);
  for (int s = 0; s < steps; ++s) {
    const auto k1 = rhs(c, true);
    const double m = mass(c);
    const double e = energy_from(c, conv, disp, epsilon);
    if (s == 0) e0 = e;
    run.mass_drift = std::max(run.mass_drift, std::abs(m - m0));
    run.energy_drift = std::max(run.energy_drift, std::abs(e - e0));

    for (std::size_t i = 0; i < size; ++i) tmp[i] = c[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(tmp, false);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = c[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(tmp, false);
    for (std::size_t i = 0; i < size; ++i) tmp[i] = c[i] + h * k3[i];
    const auto k4 = rhs(tmp, false);
    for (std::size_t i = 0; i < size; ++i) {
      c[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(c[i].real()) || !std::isfinite(c[i].imag()))
        throw BlowUpError("RK4 state became non-finite", (s + 1) * h);
    }
    if ((s + 1) % stride == 0)
      std::copy(c.begin(), c.end(),
                run.field.node(static_cast<std::size_t>((s + 1) / stride)).begin());
  }
  run.mass_drift = std::max(run.mass_drift, std::abs(mass(c) - m0));
  run.energy_drift = std::max(run.energy_drift, std::abs(energy(table, c, disp, epsilon) - e0));
  return run;
}

double compare(const PicardState& state, const OdeRun& run) {
  if (!state.converged) throw ValidationError("comparison needs a converged Picard run");
  const auto& p = state.latest();
  if (!(p.basis() == run.field.basis()) || !(p.box() == run.field.box()))
    throw ValidationError("Picard run and RK4 run use different lattices");
  if (!(p.grid() == run.field.grid()))
    throw ValidationError("Picard and RK4 grids are incommensurate");
  double worst = 0.0;
  for (std::size_t i = 0; i < p.values().size(); ++i)
    worst = std::max(worst, std::abs(p.values()[i] - run.field.values()[i]));
  return worst;
}

}  // namespace qpnls
