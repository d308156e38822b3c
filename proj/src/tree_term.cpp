#include <string>

#include "qpnls/combin.hpp"
#include "qpnls/error.hpp"
#include "qpnls/quadrature.hpp"

namespace qpnls {

namespace {

struct Integral {
  std::vector<Complex> values;  // at every grid node
  ModeIndex lambda;
};

// Nested Duhamel integrals with unit coefficients; consumes leaves from `next`.
Integral nested_integral(const Branch& branch, const FrequencyBasis& basis, const TimeGrid& grid,
                         const std::vector<ModeIndex>& leaves, std::size_t& next) {
  const std::size_t nodes = grid.num_points();
  if (branch.kind() == Branch::Kind::leaf) {
    Integral out{std::vector<Complex>(nodes), leaves[next++]};
    for (std::size_t i = 0; i < nodes; ++i) out.values[i] = phase(basis, out.lambda, grid.time(i));
    return out;
  }
  Integral parts[3];
  for (int j = 0; j < 3; ++j) {
    const Branch sub = branch.kind() == Branch::Kind::unit ? Branch::leaf() : branch.child(j);
    parts[j] = nested_integral(sub, basis, grid, leaves, next);
  }
  Integral out{std::vector<Complex>(nodes), parts[0].lambda - parts[1].lambda + parts[2].lambda};
  std::vector<Complex> g(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    g[i] = phase(basis, out.lambda, -grid.time(i)) * parts[0].values[i] *
           std::conj(parts[1].values[i]) * parts[2].values[i];
  const auto q = cumulative_integral(g, grid.step());
  for (std::size_t i = 0; i < nodes; ++i) out.values[i] = phase(basis, out.lambda, grid.time(i)) * q[i];
  return out;
}

Complex coupling_factor(const Branch& branch, double epsilon) {
  const Complex ie(0.0, epsilon);
  switch (branch.kind()) {
    case Branch::Kind::leaf:
      return 1.0;
    case Branch::Kind::unit:
      return ie;
    case Branch::Kind::node:
      break;
  }
  return ie * coupling_factor(branch.child(0), epsilon) *
         std::conj(coupling_factor(branch.child(1), epsilon)) *
         coupling_factor(branch.child(2), epsilon);
}

}  // namespace

std::vector<Complex> tree_term(const TreeTerm& term, const CoefficientField& initial,
                               const TimeGrid& grid, double epsilon) {
  if (term.branch.depth() > 2)
    throw UnsupportedError("explicit tree terms are only evaluated up to depth 2");
  if (term.assignment.size() != static_cast<std::size_t>(term.branch.twice_sigma()))
    throw ValidationError("assignment has " + std::to_string(term.assignment.size()) +
                          " modes, branch needs " + std::to_string(term.branch.twice_sigma()));
  if (grid.is_single()) throw ValidationError("tree terms need a grid with N >= 2");
  for (const auto& a : term.assignment)
    if (static_cast<int>(a.m.size()) != initial.basis().nu1() ||
        static_cast<int>(a.n.size()) != initial.basis().nu2())
      throw ValidationError("assignment mode has the wrong dimension");

  // Coefficient product, alternating conjugation over the leaf order.
  Complex coeff = 1.0;
  const auto c0 = initial.node(0);
  for (std::size_t j = 0; j < term.assignment.size(); ++j) {
    Complex c{};
    if (initial.box().contains(term.assignment[j])) {
      if (auto slot = initial.table().find(term.assignment[j])) c = c0[*slot];
    }
    coeff *= j % 2 == 0 ? c : std::conj(c);
  }

  std::size_t next = 0;
  auto integral = nested_integral(term.branch, initial.basis(), grid, term.assignment, next);
  const Complex factor = coeff * coupling_factor(term.branch, epsilon);
  for (auto& v : integral.values) v *= factor;
  return integral.values;
}

std::vector<Complex> tree_sum_order2(const CoefficientField& initial, const TimeGrid& grid,
                                     double epsilon, std::size_t out) {
  if (grid.is_single()) throw ValidationError("tree sums need a grid with N >= 2");
  const auto& table = initial.table();
  if (out >= table.size()) throw ValidationError("output mode outside the box");
  const std::size_t size = table.size();
  const std::size_t nodes = grid.num_points();
  const auto c0 = initial.node(0);
  const auto disp = dispersions(initial.basis(), table);
  const Complex ie(0.0, epsilon);
  const double h = grid.step();

  auto rotation = [&](std::size_t mode, double t) { return std::polar(1.0, -disp[mode] * t); };

  // Leaf trajectories c(m) Phi^s(m).
  std::vector<std::vector<Complex>> leaf(size, std::vector<Complex>(nodes));
  for (std::size_t m = 0; m < size; ++m)
    for (std::size_t i = 0; i < nodes; ++i) leaf[m][i] = c0[m] * rotation(m, grid.time(i));

  // Unit terms, one quadrature per leaf triple, summed by output mode.
  std::vector<std::vector<Complex>> unit(size, std::vector<Complex>(nodes));
  std::vector<Complex> g(nodes), q;
  auto accumulate = [&](std::size_t lam, const std::vector<Complex>& a, const std::vector<Complex>& b,
                        const std::vector<Complex>& c, std::vector<Complex>& into) {
    for (std::size_t i = 0; i < nodes; ++i)
      g[i] = std::conj(rotation(lam, grid.time(i))) * a[i] * std::conj(b[i]) * c[i];
    cumulative_integral(g, h, q);
    for (std::size_t i = 0; i < nodes; ++i) into[i] += ie * rotation(lam, grid.time(i)) * q[i];
  };
  for (std::size_t m = 0; m < size; ++m)
    for (std::size_t i1 = 0; i1 < size; ++i1)
      for (std::size_t i2 = 0; i2 < size; ++i2) {
        const auto i3 = table.slot(table.key(m) - table.key(i1) + table.key(i2));
        if (i3 < 0) continue;
        accumulate(m, leaf[i1], leaf[i2], leaf[static_cast<std::size_t>(i3)], unit[m]);
      }

  // Node terms for one outer triple share their quadrature: the integrand is
  // multilinear in the child trajectories, so summing children first gives
  // the same total as summing every inner assignment separately.
  std::vector<Complex> total(leaf[out]);
  const std::vector<std::vector<Complex>>* kinds[2] = {&leaf, &unit};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (std::size_t i1 = 0; i1 < size; ++i1)
          for (std::size_t i2 = 0; i2 < size; ++i2) {
            const auto i3 = table.slot(table.key(out) - table.key(i1) + table.key(i2));
            if (i3 < 0) continue;
            accumulate(out, (*kinds[a])[i1], (*kinds[b])[i2],
                       (*kinds[c])[static_cast<std::size_t>(i3)], total);
          }
  return total;
}

}  // namespace qpnls
