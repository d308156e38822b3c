#include "qpnls/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qpnls/error.hpp"

namespace qpnls {

DecayProfile DecayProfile::exponential(double kappa1, double kappa2) {
  DecayProfile p;
  p.kind = Kind::exponential;
  p.kappa1 = kappa1;
  p.kappa2 = kappa2;
  return p;
}

DecayProfile DecayProfile::polynomial(double r1, double r2) {
  DecayProfile p;
  p.kind = Kind::polynomial;
  p.r1 = r1;
  p.r2 = r2;
  return p;
}

void DecayProfile::validate(int nu1, int nu2) const {
  if (kind == Kind::exponential) {
    if (!(kappa1 > 0.0 && kappa1 <= 1.0) || !(kappa2 > 0.0 && kappa2 <= 1.0))
      throw ValidationError("exponential decay rates must satisfy 0 < kappa_j <= 1");
    return;
  }
  if (!(r1 > nu1) || !(r2 > nu2))
    throw ValidationError("polynomial decay rates must exceed the lattice dimension (r1 > nu1 = " +
                          std::to_string(nu1) + ", r2 > nu2 = " + std::to_string(nu2) + ")");
}

double DecayProfile::weight(std::int64_t l1_m, std::int64_t l1_n) const {
  const double a = static_cast<double>(l1_m);
  const double b = static_cast<double>(l1_n);
  if (kind == Kind::exponential) return std::exp(-(kappa1 * a + kappa2 * b));
  return std::pow(1.0 + a, -r1) * std::pow(1.0 + b, -r2);
}

TimeGrid TimeGrid::uniform(double t_end, int intervals) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be positive");
  if (intervals < 2 || intervals % 2 != 0)
    throw ValidationError("node count must be an even integer >= 2");
  return TimeGrid(t_end, intervals);
}

TimeGrid TimeGrid::single() { return TimeGrid(0.0, 0); }

double TimeGrid::time(std::size_t i) const {
  if (is_single()) return 0.0;
  return static_cast<double>(i) * t_end_ / intervals_;
}

CoefficientField::CoefficientField(FrequencyBasis basis, std::shared_ptr<const ModeTable> table,
                                   TimeGrid grid)
    : basis_(std::move(basis)), table_(std::move(table)), grid_(grid) {
  if (basis_.nu1() != table_->nu1() || basis_.nu2() != table_->nu2())
    throw ValidationError("basis and mode table dimensions differ");
  values_.assign(grid_.num_points() * table_->size(), Complex{});
}

CoefficientField::CoefficientField(FrequencyBasis basis, std::shared_ptr<const ModeTable> table,
                                   TimeGrid grid, std::vector<Complex> values)
    : CoefficientField(std::move(basis), std::move(table), grid) {
  if (values.size() != values_.size())
    throw ValidationError("coefficient array has " + std::to_string(values.size()) +
                          " entries, expected " + std::to_string(values_.size()));
  values_ = std::move(values);
}

std::span<const Complex> CoefficientField::node(std::size_t i) const {
  return {values_.data() + i * num_modes(), num_modes()};
}

std::span<Complex> CoefficientField::node(std::size_t i) {
  return {values_.data() + i * num_modes(), num_modes()};
}

CoefficientField CoefficientField::snapshot(std::size_t i) const {
  auto src = node(i);
  return CoefficientField(basis_, table_, TimeGrid::single(),
                          std::vector<Complex>(src.begin(), src.end()));
}

bool CoefficientField::all_finite() const {
  for (const auto& z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

bool CoefficientField::same_shape(const CoefficientField& other) const {
  return basis_ == other.basis_ && box() == other.box() && table_->nu1() == other.table_->nu1() &&
         table_->nu2() == other.table_->nu2() && grid_ == other.grid_;
}

CoefficientField generate_initial(const FrequencyBasis& basis, const TruncationBox& box,
                                  const DecayProfile& profile, std::uint64_t phase_seed) {
  profile.validate(basis.nu1(), basis.nu2());
  auto table = std::make_shared<const ModeTable>(basis.nu1(), basis.nu2(), box);
  CoefficientField field(basis, table, TimeGrid::single());
  std::mt19937_64 rng(phase_seed);
  for (std::size_t i = 0; i < table->size(); ++i) {
    const double modulus = profile.weight(table->l1_x(i), table->l1_y(i));
    if (phase_seed == 0) {
      field.at(0, i) = Complex(modulus, 0.0);
    } else {
      // 53 random bits mapped to [0, 2pi); avoids implementation-defined distributions.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      field.at(0, i) = std::polar(modulus, 2.0 * std::numbers::pi * u);
    }
  }
  return field;
}

bool weighted_norm_in_range(const DecayProfile& profile, double rho1, double rho2) {
  if (profile.kind != DecayProfile::Kind::exponential) return false;
  const double g1 = profile.kappa1 / 2.0 - 2.0 * rho1;
  const double g2 = profile.kappa2 / 2.0 - 2.0 * rho2;
  return g1 > 0.0 && g1 <= 1.0 && g2 > 0.0 && g2 <= 1.0;
}

double weighted_h_norm(const CoefficientField& field, std::size_t node, double rho1, double rho2) {
  if (rho1 < 0.0 || rho2 < 0.0) throw ValidationError("weight exponents rho must be >= 0");
  const auto& table = field.table();
  const auto c = field.node(node);
  double sum = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double w = std::exp(2.0 * (rho1 * static_cast<double>(table.l1_x(i)) +
                                     rho2 * static_cast<double>(table.l1_y(i))));
    sum += w * std::norm(c[i]);
  }
  return std::sqrt(sum);
}

std::vector<Complex> synthesize(const CoefficientField& field, std::size_t node,
                                std::span<const std::pair<double, double>> points) {
  const auto& table = field.table();
  const auto& basis = field.basis();
  const auto c = field.node(node);
  std::vector<double> kx(table.size()), ky(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    kx[i] = basis.freq_x(table[i].m);
    ky[i] = basis.freq_y(table[i].n);
  }
  std::vector<Complex> out(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto [x, y] = points[p];
    Complex acc{};
    for (std::size_t i = 0; i < table.size(); ++i) acc += c[i] * std::polar(1.0, kx[i] * x + ky[i] * y);
    out[p] = acc;
  }
  return out;
}

CoefficientField linear_evolution(const CoefficientField& initial, const TimeGrid& grid) {
  const auto disp = dispersions(initial.basis(), initial.table());
  CoefficientField out(initial.basis(), initial.table_ptr(), grid);
  const auto c0 = initial.node(0);
  for (std::size_t k = 0; k < grid.num_points(); ++k) {
    const double t = grid.time(k);
    auto dst = out.node(k);
    for (std::size_t i = 0; i < out.num_modes(); ++i)
      dst[i] = k == 0 ? c0[i] : std::polar(1.0, -disp[i] * t) * c0[i];
  }
  return out;
}

double sup_weighted_residual(const CoefficientField& field, const DecayProfile& profile,
                             double scale) {
  if (profile.kind != DecayProfile::Kind::exponential)
    throw UnsupportedError("weighted residual is defined for exponential profiles only");
  const auto& table = field.table();
  std::vector<double> inv_bound(table.size());
  for (std::size_t i = 0; i < table.size(); ++i)
    inv_bound[i] = std::exp(profile.kappa1 / 2.0 * static_cast<double>(table.l1_x(i)) +
                            profile.kappa2 / 2.0 * static_cast<double>(table.l1_y(i)));
  double worst = 0.0;
  for (std::size_t k = 0; k < field.num_nodes(); ++k) {
    const auto c = field.node(k);
    for (std::size_t i = 0; i < table.size(); ++i) worst = std::max(worst, std::abs(c[i]) * inv_bound[i]);
  }
  return worst / scale;
}

}  // namespace qpnls
