#pragma once

// Coefficient fields c(t, m, n) on a truncation box and a uniform time grid.

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "qpnls/lattice.hpp"

namespace qpnls {

struct DecayProfile {
  enum class Kind { exponential, polynomial };

  Kind kind = Kind::exponential;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double r1 = 0.0;
  double r2 = 0.0;

  static DecayProfile exponential(double kappa1, double kappa2);
  static DecayProfile polynomial(double r1, double r2);

  // Throws ValidationError. Polynomial rates must exceed the lattice
  // dimension so the weight is summable.
  void validate(int nu1, int nu2) const;

  // Modulus prescribed for mode (m, n) with the given l1 norms.
  double weight(std::int64_t l1_m, std::int64_t l1_n) const;
};

// Uniform grid t_i = i * t_end / N, i = 0..N, N even. `single()` is the
// one-point grid {0} used for initial data.
class TimeGrid {
 public:
  static TimeGrid uniform(double t_end, int intervals);
  static TimeGrid single();

  bool is_single() const { return intervals_ == 0; }
  double t_end() const { return t_end_; }
  int intervals() const { return intervals_; }
  std::size_t num_points() const { return static_cast<std::size_t>(intervals_) + 1; }
  double step() const { return is_single() ? 0.0 : t_end_ / intervals_; }
  double time(std::size_t i) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  TimeGrid(double t_end, int intervals) : t_end_(t_end), intervals_(intervals) {}
  double t_end_ = 0.0;
  int intervals_ = 0;
};

class CoefficientField {
 public:
  CoefficientField(FrequencyBasis basis, std::shared_ptr<const ModeTable> table, TimeGrid grid);
  CoefficientField(FrequencyBasis basis, std::shared_ptr<const ModeTable> table, TimeGrid grid,
                   std::vector<Complex> values);

  const FrequencyBasis& basis() const { return basis_; }
  const ModeTable& table() const { return *table_; }
  std::shared_ptr<const ModeTable> table_ptr() const { return table_; }
  const TruncationBox& box() const { return table_->box(); }
  const TimeGrid& grid() const { return grid_; }

  std::size_t num_modes() const { return table_->size(); }
  std::size_t num_nodes() const { return grid_.num_points(); }

  std::span<const Complex> node(std::size_t i) const;
  std::span<Complex> node(std::size_t i);

  Complex& at(std::size_t node_i, std::size_t mode) { return values_[node_i * num_modes() + mode]; }
  Complex at(std::size_t node_i, std::size_t mode) const {
    return values_[node_i * num_modes() + mode];
  }

  const std::vector<Complex>& values() const { return values_; }

  // Single-node field holding node i of this one.
  CoefficientField snapshot(std::size_t i) const;

  bool all_finite() const;
  bool same_shape(const CoefficientField& other) const;

 private:
  FrequencyBasis basis_;
  std::shared_ptr<const ModeTable> table_;
  TimeGrid grid_;
  std::vector<Complex> values_;
};

// |c(m,n)| equals the profile weight exactly. Seed 0 gives all phases 1;
// other seeds draw phases uniformly from a seeded 64-bit Mersenne twister.
CoefficientField generate_initial(const FrequencyBasis& basis, const TruncationBox& box,
                                  const DecayProfile& profile, std::uint64_t phase_seed);

// True when 0 < kappa_j/2 - 2 rho_j <= 1 for both directions.
bool weighted_norm_in_range(const DecayProfile& profile, double rho1, double rho2);

double weighted_h_norm(const CoefficientField& field, std::size_t node, double rho1, double rho2);

std::vector<Complex> synthesize(const CoefficientField& field, std::size_t node,
                                std::span<const std::pair<double, double>> points);

CoefficientField linear_evolution(const CoefficientField& initial, const TimeGrid& grid);

// max over nodes and modes of |c| e^{(kappa1/2)|m| + (kappa2/2)|n|} / scale.
double sup_weighted_residual(const CoefficientField& field, const DecayProfile& profile,
                             double scale);

}  // namespace qpnls
