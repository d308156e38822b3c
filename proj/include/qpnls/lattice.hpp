#pragma once

// Dual-lattice geometry for quasi-periodic data on R^2.
//
// A Fourier mode is a pair (m, n) in Z^nu1 x Z^nu2. Its spatial frequency is
// (<m, omega>, <n, omega'>) and its linear Schrodinger phase rotates at rate
// <m, omega>^2 + <n, omega'>^2. Truncation keeps |m|_1 <= R1 and |n|_1 <= R2.

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace qpnls {

using Complex = std::complex<double>;
using IntVec = std::vector<std::int64_t>;

std::int64_t l1_norm(std::span<const std::int64_t> v);

struct ModeIndex {
  IntVec m;
  IntVec n;

  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

ModeIndex operator-(const ModeIndex& a);
ModeIndex operator+(const ModeIndex& a, const ModeIndex& b);
ModeIndex operator-(const ModeIndex& a, const ModeIndex& b);

class FrequencyBasis {
 public:
  // Rejects empty or non-finite frequency vectors. Does not check resonance;
  // use `checked` for that.
  FrequencyBasis(std::vector<double> omega, std::vector<double> omega_prime);

  // As above, and additionally requires independence_margin over the given
  // per-direction radii to be at least kMinMargin.
  static FrequencyBasis checked(std::vector<double> omega, std::vector<double> omega_prime,
                                int radius_x, int radius_y);

  static constexpr double kMinMargin = 1e-6;

  const std::vector<double>& omega() const { return omega_; }
  const std::vector<double>& omega_prime() const { return omega_prime_; }
  int nu1() const { return static_cast<int>(omega_.size()); }
  int nu2() const { return static_cast<int>(omega_prime_.size()); }

  // nu_j == 1 in some direction: the data is periodic there, not quasi-periodic.
  bool periodic_degenerate() const { return nu1() == 1 || nu2() == 1; }

  double freq_x(std::span<const std::int64_t> m) const;
  double freq_y(std::span<const std::int64_t> n) const;

  friend bool operator==(const FrequencyBasis&, const FrequencyBasis&) = default;

 private:
  std::vector<double> omega_;
  std::vector<double> omega_prime_;
};

struct TruncationBox {
  int radius_x = 0;
  int radius_y = 0;

  bool contains(const ModeIndex& idx) const;
  friend bool operator==(const TruncationBox&, const TruncationBox&) = default;
};

// All integer vectors of dimension `dim` with |v|_1 <= radius, ordered by
// (|v|_1, lexicographic).
std::vector<IntVec> l1_ball(int dim, int radius);

// Box modes in the canonical order (|m|_1, m, |n|_1, n).
std::vector<ModeIndex> enumerate(const TruncationBox& box, int nu1, int nu2);

double dispersion(const FrequencyBasis& basis, const ModeIndex& idx);
Complex phase(const FrequencyBasis& basis, const ModeIndex& idx, double t);

// min |<m, omega>| over nonzero |m|_1 <= R, likewise for omega', and the
// smaller of the two. +inf when nothing is searched.
double independence_margin(const FrequencyBasis& basis, int radius);
double independence_margin(const FrequencyBasis& basis, int radius_x, int radius_y);

// Exact box average of exp(i<(a-b)Omega, (x,y)>) over [-L1,L1] x [-L2,L2].
double orthogonality_average(const FrequencyBasis& basis, const ModeIndex& a,
                             const ModeIndex& b, double half_width_x, double half_width_y);

// Enumerated box with O(1) lookup of combinations a - b + c of box modes.
//
// Keys are a balanced mixed-radix encoding that is linear in the vector, so
// key(a - b + c) == key(a) - key(b) + key(c) for every a, b, c in the box.
class ModeTable {
 public:
  ModeTable(int nu1, int nu2, TruncationBox box);

  std::size_t size() const { return modes_.size(); }
  const ModeIndex& operator[](std::size_t i) const { return modes_[i]; }
  const std::vector<ModeIndex>& modes() const { return modes_; }

  int nu1() const { return nu1_; }
  int nu2() const { return nu2_; }
  const TruncationBox& box() const { return box_; }

  std::int64_t l1_x(std::size_t i) const { return l1x_[i]; }
  std::int64_t l1_y(std::size_t i) const { return l1y_[i]; }
  std::int64_t key(std::size_t i) const { return keys_[i]; }

  // Key of any vector with entries within three radii of the origin.
  std::int64_t key_of(const ModeIndex& idx) const;

  // Slot of the box mode with the given key, or -1.
  std::ptrdiff_t slot(std::int64_t key) const;
  std::optional<std::size_t> find(const ModeIndex& idx) const;

  // Slot of (-m, -n); always inside the box.
  std::size_t negation(std::size_t i) const { return negation_[i]; }

 private:
  int nu1_;
  int nu2_;
  TruncationBox box_;
  std::vector<ModeIndex> modes_;
  std::vector<std::int64_t> l1x_, l1y_, keys_;
  std::vector<std::int64_t> strides_;
  std::vector<int> reach_;
  std::vector<std::size_t> negation_;
  // Dense table when the key space is small, hash map otherwise.
  std::int64_t key_offset_ = 0;
  std::vector<std::int32_t> dense_;
  std::unordered_map<std::int64_t, std::int32_t> sparse_;
};

std::vector<double> dispersions(const FrequencyBasis& basis, const ModeTable& table);

}  // namespace qpnls
