#pragma once

// Cubic lattice convolution
//
//   N(c)(out) = sum c(m1) conj(c(m2)) c(m3),   out = m1 - m2 + m3,
//
// with every factor and the output restricted to the box (Galerkin projection).

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qpnls/lattice.hpp"

namespace qpnls {

// z for even j, conj(z) for odd j.
Complex conjugation_tower(Complex z, int j);

// Direct O(|B|^2) evaluation for one output mode; loops m1 then m2 in
// enumeration order and looks up m3. The reference form.
Complex cubic_convolution(const ModeTable& table, std::span<const Complex> c, std::size_t out);

// Same sum for every output, via the pair correlation
//   P(d) = sum_{m2, m2 + d in box} conj(c(m2)) c(m2 + d),
//   N(out) = sum_{m1 in box} c(m1) P(out - m1).
// Each output slot is accumulated in a fixed order by one thread.
class ConvolutionPlan {
 public:
  explicit ConvolutionPlan(const ModeTable& table);

  void apply(std::span<const Complex> c, std::span<Complex> out) const;
  std::vector<Complex> apply(std::span<const Complex> c) const;

  std::size_t num_modes() const { return num_modes_; }

 private:
  std::size_t num_modes_ = 0;
  std::size_t num_diffs_ = 0;
  // Pairs (m2, m3) grouped by difference slot: [pair_begin_[d], pair_begin_[d+1]).
  std::vector<std::size_t> pair_begin_;
  std::vector<std::int32_t> pair_lo_, pair_hi_;
  // Terms (m1, d) grouped by output: [term_begin_[o], term_begin_[o+1]).
  std::vector<std::size_t> term_begin_;
  std::vector<std::int32_t> term_mode_, term_diff_;
};

// Direct evaluation for every output. Used by the reference integrator so it
// does not share the factored code path with the Picard engine.
std::vector<Complex> cubic_convolution_direct(const ModeTable& table, std::span<const Complex> c);

}  // namespace qpnls
