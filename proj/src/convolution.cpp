#include "qpnls/convolution.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "qpnls/error.hpp"

namespace qpnls {

Complex conjugation_tower(Complex z, int j) {
  if (j < 0) throw ValidationError("conjugation_tower needs j >= 0");
  return j % 2 == 0 ? z : std::conj(z);
}

Complex cubic_convolution(const ModeTable& table, std::span<const Complex> c, std::size_t out) {
  const std::size_t size = table.size();
  const std::int64_t key_out = table.key(out);
  Complex acc{};
  for (std::size_t i1 = 0; i1 < size; ++i1) {
    const std::int64_t k1 = key_out - table.key(i1);
    for (std::size_t i2 = 0; i2 < size; ++i2) {
      const auto i3 = table.slot(k1 + table.key(i2));
      if (i3 < 0) continue;
      acc += c[i1] * std::conj(c[i2]) * c[static_cast<std::size_t>(i3)];
    }
  }
  return acc;
}

std::vector<Complex> cubic_convolution_direct(const ModeTable& table, std::span<const Complex> c) {
  if (c.size() != table.size()) throw ValidationError("coefficient span does not match the table");
  std::vector<Complex> out(table.size());
  const auto size = static_cast<std::ptrdiff_t>(table.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t o = 0; o < size; ++o)
    out[static_cast<std::size_t>(o)] = cubic_convolution(table, c, static_cast<std::size_t>(o));
  return out;
}

ConvolutionPlan::ConvolutionPlan(const ModeTable& table) : num_modes_(table.size()) {
  const std::size_t size = table.size();

  // Difference slots in first-seen order of (m2, m3).
  std::unordered_map<std::int64_t, std::int32_t> diff_slot;
  std::vector<std::int32_t> pair_diff;
  pair_diff.reserve(size * size);
  std::vector<std::int32_t> lo, hi;
  lo.reserve(size * size);
  hi.reserve(size * size);
  for (std::size_t i2 = 0; i2 < size; ++i2) {
    for (std::size_t i3 = 0; i3 < size; ++i3) {
      const std::int64_t d = table.key(i3) - table.key(i2);
      auto [it, inserted] = diff_slot.try_emplace(d, static_cast<std::int32_t>(diff_slot.size()));
      pair_diff.push_back(it->second);
      lo.push_back(static_cast<std::int32_t>(i2));
      hi.push_back(static_cast<std::int32_t>(i3));
    }
  }
  num_diffs_ = diff_slot.size();

  // Counting sort by slot keeps the (m2, m3) order inside each group.
  pair_begin_.assign(num_diffs_ + 1, 0);
  for (auto s : pair_diff) ++pair_begin_[static_cast<std::size_t>(s) + 1];
  std::partial_sum(pair_begin_.begin(), pair_begin_.end(), pair_begin_.begin());
  pair_lo_.resize(pair_diff.size());
  pair_hi_.resize(pair_diff.size());
  std::vector<std::size_t> cursor(pair_begin_.begin(), pair_begin_.end() - 1);
  for (std::size_t p = 0; p < pair_diff.size(); ++p) {
    const auto at = cursor[static_cast<std::size_t>(pair_diff[p])]++;
    pair_lo_[at] = lo[p];
    pair_hi_[at] = hi[p];
  }

  term_begin_.assign(size + 1, 0);
  for (std::size_t o = 0; o < size; ++o) {
    for (std::size_t i1 = 0; i1 < size; ++i1) {
      auto it = diff_slot.find(table.key(o) - table.key(i1));
      if (it == diff_slot.end()) continue;
      term_mode_.push_back(static_cast<std::int32_t>(i1));
      term_diff_.push_back(it->second);
    }
    term_begin_[o + 1] = term_mode_.size();
  }
}

void ConvolutionPlan::apply(std::span<const Complex> c, std::span<Complex> out) const {
  if (c.size() != num_modes_ || out.size() != num_modes_)
    throw ValidationError("coefficient span does not match the convolution plan");
  std::vector<Complex> corr(num_diffs_);
  const auto diffs = static_cast<std::ptrdiff_t>(num_diffs_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t d = 0; d < diffs; ++d) {
    Complex acc{};
    const auto ud = static_cast<std::size_t>(d);
    for (std::size_t p = pair_begin_[ud]; p < pair_begin_[ud + 1]; ++p)
      acc += std::conj(c[static_cast<std::size_t>(pair_lo_[p])]) *
             c[static_cast<std::size_t>(pair_hi_[p])];
    corr[ud] = acc;
  }
  const auto outs = static_cast<std::ptrdiff_t>(num_modes_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t o = 0; o < outs; ++o) {
    Complex acc{};
    const auto uo = static_cast<std::size_t>(o);
    for (std::size_t t = term_begin_[uo]; t < term_begin_[uo + 1]; ++t)
      acc += c[static_cast<std::size_t>(term_mode_[t])] *
             corr[static_cast<std::size_t>(term_diff_[t])];
    out[uo] = acc;
  }
}

std::vector<Complex> ConvolutionPlan::apply(std::span<const Complex> c) const {
  std::vector<Complex> out(num_modes_);
  apply(c, std::span<Complex>(out));
  return out;
}

}  // namespace qpnls
