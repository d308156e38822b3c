#include "qpnls/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qpnls/error.hpp"

namespace qpnls {

namespace {

void check_dims(const FrequencyBasis& basis, const ModeIndex& idx) {
  if (static_cast<int>(idx.m.size()) != basis.nu1() ||
      static_cast<int>(idx.n.size()) != basis.nu2()) {
    throw ValidationError("mode index dimensions (" + std::to_string(idx.m.size()) + ", " +
                          std::to_string(idx.n.size()) + ") do not match basis (" +
                          std::to_string(basis.nu1()) + ", " + std::to_string(basis.nu2()) +
                          ")");
  }
}

void check_frequencies(const std::vector<double>& w, const char* name) {
  if (w.empty()) throw ValidationError(std::string(name) + " must have at least one entry");
  for (double x : w) {
    if (!std::isfinite(x)) throw ValidationError(std::string(name) + " has a non-finite entry");
  }
}

// sin(x)/x with the removable singularity filled in.
double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double margin_one(const std::vector<double>& w, int radius) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : l1_ball(static_cast<int>(w.size()), radius)) {
    if (l1_norm(v) == 0) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += static_cast<double>(v[j]) * w[j];
    best = std::min(best, std::abs(s));
  }
  return best;
}

}  // namespace

std::int64_t l1_norm(std::span<const std::int64_t> v) {
  std::int64_t s = 0;
  for (auto x : v) s += x < 0 ? -x : x;
  return s;
}

ModeIndex operator-(const ModeIndex& a) {
  ModeIndex r = a;
  for (auto& x : r.m) x = -x;
  for (auto& x : r.n) x = -x;
  return r;
}

ModeIndex operator+(const ModeIndex& a, const ModeIndex& b) {
  ModeIndex r = a;
  for (std::size_t j = 0; j < r.m.size(); ++j) r.m[j] += b.m[j];
  for (std::size_t j = 0; j < r.n.size(); ++j) r.n[j] += b.n[j];
  return r;
}

ModeIndex operator-(const ModeIndex& a, const ModeIndex& b) { return a + (-b); }

FrequencyBasis::FrequencyBasis(std::vector<double> omega, std::vector<double> omega_prime)
    : omega_(std::move(omega)), omega_prime_(std::move(omega_prime)) {
  check_frequencies(omega_, "omega");
  check_frequencies(omega_prime_, "omega_prime");
}

FrequencyBasis FrequencyBasis::checked(std::vector<double> omega, std::vector<double> omega_prime,
                                       int radius_x, int radius_y) {
  FrequencyBasis basis(std::move(omega), std::move(omega_prime));
  const double margin = independence_margin(basis, radius_x, radius_y);
  if (!(margin >= kMinMargin)) {
    throw ValidationError("frequency basis is resonant or near-resonant inside the box (margin " +
                          std::to_string(margin) + " < 1e-6)");
  }
  return basis;
}

double FrequencyBasis::freq_x(std::span<const std::int64_t> m) const {
  double s = 0.0;
  for (std::size_t j = 0; j < omega_.size(); ++j) s += static_cast<double>(m[j]) * omega_[j];
  return s;
}

double FrequencyBasis::freq_y(std::span<const std::int64_t> n) const {
  double s = 0.0;
  for (std::size_t j = 0; j < omega_prime_.size(); ++j)
    s += static_cast<double>(n[j]) * omega_prime_[j];
  return s;
}

bool TruncationBox::contains(const ModeIndex& idx) const {
  return l1_norm(idx.m) <= radius_x && l1_norm(idx.n) <= radius_y;
}

std::vector<IntVec> l1_ball(int dim, int radius) {
  if (dim < 0 || radius < 0) throw ValidationError("l1_ball needs dim >= 0 and radius >= 0");
  std::vector<IntVec> out;
  IntVec v(static_cast<std::size_t>(dim), 0);
  // Depth-first fill; sorted afterwards into the canonical order.
  auto rec = [&](auto&& self, int j, int budget) -> void {
    if (j == dim) {
      out.push_back(v);
      return;
    }
    for (int x = -budget; x <= budget; ++x) {
      v[static_cast<std::size_t>(j)] = x;
      self(self, j + 1, budget - std::abs(x));
    }
  };
  rec(rec, 0, radius);
  std::stable_sort(out.begin(), out.end(), [](const IntVec& a, const IntVec& b) {
    const auto na = l1_norm(a), nb = l1_norm(b);
    if (na != nb) return na < nb;
    return a < b;
  });
  return out;
}

std::vector<ModeIndex> enumerate(const TruncationBox& box, int nu1, int nu2) {
  if (box.radius_x < 0 || box.radius_y < 0) throw ValidationError("box radii must be >= 0");
  const auto xs = l1_ball(nu1, box.radius_x);
  const auto ys = l1_ball(nu2, box.radius_y);
  std::vector<ModeIndex> out;
  out.reserve(xs.size() * ys.size());
  for (const auto& m : xs)
    for (const auto& n : ys) out.push_back({m, n});
  return out;
}

double dispersion(const FrequencyBasis& basis, const ModeIndex& idx) {
  check_dims(basis, idx);
  const double a = basis.freq_x(idx.m);
  const double b = basis.freq_y(idx.n);
  return a * a + b * b;
}

Complex phase(const FrequencyBasis& basis, const ModeIndex& idx, double t) {
  return std::polar(1.0, -dispersion(basis, idx) * t);
}

double independence_margin(const FrequencyBasis& basis, int radius) {
  return independence_margin(basis, radius, radius);
}

double independence_margin(const FrequencyBasis& basis, int radius_x, int radius_y) {
  if (radius_x < 0 || radius_y < 0) throw ValidationError("margin radius must be >= 0");
  return std::min(margin_one(basis.omega(), radius_x), margin_one(basis.omega_prime(), radius_y));
}

double orthogonality_average(const FrequencyBasis& basis, const ModeIndex& a, const ModeIndex& b,
                             double half_width_x, double half_width_y) {
  check_dims(basis, a);
  check_dims(basis, b);
  if (!(half_width_x > 0.0) || !(half_width_y > 0.0))
    throw ValidationError("orthogonality_average needs positive half widths");
  const ModeIndex d = a - b;
  const double theta = basis.freq_x(d.m);
  const double phi = basis.freq_y(d.n);
  if (d.m == IntVec(d.m.size(), 0) && d.n == IntVec(d.n.size(), 0)) return 1.0;
  return sinc(theta * half_width_x) * sinc(phi * half_width_y);
}

ModeTable::ModeTable(int nu1, int nu2, TruncationBox box)
    : nu1_(nu1), nu2_(nu2), box_(box), modes_(enumerate(box, nu1, nu2)) {
  if (nu1 < 1 || nu2 < 1) throw ValidationError("nu1 and nu2 must be >= 1");
  const int dims = nu1 + nu2;
  strides_.resize(static_cast<std::size_t>(dims));
  reach_.resize(static_cast<std::size_t>(dims));
  std::int64_t stride = 1;
  for (int j = 0; j < dims; ++j) {
    const int r = j < nu1 ? box.radius_x : box.radius_y;
    reach_[static_cast<std::size_t>(j)] = 3 * r;
    strides_[static_cast<std::size_t>(j)] = stride;
    stride *= 6 * r + 1;
  }
  key_offset_ = 0;
  for (int j = 0; j < dims; ++j)
    key_offset_ += reach_[static_cast<std::size_t>(j)] * strides_[static_cast<std::size_t>(j)];

  const std::size_t count = modes_.size();
  l1x_.resize(count);
  l1y_.resize(count);
  keys_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    l1x_[i] = l1_norm(modes_[i].m);
    l1y_[i] = l1_norm(modes_[i].n);
    keys_[i] = key_of(modes_[i]);
  }

  constexpr std::int64_t kDenseLimit = std::int64_t{1} << 24;
  if (stride <= kDenseLimit) {
    dense_.assign(static_cast<std::size_t>(stride), -1);
    for (std::size_t i = 0; i < count; ++i)
      dense_[static_cast<std::size_t>(keys_[i] + key_offset_)] = static_cast<std::int32_t>(i);
  } else {
    sparse_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) sparse_.emplace(keys_[i], static_cast<std::int32_t>(i));
  }

  negation_.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    negation_[i] = static_cast<std::size_t>(slot(-keys_[i]));
}

std::int64_t ModeTable::key_of(const ModeIndex& idx) const {
  std::int64_t k = 0;
  for (int j = 0; j < nu1_ + nu2_; ++j) {
    const auto v = j < nu1_ ? idx.m[static_cast<std::size_t>(j)]
                            : idx.n[static_cast<std::size_t>(j - nu1_)];
    if (v < -reach_[static_cast<std::size_t>(j)] || v > reach_[static_cast<std::size_t>(j)])
      throw ValidationError("mode component outside the key range of the table");
    k += v * strides_[static_cast<std::size_t>(j)];
  }
  return k;
}

std::ptrdiff_t ModeTable::slot(std::int64_t key) const {
  if (!dense_.empty()) {
    const std::int64_t at = key + key_offset_;
    if (at < 0 || at >= static_cast<std::int64_t>(dense_.size())) return -1;
    return dense_[static_cast<std::size_t>(at)];
  }
  auto it = sparse_.find(key);
  return it == sparse_.end() ? -1 : it->second;
}

std::optional<std::size_t> ModeTable::find(const ModeIndex& idx) const {
  if (static_cast<int>(idx.m.size()) != nu1_ || static_cast<int>(idx.n.size()) != nu2_)
    return std::nullopt;
  if (!box_.contains(idx)) return std::nullopt;
  const auto s = slot(key_of(idx));
  if (s < 0) return std::nullopt;
  return static_cast<std::size_t>(s);
}

std::vector<double> dispersions(const FrequencyBasis& basis, const ModeTable& table) {
  if (basis.nu1() != table.nu1() || basis.nu2() != table.nu2())
    throw ValidationError("basis and mode table dimensions differ");
  std::vector<double> out(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) out[i] = dispersion(basis, table[i]);
  return out;
}

}  // namespace qpnls
