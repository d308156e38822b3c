#include "qpnls/combin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qpnls/error.hpp"

namespace qpnls {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw UnsupportedError("branch count overflows 64 bits");
  return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw UnsupportedError("branch count overflows 64 bits");
  return r;
}

void require_level(int k) {
  if (k < 1) throw ValidationError("branch level k must be >= 1");
}

void require_cap(int cap) {
  if (cap < 0) throw ValidationError("ell cap must be >= 0");
}

// Number of branches materialised as children before we give up.
constexpr std::uint64_t kMaterialiseLimit = 20'000'000;

}  // namespace

Branch Branch::leaf() {
  static const Branch b(std::make_shared<const Rep>(Rep{Kind::leaf, 1, 0, 1, 0, 1, kUnbounded, {}}));
  return b;
}

Branch Branch::unit() {
  static const Branch b(std::make_shared<const Rep>(Rep{Kind::unit, 3, 1, 1, 1, 1, 1, {}}));
  return b;
}

Branch Branch::node(const Branch& a, const Branch& b, const Branch& c) {
  Rep rep{Kind::node, 0, 0, 1, 0, 2, kUnbounded, {a, b, c}};
  for (const auto& ch : rep.children) {
    rep.twice_sigma += ch.twice_sigma();
    rep.depth = std::max(rep.depth, ch.depth() + 1);
    rep.min_level = std::max(rep.min_level, ch.min_level() + 1);
    if (ch.max_level() != kUnbounded) rep.max_level = std::min(rep.max_level, ch.max_level() + 1);
  }
  if (rep.min_level > rep.max_level)
    throw MalformedBranchError("children of " + std::string("(") + a.to_string() + "," +
                               b.to_string() + "," + c.to_string() +
                               ") share no common level of the branch sets");
  rep.ell = (rep.twice_sigma - 1) / 2;
  rep.dee = static_cast<std::uint64_t>(rep.ell);
  for (const auto& ch : rep.children) rep.dee = checked_mul(rep.dee, ch.dee());
  return Branch(std::make_shared<const Rep>(std::move(rep)));
}

const Branch& Branch::child(int j) const {
  if (kind() != Kind::node || j < 0 || j > 2) throw ValidationError("branch has no such child");
  return rep_->children[static_cast<std::size_t>(j)];
}

std::string Branch::to_string() const {
  switch (kind()) {
    case Kind::leaf:
      return "0";
    case Kind::unit:
      return "1";
    case Kind::node:
      break;
  }
  return "(" + child(0).to_string() + "," + child(1).to_string() + "," + child(2).to_string() + ")";
}

bool operator==(const Branch& a, const Branch& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() != Branch::Kind::node) return true;
  for (int j = 0; j < 3; ++j)
    if (!(a.child(j) == b.child(j))) return false;
  return true;
}

int max_ell(int k) {
  require_level(k);
  int ell = 1;
  for (int j = 2; j <= k; ++j) {
    if (ell > (kNoCap - 1) / 3) return kNoCap;
    ell = 3 * ell + 1;
  }
  return ell;
}

namespace {

// Per-level census as a dense vector indexed by ell.
std::vector<std::uint64_t> census_vector(int k, int cap) {
  std::vector<std::uint64_t> level{1, 1};  // G(1)
  if (cap < 1) level.resize(1);
  for (int j = 2; j <= k; ++j) {
    const int top = std::min(cap, max_ell(j));
    std::vector<std::uint64_t> next(static_cast<std::size_t>(top) + 1, 0);
    next[0] = 1;
    // pair[s] = number of ordered (a, b) with ell sum s.
    const int prev_top = static_cast<int>(level.size()) - 1;
    std::vector<std::uint64_t> pair(static_cast<std::size_t>(std::max(0, top)), 0);
    for (int a = 0; a <= prev_top; ++a)
      for (int b = 0; b <= prev_top && a + b < top; ++b)
        pair[static_cast<std::size_t>(a + b)] =
            checked_add(pair[static_cast<std::size_t>(a + b)],
                        checked_mul(level[static_cast<std::size_t>(a)],
                                    level[static_cast<std::size_t>(b)]));
    for (int s = 0; s < top; ++s)
      for (int c = 0; c <= prev_top && s + c + 1 <= top; ++c)
        next[static_cast<std::size_t>(s + c + 1)] =
            checked_add(next[static_cast<std::size_t>(s + c + 1)],
                        checked_mul(pair[static_cast<std::size_t>(s)],
                                    level[static_cast<std::size_t>(c)]));
    level = std::move(next);
  }
  return level;
}

std::vector<double> inverse_dee_vector(int k, int cap) {
  std::vector<double> level{1.0, 1.0};
  if (cap < 1) level.resize(1);
  for (int j = 2; j <= k; ++j) {
    const int top = std::min(cap, max_ell(j));
    std::vector<double> next(static_cast<std::size_t>(top) + 1, 0.0);
    next[0] = 1.0;
    const int prev_top = static_cast<int>(level.size()) - 1;
    std::vector<double> pair(static_cast<std::size_t>(std::max(0, top)), 0.0);
    for (int a = 0; a <= prev_top; ++a)
      for (int b = 0; b <= prev_top && a + b < top; ++b)
        pair[static_cast<std::size_t>(a + b)] +=
            level[static_cast<std::size_t>(a)] * level[static_cast<std::size_t>(b)];
    for (int s = 0; s < top; ++s)
      for (int c = 0; c <= prev_top && s + c + 1 <= top; ++c)
        next[static_cast<std::size_t>(s + c + 1)] +=
            pair[static_cast<std::size_t>(s)] * level[static_cast<std::size_t>(c)];
    // 1/dee(Node) = (1/ell) * prod 1/dee(children).
    for (int l = 1; l <= top; ++l) next[static_cast<std::size_t>(l)] /= l;
    level = std::move(next);
  }
  return level;
}

// Branches of G(k) with ell <= cap, sorted by ell (stable).
std::vector<Branch> materialise(int k, int cap) {
  std::uint64_t total = 0;
  for (auto c : census_vector(k, cap)) total = checked_add(total, c);
  if (total > kMaterialiseLimit)
    throw UnsupportedError("G(" + std::to_string(k) + ") with ell cap " +
                           (cap == kNoCap ? std::string("none") : std::to_string(cap)) +
                           " has " + std::to_string(total) + " branches; lower the ell cap");
  std::vector<Branch> out;
  out.reserve(total);
  for_each_branch(k, cap, [&](const Branch& b) { out.push_back(b); });
  std::stable_sort(out.begin(), out.end(),
                   [](const Branch& a, const Branch& b) { return a.ell() < b.ell(); });
  return out;
}

}  // namespace

void for_each_branch(int k, int ell_cap, const std::function<void(const Branch&)>& visit) {
  require_level(k);
  require_cap(ell_cap);
  visit(Branch::leaf());
  if (ell_cap < 1) return;
  if (k == 1) {
    visit(Branch::unit());
    return;
  }
  const int budget = ell_cap == kNoCap ? kNoCap : ell_cap - 1;
  const auto children = materialise(k - 1, budget);
  const auto fits = [&](long s) { return budget == kNoCap || s <= budget; };
  for (const auto& a : children) {
    if (!fits(a.ell())) break;
    for (const auto& b : children) {
      if (!fits(static_cast<long>(a.ell()) + b.ell())) break;
      for (const auto& c : children) {
        if (!fits(static_cast<long>(a.ell()) + b.ell() + c.ell())) break;
        visit(Branch::node(a, b, c));
      }
    }
  }
}

std::vector<Branch> enumerate_branches(int k, int ell_cap) {
  require_level(k);
  require_cap(ell_cap);
  std::uint64_t total = 0;
  for (auto c : census_vector(k, ell_cap)) total = checked_add(total, c);
  if (total > kMaterialiseLimit)
    throw UnsupportedError("too many branches to materialise; use for_each_branch or an ell cap");
  std::vector<Branch> out;
  out.reserve(total);
  for_each_branch(k, ell_cap, [&](const Branch& b) { out.push_back(b); });
  return out;
}

std::map<int, std::uint64_t> branch_census(int k, int ell_cap) {
  require_level(k);
  require_cap(ell_cap);
  const auto v = census_vector(k, ell_cap);
  std::map<int, std::uint64_t> out;
  for (std::size_t l = 0; l < v.size(); ++l)
    if (v[l] != 0) out[static_cast<int>(l)] = v[l];
  return out;
}

std::map<int, double> inverse_dee_census(int k, int ell_cap) {
  require_level(k);
  require_cap(ell_cap);
  const auto v = inverse_dee_vector(k, ell_cap);
  std::map<int, double> out;
  for (std::size_t l = 0; l < v.size(); ++l)
    if (v[l] != 0.0) out[static_cast<int>(l)] = v[l];
  return out;
}

double majorant_partial_sum(int k, int ell_cap, double x) {
  if (!(x >= 0.0)) throw ValidationError("majorant argument must be >= 0");
  require_level(k);
  require_cap(ell_cap);
  const auto v = inverse_dee_vector(k, ell_cap);
  // Horner from the top level down.
  double sum = 0.0;
  for (std::size_t l = v.size(); l-- > 0;) sum = sum * x + v[l];
  return sum;
}

double majorant_closed_form(double x) {
  if (!(x >= 0.0) || x >= 0.5) throw ValidationError("closed form needs 0 <= x < 1/2");
  return 1.0 / std::sqrt(1.0 - 2.0 * x);
}

double fuss_catalan(int j) {
  if (j < 0) throw ValidationError("Fuss-Catalan index must be >= 0");
  double v = 1.0;
  for (int l = 0; l < j; ++l)
    v *= (3.0 * l + 3) * (3.0 * l + 2) * (3.0 * l + 1) / ((l + 1.0) * (2.0 * l + 3) * (2.0 * l + 2));
  return v;
}

double majorant_tail_bound(int ell_cap, double x) {
  require_cap(ell_cap);
  if (!(x >= 0.0)) throw ValidationError("tail bound argument must be >= 0");
  if (x > 4.0 / 27.0) return std::numeric_limits<double>::infinity();
  if (x == 0.0 || ell_cap == kNoCap) return 0.0;
  if (ell_cap > 1000000) throw UnsupportedError("tail bound needs ell_cap <= 1e6");

  // Small x: sum the tail directly. Term ratios increase towards 27x/4, so the
  // remainder after a term is at most term * rho / (1 - rho).
  const double rho = 27.0 * x / 4.0;
  if (rho <= 0.8) {
    double term = fuss_catalan(ell_cap + 1) * std::pow(x, ell_cap + 1);
    double sum = 0.0;
    for (int l = ell_cap + 1; term > 1e-18 * sum && term > 0.0; ++l) {
      sum += term;
      term *= x * (3.0 * l + 3) * (3.0 * l + 2) * (3.0 * l + 1) /
              ((l + 1.0) * (2.0 * l + 3) * (2.0 * l + 2));
    }
    return sum + term * rho / (1.0 - rho);
  }

  // Otherwise T - partial sum, T = 1 + x T^3 the smallest positive root from
  // the trigonometric formula (the root is double at x = 4/27, where
  // bisection would lose half the digits).
  const double s3 = std::sqrt(3.0 * x);
  const double phi = std::acos(std::max(-1.0, -1.5 * s3));
  const double total = 2.0 / s3 * std::cos(phi / 3.0 - 2.0 * std::numbers::pi / 3.0);
  double partial = 0.0, term = 1.0;
  for (int l = 0; l <= ell_cap; ++l) {
    partial += term;
    term *= x * (3.0 * l + 3) * (3.0 * l + 2) * (3.0 * l + 1) /
            ((l + 1.0) * (2.0 * l + 3) * (2.0 * l + 2));
  }
  return std::max(0.0, total - partial);
}

namespace {

void require_exponential(const DecayProfile& profile) {
  if (profile.kind != DecayProfile::Kind::exponential)
    throw UnsupportedError("constant is only available for exponential decay profiles");
}

}  // namespace

double time_scale(const DecayProfile& profile, int nu1, int nu2, double epsilon) {
  require_exponential(profile);
  if (!(epsilon > 0.0)) throw ValidationError("time scale needs epsilon > 0");
  return 4.0 / 27.0 * std::pow(profile.kappa1 / 6.0, nu1) * std::pow(profile.kappa2 / 6.0, nu2) /
         epsilon;
}

double amplitude_constant(const DecayProfile& profile, int nu1, int nu2) {
  require_exponential(profile);
  return 1.5 * std::pow(6.0 / profile.kappa1, nu1) * std::pow(6.0 / profile.kappa2, nu2);
}

double bound_factors(const Branch& branch, double t, double epsilon) {
  if (t < 0.0 || epsilon < 0.0) throw ValidationError("bound factors need t, epsilon >= 0");
  return std::pow(epsilon * t, branch.ell()) / static_cast<double>(branch.dee());
}

ModeIndex TreeTerm::lambda() const {
  if (assignment.empty()) throw ValidationError("empty assignment");
  ModeIndex acc = assignment.front();
  for (std::size_t j = 1; j < assignment.size(); ++j)
    acc = j % 2 == 1 ? acc - assignment[j] : acc + assignment[j];
  return acc;
}

std::vector<IntVec> TreeTerm::x_part() const {
  std::vector<IntVec> out;
  for (const auto& a : assignment) out.push_back(a.m);
  return out;
}

std::vector<IntVec> TreeTerm::y_part() const {
  std::vector<IntVec> out;
  for (const auto& a : assignment) out.push_back(a.n);
  return out;
}

std::int64_t TreeTerm::l1_x() const {
  std::int64_t s = 0;
  for (const auto& a : assignment) s += l1_norm(a.m);
  return s;
}

std::int64_t TreeTerm::l1_y() const {
  std::int64_t s = 0;
  for (const auto& a : assignment) s += l1_norm(a.n);
  return s;
}

}  // namespace qpnls
