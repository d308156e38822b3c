#pragma once

// Combinatorial trees indexing the terms of the expanded Picard iterate.
//
// Branch sets: G(1) = {0, 1}, G(k) = {0} u G(k-1)^3 for k >= 2. Label 0 is a
// Leaf (the linear term), label 1 a Unit (the first Duhamel integral), and a
// triple a Node (one more Duhamel integral over three sub-branches).
//
// Counting functions, all exact integers:
//   2*sigma: Leaf 1, Unit 3, Node sum of children      (number of leaf modes)
//   ell    : sigma - 1/2                                (number of integrals)
//   dee    : Leaf 1, Unit 1, Node ell * prod(children)  (iterated-integral denominator)

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qpnls/fields.hpp"

namespace qpnls {

class Branch {
 public:
  enum class Kind { leaf, unit, node };

  static Branch leaf();
  static Branch unit();
  // Throws MalformedBranchError when no k has all three children in G(k-1).
  static Branch node(const Branch& a, const Branch& b, const Branch& c);

  Kind kind() const { return rep_->kind; }
  int twice_sigma() const { return rep_->twice_sigma; }
  int ell() const { return rep_->ell; }
  std::uint64_t dee() const { return rep_->dee; }
  int depth() const { return rep_->depth; }
  const Branch& child(int j) const;

  // Smallest and largest k with this branch in G(k); max_level() is
  // kUnbounded for branches without a Unit.
  int min_level() const { return rep_->min_level; }
  int max_level() const { return rep_->max_level; }
  bool belongs_to(int k) const { return k >= min_level() && k <= max_level(); }

  static constexpr int kUnbounded = std::numeric_limits<int>::max();

  // "0", "1", "(0,1,1)", ...
  std::string to_string() const;

  friend bool operator==(const Branch& a, const Branch& b);

 private:
  struct Rep {
    Kind kind;
    int twice_sigma;
    int ell;
    std::uint64_t dee;
    int depth;
    int min_level;
    int max_level;
    std::vector<Branch> children;
  };
  explicit Branch(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

constexpr int kNoCap = std::numeric_limits<int>::max();

// Largest ell occurring in G(k): 1, 4, 13, 40, ...
int max_ell(int k);

// Streams every branch of G(k) with ell <= ell_cap exactly once, in a fixed
// order (Leaf first, then by child position in ell-sorted child lists).
void for_each_branch(int k, int ell_cap, const std::function<void(const Branch&)>& visit);
std::vector<Branch> enumerate_branches(int k, int ell_cap);

// Count of branches of G(k) per ell level, ell <= ell_cap. Computed by the
// level recursion; throws UnsupportedError on 64-bit overflow.
std::map<int, std::uint64_t> branch_census(int k, int ell_cap);

// Sum over G(k), ell <= ell_cap, of 1/dee, per ell level.
std::map<int, double> inverse_dee_census(int k, int ell_cap);

// sum over branches of G(k) with ell <= ell_cap of x^ell / dee.
double majorant_partial_sum(int k, int ell_cap, double x);

// (1 - 2x)^{-1/2}: the majorant series summed over all trees (x < 1/2).
double majorant_closed_form(double x);

// Fuss-Catalan number C(3j, j) / (2j + 1) in floating point.
double fuss_catalan(int j);

// sum_{ell > ell_cap} FussCatalan(ell) x^ell, an upper bound for the tail of
// any majorant partial sum. +inf for x > 4/27.
double majorant_tail_bound(int ell_cap, double x);

// (4/27) (kappa1/6)^nu1 (kappa2/6)^nu2 / eps.
double time_scale(const DecayProfile& profile, int nu1, int nu2, double epsilon);

// (3/2) (6/kappa1)^nu1 (6/kappa2)^nu2.
double amplitude_constant(const DecayProfile& profile, int nu1, int nu2);

// (eps t)^ell / dee.
double bound_factors(const Branch& branch, double t, double epsilon);

// A branch together with one leaf-mode assignment (m_j, n_j), j = 1..2 sigma.
struct TreeTerm {
  Branch branch;
  std::vector<ModeIndex> assignment;

  // Alternating sum of the assigned modes: the output mode of the term.
  ModeIndex lambda() const;
  // Projections onto the x and y lattices.
  std::vector<IntVec> x_part() const;
  std::vector<IntVec> y_part() const;
  // sum_j |m_j|_1 and sum_j |n_j|_1.
  std::int64_t l1_x() const;
  std::int64_t l1_y() const;
};

// C * I(t) * F at every node of `grid` for one tree term, with the nested
// Duhamel integrals evaluated by the cumulative scheme on `grid`. Modes
// outside the initial field's box carry coefficient 0. Depth <= 2 only.
std::vector<Complex> tree_term(const TreeTerm& term, const CoefficientField& initial,
                               const TimeGrid& grid, double epsilon);

// sum of all tree terms of G(2) whose output is mode `out` and whose
// intermediate modes all lie in the box (the Galerkin-admissible terms).
std::vector<Complex> tree_sum_order2(const CoefficientField& initial, const TimeGrid& grid,
                                     double epsilon, std::size_t out);

}  // namespace qpnls
