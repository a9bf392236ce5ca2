#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "mmot/core.hpp"
#include "mmot/linalg.hpp"
#include "mmot/lp.hpp"

namespace mmot {

// Cost entries at or above kInfiniteCostThreshold stand for +infinity.
inline constexpr double kInfiniteCost = 1e15;
inline constexpr double kInfiniteCostThreshold = 1e12;

// d^{i,j} for every unordered pair of n spaces. Stored once per pair with
// i < j; the (j, i) view is the transpose.
class PairwiseCost {
 public:
  explicit PairwiseCost(std::size_t n) : n_(n) {}

  // Euclidean distances between the atoms of each pair of distributions.
  static PairwiseCost euclidean(const std::vector<DiscreteDistribution>& dists);

  std::size_t size() const { return n_; }
  void set(std::size_t i, std::size_t j, const DenseMatrix& d);
  bool has(std::size_t i, std::size_t j) const;
  // m_i x m_j matrix for the ordered pair (i, j).
  DenseMatrix get(std::size_t i, std::size_t j) const;
  double operator()(std::size_t i, std::size_t j, std::size_t s, std::size_t t) const;

  // Costs restricted to the listed spaces, renumbered 0..k-1 in list order.
  PairwiseCost select(const std::vector<std::size_t>& spaces) const;

 private:
  const DenseMatrix& stored(std::size_t i, std::size_t j) const;

  std::size_t n_;
  std::map<std::pair<std::size_t, std::size_t>, DenseMatrix> pairs_;
};

using CostTensor = DenseTensor;

struct TransportOptions {
  lp::SimplexOptions simplex;
  std::size_t entry_cap = kDefaultEntryCap;
};

struct TransportResult {
  double value = 0.0;
  JointMass coupling = JointMass({1}, {1.0});
  // Keyed by (i, j), i < j. Filled by pairwise_mmot only.
  std::map<std::pair<std::size_t, std::size_t>, double> per_pair_terms;
  // Some cost of +infinity could not be avoided; `value` is then the LP
  // value with sentinel costs and carries no meaning beyond "huge".
  bool effectively_infinite = false;
};

// Classical OT: min over couplings of (sum d^ell r)^(1/ell).
TransportResult wasserstein(const DiscreteDistribution& p1, const DiscreteDistribution& p2,
                            const DenseMatrix& d, int ell, const TransportOptions& options = {});

// General MMOT with an n-way cost tensor. The LP uses cost d^ell under all
// univariate marginal constraints; the value is the ell-th root.
TransportResult mmot(const std::vector<DiscreteDistribution>& dists, const CostTensor& d, int ell,
                     const TransportOptions& options = {});

// D_{s_1..s_n} = sum over pairs a < b of d^{a,b}_{s_a,s_b}.
CostTensor summed_pairwise_cost(const std::vector<DiscreteDistribution>& dists,
                                const PairwiseCost& d, std::size_t entry_cap = kDefaultEntryCap);

// Pairwise MMOT; only ell = 1 is an LP and anything else raises Unsupported.
TransportResult pairwise_mmot(const std::vector<DiscreteDistribution>& dists,
                              const PairwiseCost& d, int ell = 1,
                              const TransportOptions& options = {});

// Barycenter MMOT over a shared atom list omega with metric `base` on it
// (|omega| x |omega|). Every atom of every input must appear in omega.
TransportResult barycenter_mmot(const std::vector<DiscreteDistribution>& dists,
                                const std::vector<Atom>& omega, const DenseMatrix& base,
                                const TransportOptions& options = {});

// Sum over pairs of the two-marginal Wasserstein values (ell = 1).
double lower_bound_pairwise(const std::vector<DiscreteDistribution>& dists, const PairwiseCost& d,
                            const TransportOptions& options = {});

// w_{i,j} = <d^{i,j}, r^{i,j}>_ell^(1/ell) for the bivariate marginal of r.
double pair_term(const JointMass& r, const PairwiseCost& d, std::size_t i, std::size_t j, int ell);

}  // namespace mmot
