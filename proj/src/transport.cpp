#include "mmot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmot/error.hpp"

namespace mmot {

namespace {

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
  return t;
}

void check_ell(int ell) {
  if (ell < 1) throw InvalidArgument("transport: ell must be a positive integer");
}

double ell_root(double v, int ell) {
  v = std::max(0.0, v);
  return ell == 1 ? v : std::pow(v, 1.0 / ell);
}

Shape shape_of(const std::vector<DiscreteDistribution>& dists) {
  Shape s;
  for (const auto& d : dists) s.push_back(d.size());
  return s;
}

// Solves min sum c_j x_j over joint masses with the given univariate
// marginals, over the columns listed in `support` (all columns if empty).
lp::LpSolution solve_marginal_lp(const std::vector<DiscreteDistribution>& dists,
                                 const std::vector<double>& cost,
                                 const std::vector<std::size_t>& support,
                                 const lp::SimplexOptions& simplex) {
  const Shape shape = shape_of(dists);
  std::vector<std::size_t> offset(dists.size(), 0);
  std::size_t rows = 0;
  for (std::size_t a = 0; a < dists.size(); ++a) {
    offset[a] = rows;
    rows += shape[a];
  }
  const auto strides = row_major_strides(shape);
  lp::LpProblem p(rows, support.size());
  for (std::size_t c = 0; c < support.size(); ++c) {
    std::size_t flat = support[c];
    p.objective[c] = cost[flat];
    for (std::size_t a = 0; a < shape.size(); ++a) {
      const std::size_t s = flat / strides[a];
      flat %= strides[a];
      p.a(offset[a] + s, c) = 1.0;
    }
  }
  for (std::size_t a = 0; a < dists.size(); ++a)
    for (std::size_t s = 0; s < shape[a]; ++s) p.rhs[offset[a] + s] = dists[a].mass(s);
  return lp::solve(p, simplex);
}

}  // namespace

PairwiseCost PairwiseCost::euclidean(const std::vector<DiscreteDistribution>& dists) {
  PairwiseCost out(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i)
    for (std::size_t j = i + 1; j < dists.size(); ++j) {
      DenseMatrix d(dists[i].size(), dists[j].size());
      for (std::size_t s = 0; s < dists[i].size(); ++s)
        for (std::size_t t = 0; t < dists[j].size(); ++t)
          d(s, t) = mmot::euclidean(dists[i].atom(s), dists[j].atom(t));
      out.set(i, j, d);
    }
  return out;
}

void PairwiseCost::set(std::size_t i, std::size_t j, const DenseMatrix& d) {
  if (i == j || i >= n_ || j >= n_) throw InvalidArgument("pairwise cost: bad pair index");
  for (double x : d.data())
    if (x < 0.0) throw InvalidArgument("pairwise cost: negative entry");
  if (i < j)
    pairs_[{i, j}] = d;
  else
    pairs_[{j, i}] = transpose(d);
}

bool PairwiseCost::has(std::size_t i, std::size_t j) const {
  return pairs_.count({std::min(i, j), std::max(i, j)}) > 0;
}

const DenseMatrix& PairwiseCost::stored(std::size_t i, std::size_t j) const {
  auto it = pairs_.find({std::min(i, j), std::max(i, j)});
  if (it == pairs_.end()) {
    std::ostringstream msg;
    msg << "pairwise cost: missing pair (" << i << "," << j << ")";
    throw InvalidArgument(msg.str());
  }
  return it->second;
}

DenseMatrix PairwiseCost::get(std::size_t i, std::size_t j) const {
  const DenseMatrix& d = stored(i, j);
  return i < j ? d : transpose(d);
}

double PairwiseCost::operator()(std::size_t i, std::size_t j, std::size_t s,
                                std::size_t t) const {
  const DenseMatrix& d = stored(i, j);
  return i < j ? d(s, t) : d(t, s);
}

PairwiseCost PairwiseCost::select(const std::vector<std::size_t>& spaces) const {
  PairwiseCost out(spaces.size());
  for (std::size_t a = 0; a < spaces.size(); ++a)
    for (std::size_t b = a + 1; b < spaces.size(); ++b) out.set(a, b, get(spaces[a], spaces[b]));
  return out;
}

TransportResult mmot(const std::vector<DiscreteDistribution>& dists, const CostTensor& d, int ell,
                     const TransportOptions& options) {
  check_ell(ell);
  if (dists.size() < 2) throw InvalidArgument("mmot: need at least two distributions");
  const Shape shape = shape_of(dists);
  if (d.shape() != shape) throw InvalidArgument("mmot: cost tensor shape does not match inputs");
  if (shape_size(shape) > options.entry_cap) {
    std::ostringstream msg;
    msg << "mmot: product space has " << shape_size(shape) << " entries, above the cap of "
        << options.entry_cap << "; use fewer marginals or fewer atoms per marginal";
    throw InvalidArgument(msg.str());
  }

  std::vector<double> cost(d.size());
  std::vector<std::size_t> finite_support;
  std::vector<std::size_t> all(d.size());
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double c = d[j];
    if (std::isnan(c) || c < 0.0) throw InvalidArgument("mmot: cost entries must be nonnegative");
    cost[j] = ell == 1 ? c : std::pow(c, ell);
    all[j] = j;
    if (c < kInfiniteCostThreshold) finite_support.push_back(j);
  }

  TransportResult out;
  lp::LpSolution sol;
  std::vector<std::size_t> used = finite_support;
  if (!finite_support.empty()) sol = solve_marginal_lp(dists, cost, finite_support, options.simplex);
  if (finite_support.empty() || sol.status == lp::Status::Infeasible) {
    // No coupling avoids the sentinel costs.
    used = all;
    sol = solve_marginal_lp(dists, cost, all, options.simplex);
    out.effectively_infinite = true;
  }
  if (sol.status != lp::Status::Optimal)
    throw Error(std::string("mmot: transport LP reported ") + lp::to_string(sol.status));

  std::vector<double> entries(d.size(), 0.0);
  for (std::size_t c = 0; c < used.size(); ++c) entries[used[c]] = sol.x[c];
  out.coupling = JointMass(shape, std::move(entries));
  out.value = ell_root(sol.value, ell);
  if (out.value > kInfiniteCostThreshold) out.effectively_infinite = true;
  return out;
}

TransportResult wasserstein(const DiscreteDistribution& p1, const DiscreteDistribution& p2,
                            const DenseMatrix& d, int ell, const TransportOptions& options) {
  if (d.rows() != p1.size() || d.cols() != p2.size())
    throw InvalidArgument("wasserstein: cost matrix shape does not match inputs");
  CostTensor t({p1.size(), p2.size()}, d.data());
  return mmot({p1, p2}, t, ell, options);
}

CostTensor summed_pairwise_cost(const std::vector<DiscreteDistribution>& dists,
                                const PairwiseCost& d, std::size_t entry_cap) {
  const std::size_t n = dists.size();
  if (d.size() != n) throw InvalidArgument("pairwise cost: size does not match inputs");
  std::vector<DenseMatrix> mats;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      mats.push_back(d.get(a, b));
      if (mats.back().rows() != dists[a].size() || mats.back().cols() != dists[b].size())
        throw InvalidArgument("pairwise cost: matrix shape does not match inputs");
    }
  const Shape shape = shape_of(dists);
  CostTensor out(shape, 0.0, entry_cap);
  std::vector<std::size_t> idx(n, 0);
  std::size_t flat = 0;
  do {
    double v = 0.0;
    std::size_t k = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) v += mats[k++](idx[a], idx[b]);
    out[flat++] = std::min(v, kInfiniteCost);
  } while (next_index(idx, shape));
  return out;
}

double pair_term(const JointMass& r, const PairwiseCost& d, std::size_t i, std::size_t j,
                 int ell) {
  check_ell(ell);
  if (i == j) throw InvalidArgument("pair_term: indices must differ");
  const JointMass rij = marginal(r, {std::min(i, j), std::max(i, j)});
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  double acc = 0.0;
  for (std::size_t s = 0; s < r.shape()[lo]; ++s)
    for (std::size_t t = 0; t < r.shape()[hi]; ++t) {
      const double mass = rij.at({s, t});
      if (mass == 0.0) continue;
      acc += std::pow(d(lo, hi, s, t), ell) * mass;
    }
  return ell_root(acc, ell);
}

TransportResult pairwise_mmot(const std::vector<DiscreteDistribution>& dists,
                              const PairwiseCost& d, int ell, const TransportOptions& options) {
  if (ell != 1)
    throw Unsupported("pairwise_mmot: only ell = 1 is supported (the objective is not linear otherwise)");
  TransportResult out = mmot(dists, summed_pairwise_cost(dists, d, options.entry_cap), 1, options);
  double total = 0.0;
  for (std::size_t a = 0; a < dists.size(); ++a)
    for (std::size_t b = a + 1; b < dists.size(); ++b) {
      const double term = pair_term(out.coupling, d, a, b, 1);
      out.per_pair_terms[{a, b}] = term;
      total += term;
    }
  out.value = total;
  return out;
}

TransportResult barycenter_mmot(const std::vector<DiscreteDistribution>& dists,
                                const std::vector<Atom>& omega, const DenseMatrix& base,
                                const TransportOptions& options) {
  if (base.rows() != omega.size() || base.cols() != omega.size())
    throw InvalidArgument("barycenter: base cost must be |omega| x |omega|");
  std::vector<std::vector<std::size_t>> where(dists.size());
  for (std::size_t a = 0; a < dists.size(); ++a)
    for (const Atom& atom : dists[a].atoms()) {
      auto it = std::find(omega.begin(), omega.end(), atom);
      if (it == omega.end()) {
        std::ostringstream msg;
        msg << "barycenter: an atom of distribution " << a << " is not in omega";
        throw InvalidArgument(msg.str());
      }
      where[a].push_back(static_cast<std::size_t>(it - omega.begin()));
    }
  const Shape shape = shape_of(dists);
  CostTensor cost(shape, 0.0, options.entry_cap);
  std::vector<std::size_t> idx(dists.size(), 0);
  std::size_t flat = 0;
  do {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < omega.size(); ++w) {
      double s = 0.0;
      for (std::size_t a = 0; a < dists.size(); ++a) s += base(where[a][idx[a]], w);
      best = std::min(best, s);
    }
    cost[flat++] = best;
  } while (next_index(idx, shape));
  return mmot(dists, cost, 1, options);
}

double lower_bound_pairwise(const std::vector<DiscreteDistribution>& dists, const PairwiseCost& d,
                            const TransportOptions& options) {
  double total = 0.0;
  for (std::size_t a = 0; a < dists.size(); ++a)
    for (std::size_t b = a + 1; b < dists.size(); ++b)
      total += wasserstein(dists[a], dists[b], d.get(a, b), 1, options).value;
  return total;
}

}  // namespace mmot
