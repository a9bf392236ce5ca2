#include "mmot/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmot/error.hpp"

namespace mmot {

double triangle_area(Point2 a, Point2 b, Point2 c) {
  return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double TriangleAreaCost::operator()(const Atom& x, const Atom& y, const Atom& z) const {
  const int equal_pairs = int(x == y) + int(x == z) + int(y == z);
  if (equal_pairs == 3) return 0.0;
  if (equal_pairs >= 1) return gamma;
  return triangle_area(x.as_point(), y.as_point(), z.as_point());
}

CostTensor triangle_area_tensor(const std::vector<DiscreteDistribution>& dists, double gamma) {
  if (dists.size() != 3) throw InvalidArgument("triangle area cost: needs exactly three inputs");
  const TriangleAreaCost cost{gamma};
  CostTensor t({dists[0].size(), dists[1].size(), dists[2].size()});
  std::size_t flat = 0;
  for (const Atom& x : dists[0].atoms())
    for (const Atom& y : dists[1].atoms())
      for (const Atom& z : dists[2].atoms()) t[flat++] = cost(x, y, z);
  return t;
}

double min_positive_area(const std::vector<Point2>& points, double floor) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double a = triangle_area(points[i], points[j], points[k]);
        if (a > floor) best = std::min(best, a);
      }
  return best;
}

namespace {

double solve_w(const PlanarInstance& inst, std::size_t a, std::size_t b, std::size_t c) {
  const std::vector<DiscreteDistribution> three{inst.distributions[a], inst.distributions[b],
                                                inst.distributions[c]};
  return mmot(three, triangle_area_tensor(three, inst.gamma), 1).value;
}

}  // namespace

Theorem2Values theorem2_values(const PlanarInstance& inst) {
  Theorem2Values v;
  v.w123 = solve_w(inst, 0, 1, 2);
  v.w124 = solve_w(inst, 0, 1, 3);
  v.w134 = solve_w(inst, 0, 2, 3);
  v.w234 = solve_w(inst, 1, 2, 3);
  v.margin = v.w123 - (v.w124 + v.w134 + v.w234);
  return v;
}

PlanarInstance theorem2_instance(double epsilon, double gamma) {
  if (!(epsilon > 0.0 && epsilon <= 0.1))
    throw InvalidArgument("theorem2_instance: epsilon must lie in (0, 0.1]");
  PlanarInstance inst;
  inst.epsilon = epsilon;
  inst.gamma = gamma < 0.0 ? epsilon / 4.0 : gamma;
  const Atom blue = Atom::planar(-0.5, 0.0);
  const Atom red = Atom::planar(0.5, 0.0);
  const Atom green1 = Atom::planar(0.5, 1.0);
  const Atom green2 = Atom::planar(-0.5, 1.0);
  const Atom orange1 = Atom::planar(0.0, epsilon);
  const Atom orange2 = Atom::planar(0.0, 0.5 - epsilon);
  inst.points = {blue, red, green1, green2, orange1, orange2};
  inst.distributions = {DiscreteDistribution::point_mass(blue),
                        DiscreteDistribution::point_mass(red),
                        DiscreteDistribution::uniform({green1, green2}),
                        DiscreteDistribution::uniform({orange1, orange2})};

  std::vector<Point2> pts;
  for (const Atom& a : inst.points) pts.push_back(a.as_point());
  const double min_area = min_positive_area(pts, 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      for (std::size_t k = j + 1; k < pts.size(); ++k)
        if (triangle_area(pts[i], pts[j], pts[k]) <= 1e-12)
          throw Error("theorem2_instance: collinear points in the layout");
  if (inst.gamma > min_area + 1e-15)
    throw InvalidArgument("theorem2_instance: gamma exceeds the smallest triangle area");

  const Theorem2Values v = theorem2_values(inst);
  const double expect[4] = {0.5, 0.125, 0.125 + epsilon / 4.0, 0.125 + epsilon / 4.0};
  const double got[4] = {v.w123, v.w124, v.w134, v.w234};
  for (int i = 0; i < 4; ++i)
    if (std::abs(got[i] - expect[i]) > 1e-8) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "theorem2_instance: value " << i << " is " << got[i] << ", expected " << expect[i];
      throw Error(msg.str());
    }
  return inst;
}

AppendixEInstance appendixE_instance(std::size_t n, std::size_t m, double delta) {
  if (n < 3) throw InvalidArgument("appendixE_instance: n must be at least 3");
  if (m < 2) throw InvalidArgument("appendixE_instance: m must be at least 2");
  if (!(delta >= 0.0)) throw InvalidArgument("appendixE_instance: delta must be nonnegative");
  AppendixEInstance inst;
  inst.n = n;
  inst.m = m;
  inst.delta = delta;
  std::vector<double> offset(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) offset[i] = 1.0 + double(i - 1) * delta;
  std::vector<std::vector<double>> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    std::vector<Atom> atoms;
    for (std::size_t s = 0; s < m; ++s) {
      x[i].push_back(offset[i] + double(s));
      atoms.push_back(Atom::scalar(x[i].back()));
    }
    inst.distributions.push_back(DiscreteDistribution::uniform(std::move(atoms)));
  }
  inst.cost = PairwiseCost(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      DenseMatrix d(m, m, kInfiniteCost);
      for (std::size_t s = 0; s < m; ++s) d(s, s) = std::abs(x[i][s] - x[j][s]);
      inst.cost.set(i, j, d);
    }
  return inst;
}

double appendixE_value(const AppendixEInstance& inst, const std::vector<std::size_t>& spaces,
                       int ell) {
  std::vector<DiscreteDistribution> dists;
  for (std::size_t s : spaces) dists.push_back(inst.distributions.at(s));
  const PairwiseCost cost = inst.cost.select(spaces);
  const TransportResult r = pairwise_mmot(dists, cost, 1);
  if (r.effectively_infinite) throw Error("appendixE_value: no finite coupling");
  if (ell == 1) return r.value;
  double total = 0.0;
  for (std::size_t a = 0; a < spaces.size(); ++a)
    for (std::size_t b = a + 1; b < spaces.size(); ++b)
      total += pair_term(r.coupling, cost, a, b, ell);
  return total;
}

AppendixERatio appendixE_ratio(const AppendixEInstance& inst, int ell) {
  const std::size_t n = inst.n;
  std::vector<double> leave(n + 1);
  for (std::size_t e = 0; e <= n; ++e) {
    std::vector<std::size_t> spaces;
    for (std::size_t i = 0; i <= n; ++i)
      if (i != e) spaces.push_back(i);
    leave[e] = appendixE_value(inst, spaces, ell);
  }
  double total = 0.0;
  for (double v : leave) total += v;
  AppendixERatio out;
  out.ratio = (total - leave[n]) / leave[n];
  out.min_over_roles = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e <= n; ++e)
    if (leave[e] > 1e-12) out.min_over_roles = std::min(out.min_over_roles, (total - leave[e]) / leave[e]);
  return out;
}

AppendixEInstance appendixE_search(std::size_t n, std::size_t m, int ell, double tol) {
  const double target = double(n) - 1.0;
  for (double delta = 1.0; delta > 1e-12; delta *= 0.5) {
    AppendixEInstance inst = appendixE_instance(n, m, delta);
    if (std::abs(appendixE_ratio(inst, ell).ratio - target) <= tol) return inst;
  }
  throw NoConvergence("appendixE_search: no spacing reached the target ratio");
}

}  // namespace mmot
