#pragma once

#include <cstddef>
#include <vector>

#include "mmot/core.hpp"
#include "mmot/transport.hpp"

namespace mmot {

double triangle_area(Point2 a, Point2 b, Point2 c);

// 3-way cost on planar atoms: 0 when all three atoms are equal, gamma when
// exactly two are, and the triangle area otherwise.
struct TriangleAreaCost {
  double gamma = 0.0;
  double operator()(const Atom& x, const Atom& y, const Atom& z) const;
};

// Cost tensor of TriangleAreaCost over the atoms of three distributions.
CostTensor triangle_area_tensor(const std::vector<DiscreteDistribution>& dists, double gamma);

// Smallest area among triples of pairwise distinct points that exceeds
// `floor` (areas at or below it count as degenerate). Infinity if none.
double min_positive_area(const std::vector<Point2>& points, double floor = 1e-12);

// Six points and four distributions: blue and red point masses, green and
// orange uniform on two points each.
struct PlanarInstance {
  double epsilon = 0.0;
  double gamma = 0.0;
  std::vector<Atom> points;  // blue, red, green1, green2, orange1, orange2
  std::vector<DiscreteDistribution> distributions;  // blue, red, green, orange
};

struct Theorem2Values {
  double w123 = 0.0;
  double w124 = 0.0;
  double w134 = 0.0;
  double w234 = 0.0;
  // w123 - (w124 + w134 + w234); positive means the inequality fails.
  double margin = 0.0;
};

// Layout with blue (-1/2, 0), red (1/2, 0), green {(1/2, 1), (-1/2, 1)} and
// orange {(0, eps), (0, 1/2 - eps)}. gamma < 0 selects eps / 4. The four MMOT
// values are solved and compared with 1/2, 1/8, 1/8 + eps/4, 1/8 + eps/4;
// a mismatch raises Error.
PlanarInstance theorem2_instance(double epsilon, double gamma = -1.0);

Theorem2Values theorem2_values(const PlanarInstance& inst);

// n + 1 spaces of m real atoms X^i_s = c_i + s with uniform masses, and the
// pairwise cost |X^i_s - X^j_t| for s = t, kInfiniteCost otherwise. The
// offsets are c = (0, 1, 1 + delta, 1 + 2 delta, ...).
struct AppendixEInstance {
  std::size_t n = 0;
  std::size_t m = 0;
  double delta = 0.0;
  std::vector<DiscreteDistribution> distributions;  // n + 1 of them
  PairwiseCost cost{0};
};

AppendixEInstance appendixE_instance(std::size_t n, std::size_t m, double delta = 0.0);

// Pairwise MMOT value of the listed spaces. The only finite-cost coupling
// is the diagonal one, so the ell-th power bracket is evaluated on it.
double appendixE_value(const AppendixEInstance& inst, const std::vector<std::size_t>& spaces,
                       int ell);

struct AppendixERatio {
  double ratio = 0.0;           // (sum_{r <= n} W(leave r out)) / W(1..n)
  double min_over_roles = 0.0;  // same, minimized over which space is left out of the base
};

AppendixERatio appendixE_ratio(const AppendixEInstance& inst, int ell);

// Halves delta from 1 until the ratio lies within `tol` of n - 1.
AppendixEInstance appendixE_search(std::size_t n, std::size_t m, int ell, double tol);

}  // namespace mmot
