#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mmot/error.hpp"
#include "mmot/rng.hpp"
#include "mmot/transport.hpp"
#include "oracles.hpp"

using namespace mmot;

namespace {

std::vector<double> simplex(std::size_t m, Rng& rng) {
  std::vector<double> v(m);
  double s = 0;
  for (auto& x : v) s += x = 0.05 + rng.uniform01();
  for (auto& x : v) x /= s;
  return v;
}

DiscreteDistribution random_planar(std::size_t m, Rng& rng) {
  std::vector<Atom> atoms;
  for (std::size_t s = 0; s < m; ++s) atoms.push_back(Atom::planar(rng.uniform(-1, 1), rng.uniform(-1, 1)));
  return DiscreteDistribution(atoms, simplex(m, rng));
}

DiscreteDistribution scalars(std::vector<double> x, std::vector<double> m) {
  std::vector<Atom> a;
  for (double v : x) a.push_back(Atom::scalar(v));
  return DiscreteDistribution(a, m);
}

DenseMatrix dist_matrix(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  return PairwiseCost::euclidean({a, b}).get(0, 1);
}

void check_marginals(const TransportResult& r, const std::vector<DiscreteDistribution>& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    const JointMass m = marginal(r.coupling, {i});
    for (std::size_t s = 0; s < d[i].size(); ++s) CHECK(std::abs(m.at({s}) - d[i].mass(s)) <= 1e-8);
  }
}

}  // namespace

TEST_CASE("wasserstein examples") {
  const auto p = scalars({0, 1}, {0.5, 0.5});
  CHECK(wasserstein(p, p, dist_matrix(p, p), 1).value == doctest::Approx(0.0));
  const auto x = DiscreteDistribution::point_mass(Atom::scalar(-2));
  const auto y = DiscreteDistribution::point_mass(Atom::scalar(1.5));
  CHECK(wasserstein(x, y, dist_matrix(x, y), 1).value == doctest::Approx(3.5));
  CHECK(wasserstein(x, y, dist_matrix(x, y), 2).value == doctest::Approx(3.5));
  const auto q = scalars({0, 2}, {0.5, 0.5});
  CHECK(wasserstein(p, q, dist_matrix(p, q), 1).value == doctest::Approx(0.5));
  CHECK_THROWS_AS(wasserstein(p, q, DenseMatrix(3, 2), 1), InvalidArgument);
}

TEST_CASE("wasserstein on the line matches monotone rearrangement (50 instances)") {
  Rng rng(2718);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m1 = 1 + rng.below(6), m2 = 1 + rng.below(6);
    std::vector<double> x1, x2;
    for (std::size_t s = 0; s < m1; ++s) x1.push_back(rng.uniform(-3, 3));
    for (std::size_t s = 0; s < m2; ++s) x2.push_back(rng.uniform(-3, 3));
    const auto w1 = simplex(m1, rng), w2 = simplex(m2, rng);
    const auto p = scalars(x1, w1), q = scalars(x2, w2);
    std::vector<std::pair<double, double>> a, b;
    for (std::size_t s = 0; s < m1; ++s) a.push_back({x1[s], w1[s]});
    for (std::size_t s = 0; s < m2; ++s) b.push_back({x2[s], w2[s]});
    const TransportResult r = wasserstein(p, q, dist_matrix(p, q), 1);
    CHECK(std::abs(r.value - oracle::w1_line(a, b)) <= 1e-9);
    check_marginals(r, {p, q});
  }
}

TEST_CASE("mmot with two marginals is wasserstein") {
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    const auto p = random_planar(2 + rng.below(4), rng), q = random_planar(2 + rng.below(4), rng);
    const DenseMatrix d = dist_matrix(p, q);
    for (int ell : {1, 2}) {
      DenseTensor c({p.size(), q.size()});
      for (std::size_t s = 0; s < p.size(); ++s)
        for (std::size_t u = 0; u < q.size(); ++u) c[s * q.size() + u] = d(s, u);
      CHECK(mmot::mmot({p, q}, c, ell).value == doctest::Approx(wasserstein(p, q, d, ell).value).epsilon(1e-9));
    }
    CHECK(pairwise_mmot({p, q}, PairwiseCost::euclidean({p, q})).value ==
          doctest::Approx(wasserstein(p, q, d, 1).value).epsilon(1e-9));
    CHECK(lower_bound_pairwise({p, q}, PairwiseCost::euclidean({p, q})) ==
          doctest::Approx(pairwise_mmot({p, q}, PairwiseCost::euclidean({p, q})).value).epsilon(1e-9));
  }
}

TEST_CASE("pairwise mmot on 2x2x2 matches basic-solution enumeration") {
  Rng rng(31);
  for (int t = 0; t < 25; ++t) {
    std::vector<DiscreteDistribution> d;
    for (int i = 0; i < 3; ++i) d.push_back(random_planar(2, rng));
    const PairwiseCost cost = PairwiseCost::euclidean(d);
    const CostTensor c = summed_pairwise_cost(d, cost);
    // Variables r_{abc}; rows: three univariate marginals of two atoms each.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 8);
    Eigen::VectorXd b(6), obj(8);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t bb = 0; bb < 2; ++bb)
        for (std::size_t cc = 0; cc < 2; ++cc) {
          const int v = int(a * 4 + bb * 2 + cc);
          A(int(a), v) = 1;
          A(2 + int(bb), v) = 1;
          A(4 + int(cc), v) = 1;
          obj(v) = c.at({a, bb, cc});
        }
    for (int i = 0; i < 3; ++i)
      for (int s = 0; s < 2; ++s) b(2 * i + s) = d[i].mass(s);
    const auto expect = oracle::bfs_min(A, b, obj);
    REQUIRE(expect);
    const TransportResult r = pairwise_mmot(d, cost);
    CHECK(std::abs(r.value - *expect) <= 1e-8);
    double terms = 0;
    for (const auto& [pair, v] : r.per_pair_terms) terms += v;
    CHECK(r.per_pair_terms.size() == 3);
    CHECK(terms == doctest::Approx(r.value).epsilon(1e-12));
    check_marginals(r, d);
    CHECK(braket(c, r.coupling.tensor(), 1) == doctest::Approx(r.value).epsilon(1e-10));
  }
}

TEST_CASE("pairwise mmot rejects ell other than one") {
  Rng rng(1);
  std::vector<DiscreteDistribution> d{random_planar(2, rng), random_planar(2, rng), random_planar(2, rng)};
  CHECK_THROWS_AS(pairwise_mmot(d, PairwiseCost::euclidean(d), 2), Unsupported);
  PairwiseCost partial(3);
  partial.set(0, 1, PairwiseCost::euclidean(d).get(0, 1));
  CHECK_THROWS_AS(pairwise_mmot(d, partial), Error);
}

TEST_CASE("pairwise mmot metric properties on seeded instances") {
  Rng rng(555);
  for (int t = 0; t < 30; ++t) {
    std::vector<DiscreteDistribution> d;
    for (int i = 0; i < 4; ++i) d.push_back(random_planar(2 + rng.below(3), rng));
    auto W = [&](std::vector<std::size_t> idx) {
      std::vector<DiscreteDistribution> sel;
      for (auto i : idx) sel.push_back(d[i]);
      return pairwise_mmot(sel, PairwiseCost::euclidean(sel)).value;
    };
    const double w012 = W({0, 1, 2});
    CHECK(w012 >= 0);
    CHECK(std::abs(w012 - W({2, 0, 1})) <= 1e-8);
    CHECK(std::abs(w012 - W({1, 2, 0})) <= 1e-8);
    CHECK(w012 <= W({0, 1, 3}) + W({0, 2, 3}) + W({1, 2, 3}) + 1e-8);
    std::vector<DiscreteDistribution> sel{d[0], d[1], d[2]};
    CHECK(lower_bound_pairwise(sel, PairwiseCost::euclidean(sel)) <= w012 + 1e-9);
  }
}

TEST_CASE("pairwise mmot identity in both directions") {
  Rng rng(9);
  const auto p = random_planar(3, rng);
  // The same measure with its atoms listed in another order.
  const DiscreteDistribution shuffled({p.atom(2), p.atom(0), p.atom(1)}, {p.mass(2), p.mass(0), p.mass(1)});
  std::vector<DiscreteDistribution> same{p, shuffled, p};
  CHECK(pairwise_mmot(same, PairwiseCost::euclidean(same)).value == doctest::Approx(0.0));
  std::vector<DiscreteDistribution> moved{p, p, random_planar(3, rng)};
  CHECK(pairwise_mmot(moved, PairwiseCost::euclidean(moved)).value > 1e-6);
  const DiscreteDistribution reweighted(p.atoms(), {0.2, 0.3, 0.5});
  std::vector<DiscreteDistribution> mass_only{p, p, reweighted};
  CHECK(pairwise_mmot(mass_only, PairwiseCost::euclidean(mass_only)).value > 1e-6);
}

TEST_CASE("barycenter mmot examples") {
  const std::vector<Atom> omega{Atom::scalar(0), Atom::scalar(1), Atom::scalar(2)};
  DenseMatrix base(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) base(a, b) = std::abs(a - b);
  std::vector<DiscreteDistribution> three;
  for (int i = 0; i < 3; ++i) three.push_back(DiscreteDistribution::point_mass(omega[i]));
  CHECK(barycenter_mmot(three, omega, base).value == doctest::Approx(2.0));
  std::vector<DiscreteDistribution> same(3, DiscreteDistribution::point_mass(omega[1]));
  CHECK(barycenter_mmot(same, omega, base).value == doctest::Approx(0.0));
  const auto p = scalars({0, 1}, {0.3, 0.7}), q = scalars({1, 2}, {0.6, 0.4});
  CHECK(barycenter_mmot({p, q}, omega, base).value ==
        doctest::Approx(wasserstein(p, q, dist_matrix(p, q), 1).value));
  std::vector<DiscreteDistribution> outside{p, scalars({5}, {1.0})};
  CHECK_THROWS_AS(barycenter_mmot(outside, omega, base), InvalidArgument);
}

TEST_CASE("entry cap and infinite costs") {
  std::vector<DiscreteDistribution> d;
  std::vector<Atom> atoms;
  for (int s = 0; s < 30; ++s) atoms.push_back(Atom::scalar(s));
  for (int i = 0; i < 5; ++i) d.push_back(DiscreteDistribution::uniform(atoms));
  CHECK_THROWS_WITH_AS(pairwise_mmot(d, PairwiseCost::euclidean(d)),
                       doctest::Contains("fewer marginals"), InvalidArgument);

  // Off-diagonal infinite costs: only the diagonal coupling is finite.
  const auto p = scalars({0, 1}, {0.5, 0.5}), q = scalars({3, 4}, {0.5, 0.5});
  DenseMatrix c(2, 2, kInfiniteCost);
  c(0, 0) = 3;
  c(1, 1) = 3;
  const TransportResult ok = wasserstein(p, q, c, 1);
  CHECK_FALSE(ok.effectively_infinite);
  CHECK(ok.value == doctest::Approx(3.0));
  // Mass imbalance forces an infinite entry.
  const auto r = scalars({3, 4}, {0.25, 0.75});
  const TransportResult inf = wasserstein(p, r, c, 1);
  CHECK(inf.effectively_infinite);
  CHECK(inf.value > kInfiniteCostThreshold);
}

TEST_CASE("pair terms satisfy the triangle inequality") {
  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    std::vector<DiscreteDistribution> d;
    Shape shape;
    for (int i = 0; i < 3; ++i) {
      d.push_back(random_planar(1 + rng.below(4), rng));
      shape.push_back(d.back().size());
    }
    const PairwiseCost cost = PairwiseCost::euclidean(d);
    const JointMass r(shape, simplex(shape_size(shape), rng));
    for (int ell = 1; ell <= 3; ++ell)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          if (i == j) continue;
          const std::size_t k = 3 - i - j;
          CHECK(pair_term(r, cost, i, j, ell) <= pair_term(r, cost, i, k, ell) + pair_term(r, cost, k, j, ell) + 1e-9);
        }
  }
}

TEST_CASE("pairwise cost storage") {
  PairwiseCost c(3);
  c.set(2, 0, DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}}));  // 2x3: space 2 has 2 atoms
  CHECK(c.has(0, 2));
  CHECK(c(0, 2, 2, 1) == 6);
  CHECK(c(2, 0, 1, 2) == 6);
  CHECK_THROWS_AS(c.set(0, 1, DenseMatrix::from_rows({{-1}})), InvalidArgument);
  const PairwiseCost s = c.select({2, 0});
  CHECK(s(0, 1, 1, 2) == 6);
}
