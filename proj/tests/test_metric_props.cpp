#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mmot/constructions.hpp"
#include "mmot/error.hpp"
#include "mmot/metric_props.hpp"
#include "mmot/rng.hpp"
#include "mmot/transport.hpp"

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

double W(const std::vector<DiscreteDistribution>& d, const Tuple& t) {
  std::vector<DiscreteDistribution> sel;
  for (auto i : t) sel.push_back(d[i]);
  return pairwise_mmot(sel, PairwiseCost::euclidean(sel)).value;
}

DistanceTensor pairwise_tensor(std::size_t n, Rng& rng) {
  std::vector<DiscreteDistribution> d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(random_planar(2 + rng.below(2), rng));
  DistanceTensor t(3, n);
  for (const auto& tup : combinations(n, 3)) t.set(tup, W(d, tup));
  return t;
}

DistanceTensor constant_tensor(std::size_t n, double v) {
  DistanceTensor t(3, n);
  for (const auto& tup : combinations(n, 3)) t.set(tup, v);
  return t;
}

bool violates(const DistanceTensor& t, const Tuple& q) {
  for (std::size_t r = 0; r < 4; ++r) {
    Tuple base;
    double rest = 0;
    for (std::size_t s = 0; s < 4; ++s)
      if (s != r) base.push_back(q[s]);
    for (std::size_t s = 0; s < 4; ++s) {
      if (s == r) continue;
      Tuple other;
      for (std::size_t u = 0; u < 4; ++u)
        if (u != s) other.push_back(q[u]);
      rest += t.value(other);
    }
    if (t.value(base) > rest + 1e-12) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("distance tensor storage") {
  DistanceTensor t(3, 5);
  CHECK(t.key_count() == 10);
  CHECK(t.sampled_count() == 0);
  CHECK(t.value({0, 1, 2}) == DistanceTensor::kSentinel);
  t.set({1, 2, 4}, 0.5);
  CHECK(t.sampled({1, 2, 4}));
  CHECK(t.sampled_keys() == std::vector<Tuple>{{1, 2, 4}});
  CHECK_THROWS_AS(t.value({2, 1, 4}), InvalidArgument);
  CHECK_THROWS_AS(t.set({0, 1, 5}, 1.0), InvalidArgument);
  CHECK(combinations(4, 2).size() == 6);
  CHECK(combinations(4, 2).front() == Tuple{0, 1});
}

TEST_CASE("distance tensor CSV round trip is lossless") {
  Rng rng(4);
  DistanceTensor t(3, 6);
  for (const auto& tup : combinations(6, 3))
    if (rng.bernoulli(0.6)) t.set(tup, rng.uniform01() / 3.0);
  std::ostringstream a;
  t.write_csv(a);
  std::istringstream in(a.str());
  const DistanceTensor back = DistanceTensor::read_csv(in);
  CHECK(back == t);
  std::ostringstream b;
  back.write_csv(b);
  CHECK(a.str() == b.str());
  std::istringstream bad("i,j,k,value,sampled\n0,1,x,0.5,1\n");
  CHECK_THROWS_AS(DistanceTensor::read_csv(bad), ParseError);
}

TEST_CASE("check_metric examples") {
  std::vector<Atom> pts{Atom::planar(0, 0), Atom::planar(1, 0), Atom::planar(0, 2), Atom::planar(3, 1)};
  const std::vector<std::vector<Atom>> spaces{pts, {pts[0], pts[2]}};
  auto eu = [&](std::size_t i, std::size_t j, std::size_t s, std::size_t t) {
    return euclidean(spaces[i][s], spaces[j][t]);
  };
  CHECK(check_metric(spaces, eu).ok());
  auto discrete = [&](std::size_t i, std::size_t j, std::size_t s, std::size_t t) {
    return spaces[i][s] == spaces[j][t] ? 0.0 : 1.0;
  };
  CHECK(check_metric(spaces, discrete).ok());
  auto negated = [&](std::size_t i, std::size_t j, std::size_t s, std::size_t t) {
    const double v = eu(i, j, s, t);
    return i == 0 && j == 0 && s == 1 && t == 3 ? -v : v;
  };
  const MetricReport r = check_metric(spaces, negated);
  CHECK_FALSE(r.nonnegative);
  CHECK(std::any_of(r.violations.begin(), r.violations.end(),
                    [](const Violation& v) { return v.property == "nonnegativity"; }));
}

TEST_CASE("n-metric cost checks") {
  const PlanarInstance inst = theorem2_instance(0.01);
  const auto& pts = inst.points;
  auto area = [&](double gamma) {
    return [&pts, gamma](std::span<const std::size_t> s) {
      return TriangleAreaCost{gamma}(pts[s[0]], pts[s[1]], pts[s[2]]);
    };
  };
  CHECK(check_n_metric_cost(pts, 3, area(0.01 / 4), 1.0).ok());
  const MetricReport zero = check_n_metric_cost(pts, 3, area(0.0), 1.0);
  CHECK_FALSE(zero.identity);

  Rng rng(12);
  std::vector<Atom> cloud;
  for (int s = 0; s < 6; ++s) cloud.push_back(Atom::planar(rng.uniform(-1, 1), rng.uniform(-1, 1)));
  auto summed = [&](std::span<const std::size_t> s) {
    double v = 0;
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b) v += euclidean(cloud[s[a]], cloud[s[b]]);
    return v;
  };
  CHECK(check_n_metric_cost(cloud, 3, summed, 1.0).ok());
  CHECK(check_n_metric_cost(cloud, 4, summed, 1.0).ok());
}

TEST_CASE("check_W_tensor examples") {
  Rng rng(50);
  const DistanceTensor w = pairwise_tensor(5, rng);
  const MetricReport ok = check_W_tensor(w, 1.0);
  CHECK(ok.ok());
  CHECK(ok.violations.empty());
  CHECK(ok.audited == 20);  // 5 subsets, 4 roles each

  const Theorem2Values v = theorem2_values(theorem2_instance(0.01));
  DistanceTensor bad(3, 4);
  bad.set({0, 1, 2}, v.w123);
  bad.set({0, 1, 3}, v.w124);
  bad.set({0, 2, 3}, v.w134);
  bad.set({1, 2, 3}, v.w234);
  const MetricReport nr = check_W_tensor(bad, 1.0);
  CHECK_FALSE(nr.triangle);
  CHECK_FALSE(nr.violations.empty());

  const MetricReport c = check_W_tensor(constant_tensor(6, 0.7), 1.0);
  CHECK(c.ok());
  CHECK(c.empirical_C == doctest::Approx(3.0));

  // Missing entries keep a subset out of the audit.
  DistanceTensor partial(3, 4);
  partial.set({0, 1, 2}, 1.0);
  const MetricReport none = check_W_tensor(partial, 1.0);
  CHECK(none.audited == 0);
  CHECK(std::isnan(none.empirical_C));
}

TEST_CASE("check_W_tensor parallel output equals serial") {
  Rng rng(3);
  DistanceTensor t(3, 14);
  for (const auto& tup : combinations(14, 3))
    if (rng.bernoulli(0.8)) t.set(tup, rng.uniform(0.1, 1.0));
  const MetricReport a = check_W_tensor(t, 1.0), b = check_W_tensor_serial(t, 1.0);
  CHECK(a.audited == b.audited);
  CHECK(a.empirical_C == b.empirical_C);
  REQUIRE(a.violations.size() == b.violations.size());
  for (std::size_t i = 0; i < a.violations.size(); ++i) {
    CHECK(a.violations[i].tuple == b.violations[i].tuple);
    CHECK(a.violations[i].margin == b.violations[i].margin);
  }
}

TEST_CASE("injection examples") {
  Rng rng(1);
  const DistanceTensor c = constant_tensor(4, 1.0);
  InjectionOptions none;
  none.fraction = 0.0;
  CHECK(inject_violations(c, none, rng).tensor == c);

  InjectionOptions one;
  one.fraction = 0.25;  // ceil(0.25 * 4) = 1 modification
  const InjectionResult r = inject_violations(c, one, rng);
  REQUIRE(r.modified.size() == 1);
  CHECK(r.tensor.value(r.modified[0]) == doctest::Approx(3.6));
  CHECK(violates(r.tensor, r.targeted[0]));
}

TEST_CASE("injection on a ten-object pairwise tensor") {
  Rng data(808);
  const DistanceTensor t = pairwise_tensor(10, data);
  REQUIRE(check_W_tensor(t, 1.0).ok());
  Rng rng(9);
  const InjectionResult r = inject_violations(t, {}, rng);
  const std::size_t expect = std::size_t(std::ceil(0.20 * double(t.sampled_count())));
  CHECK(r.modified.size() == expect);
  std::size_t changed = 0;
  for (const auto& k : t.keys()) changed += t.value(k) != r.tensor.value(k);
  CHECK(changed == expect);
  for (const auto& q : r.targeted) CHECK(violates(r.tensor, q));
  CHECK(check_W_tensor(r.tensor, 1.0).empirical_C < 1.0);

  Rng again(9);
  CHECK(inject_violations(t, {}, again).tensor == r.tensor);

  DistanceTensor sparse(3, 4);
  sparse.set({0, 1, 2}, 1.0);
  Rng rr(2);
  CHECK_THROWS_AS(inject_violations(sparse, {}, rr), Error);
}

TEST_CASE("no-gluing examples") {
  std::vector<double> a{1, 0, 1, 0, 1, 0, 0, 0, 0};
  for (double& x : a) x /= 3;
  const JointMass p12({3, 3}, a), p23({3, 3}, std::vector<double>(9, 1.0 / 9));
  const GluingCheck bad = no_gluing_check(p12, p12, p23);
  CHECK_FALSE(bad.feasible);
  CHECK(bad.phase_one_value > 1e-8);

  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const Shape s{1 + rng.below(4), 1 + rng.below(4), 1 + rng.below(4)};
    const JointMass r(s, simplex(shape_size(s), rng));
    const JointMass m12 = marginal(r, {0, 1}), m13 = marginal(r, {0, 2}), m23 = marginal(r, {1, 2});
    const GluingCheck g = no_gluing_check(m12, m13, m23);
    REQUIRE(g.feasible);
    REQUIRE(g.witness);
    const JointMass w12 = marginal(*g.witness, {0, 1});
    for (std::size_t i = 0; i < w12.size(); ++i) CHECK(std::abs(w12.entries()[i] - m12.entries()[i]) <= 1e-8);
  }

  const std::vector<double> p{0.3, 0.7}, q{0.5, 0.5}, s{0.2, 0.8};
  const GluingCheck prod = no_gluing_check(JointMass::product({p, q}), JointMass::product({p, s}),
                                           JointMass::product({q, s}));
  CHECK(prod.feasible);

  CHECK_THROWS_AS(no_gluing_check(JointMass::product({p, q}), JointMass::product({q, s}),
                                  JointMass::product({q, s})),
                  InvalidArgument);
}
