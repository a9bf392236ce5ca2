#include "mmot/verify.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "mmot/constructions.hpp"
#include "mmot/error.hpp"
#include "mmot/metric_props.hpp"
#include "mmot/rng.hpp"
#include "mmot/transport.hpp"

namespace mmot {

namespace {

std::vector<double> random_simplex(std::size_t m, Rng& rng) {
  std::vector<double> v(m);
  double s = 0.0;
  for (auto& x : v) s += x = 0.05 + rng.uniform01();
  for (auto& x : v) x /= s;
  return v;
}

DiscreteDistribution random_planar(std::size_t m, Rng& rng) {
  std::vector<Atom> atoms;
  for (std::size_t s = 0; s < m; ++s) atoms.push_back(Atom::planar(rng.uniform(-1, 1), rng.uniform(-1, 1)));
  return DiscreteDistribution(atoms, random_simplex(m, rng));
}

JointMass random_joint(const Shape& shape, Rng& rng) {
  std::size_t size = 1;
  for (auto m : shape) size *= m;
  return JointMass(shape, random_simplex(size, rng));
}

VerifyCheck run(const std::string& name, const std::function<std::string()>& body) {
  VerifyCheck c{name, false, ""};
  try {
    c.detail = body();
    c.passed = c.detail.empty();
    if (c.passed) c.detail = "ok";
  } catch (const std::exception& e) {
    c.detail = std::string("raised: ") + e.what();
  }
  return c;
}

std::string gluing_counterexample() {
  std::vector<double> a = {1, 0, 1, 0, 1, 0, 0, 0, 0};
  for (double& x : a) x /= 3.0;
  const JointMass p12({3, 3}, a);
  const JointMass p23({3, 3}, std::vector<double>(9, 1.0 / 9.0));
  return no_gluing_check(p12, p12, p23).feasible ? "reported feasible" : "";
}

}  // namespace

std::vector<VerifyCheck> run_verify(const VerifyHooks& hooks) {
  std::vector<VerifyCheck> out;
  Rng rng(hooks.seed);

  out.push_back(run("gluing_counterexample_infeasible", gluing_counterexample));

  out.push_back(run("gluing_random_feasible", [&] {
    for (std::size_t t = 0; t < hooks.samples; ++t) {
      const Shape shape{2 + rng.below(3), 2 + rng.below(3), 2 + rng.below(3)};
      const JointMass r = random_joint(shape, rng);
      const GluingCheck g = no_gluing_check(marginal(r, {0, 1}), marginal(r, {0, 2}), marginal(r, {1, 2}));
      if (!g.feasible || !g.witness) return "sample " + std::to_string(t) + " reported infeasible";
    }
    return std::string();
  }));

  out.push_back(run("nonmetric_planar_values", [&] {
    const PlanarInstance inst = theorem2_instance(0.01, hooks.gamma);
    const Theorem2Values v = theorem2_values(inst);
    if (!(v.margin > 0.0)) return std::string("triangle inequality not violated");
    return std::string();
  }));

  out.push_back(run("triangle_area_cost_is_3_metric", [&] {
    const PlanarInstance inst = theorem2_instance(0.01, hooks.gamma);
    const TriangleAreaCost cost{inst.gamma};
    const auto& pts = inst.points;
    const MetricReport r = check_n_metric_cost(pts, 3, [&](std::span<const std::size_t> s) {
      return cost(pts[s[0]], pts[s[1]], pts[s[2]]);
    }, 1.0);
    if (r.ok()) return std::string();
    std::ostringstream s;
    s << r.violations.size() << " violations, first: " << r.violations.front().property;
    return s.str();
  }));

  out.push_back(run("hash_H_audit", [&] {
    for (std::size_t n = 2; n <= 40; ++n) {
      const auto a = hash::audit_H(n);
      if (!a.passed) return "n=" + std::to_string(n) + ": " + a.failures.front();
    }
    return std::string();
  }));

  out.push_back(run("hash_H_prime_audit", [&] {
    for (std::size_t n = 2; n <= 40; ++n) {
      const auto a = hash::audit_H_prime(n, {}, hooks.h_prime);
      if (a.max_multiplicity > 5)
        return "n=" + std::to_string(n) + ": multiplicity " + std::to_string(a.max_multiplicity);
      // At n = 2 the exclusion constraint cannot hold (see README).
      if (n >= 3 && !a.passed) return "n=" + std::to_string(n) + ": " + a.failures.front();
    }
    const auto a4 = hash::audit_H_prime(4, {}, hooks.h_prime);
    if (a4.multiplicity(hash::Triple{2, 3, 1}) != 5) return std::string("n=4: (2,3,1) not listed 5 times");
    return std::string();
  }));

  out.push_back(run("glue_marginals", [&] {
    for (std::size_t t = 0; t < hooks.samples; ++t) {
      const std::size_t axes = 3 + rng.below(2), pivot = rng.below(axes);
      Shape shape(axes);
      for (auto& m : shape) m = 2 + rng.below(3);
      const auto q = random_simplex(shape[pivot], rng);
      std::map<std::size_t, ConditionalMass> conds;
      for (std::size_t i = 0; i < axes; ++i) {
        if (i == pivot) continue;
        std::vector<double> e(shape[i] * shape[pivot]);
        for (std::size_t c = 0; c < shape[pivot]; ++c) {
          const auto col = random_simplex(shape[i], rng);
          for (std::size_t s = 0; s < shape[i]; ++s) e[s * shape[pivot] + c] = col[s];
        }
        conds.emplace(i, ConditionalMass(shape[i], shape[pivot], e));
      }
      const JointMass g = glue(q, conds, pivot, axes);
      const JointMass gq = marginal(g, {pivot});
      for (std::size_t c = 0; c < q.size(); ++c)
        if (std::abs(gq.entries()[c] - q[c]) > 1e-12) return std::string("pivot marginal drifted");
      for (const auto& [i, cm] : conds) {
        const JointMass b = marginal(g, {std::min(i, pivot), std::max(i, pivot)});
        for (std::size_t s = 0; s < shape[i]; ++s)
          for (std::size_t c = 0; c < shape[pivot]; ++c) {
            const double got = i < pivot ? b.at({s, c}) : b.at({c, s});
            if (std::abs(got - q[c] * cm(s, c)) > 1e-12)
              return std::string("bivariate marginal with the pivot drifted");
          }
      }
    }
    return std::string();
  }));

  out.push_back(run("pair_terms_triangle", [&] {
    for (std::size_t t = 0; t < hooks.samples; ++t) {
      std::vector<DiscreteDistribution> d;
      Shape shape;
      for (int i = 0; i < 3; ++i) {
        d.push_back(random_planar(2 + rng.below(3), rng));
        shape.push_back(d.back().size());
      }
      const PairwiseCost cost = PairwiseCost::euclidean(d);
      const JointMass r = random_joint(shape, rng);
      for (int ell = 1; ell <= 3; ++ell)
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 3; ++j) {
            const std::size_t k = 3 - i - j;
            if (i == j) continue;
            if (pair_term(r, cost, i, j, ell) > pair_term(r, cost, i, k, ell) + pair_term(r, cost, k, j, ell) + 1e-9)
              return "sample " + std::to_string(t) + " ell " + std::to_string(ell);
          }
    }
    return std::string();
  }));

  out.push_back(run("pairwise_mmot_is_3_metric", [&] {
    for (std::size_t t = 0; t < hooks.samples; ++t) {
      std::vector<DiscreteDistribution> d;
      for (int i = 0; i < 4; ++i) d.push_back(random_planar(2 + rng.below(2), rng));
      DistanceTensor w(3, 4);
      for (const auto& tup : combinations(4, 3))
        w.set(tup, pairwise_mmot({d[tup[0]], d[tup[1]], d[tup[2]]}, PairwiseCost::euclidean({d[tup[0]], d[tup[1]], d[tup[2]]})).value);
      const MetricReport r = check_W_tensor(w, 1.0);
      if (!r.ok()) return "sample " + std::to_string(t) + ": " + r.violations.front().property;
    }
    return std::string();
  }));

  out.push_back(run("collinear_bound_instance", [&] {
    const AppendixERatio r = appendixE_ratio(appendixE_instance(4, 3), 1);
    if (r.min_over_roles > 3.0 + 1e-6) return "empirical C " + std::to_string(r.min_over_roles) + " above 3";
    const AppendixERatio near = appendixE_ratio(appendixE_search(4, 3, 1, 1e-3), 1);
    if (std::abs(near.ratio - 3.0) > 1e-3) return std::string("search did not reach 3 within 1e-3");
    return std::string();
  }));

  return out;
}

}  // namespace mmot
