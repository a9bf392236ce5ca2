// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criterion 9 runs the desk-scale clustering config and takes about
// a minute.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "mmot/constructions.hpp"
#include "mmot/experiment.hpp"
#include "mmot/hash.hpp"
#include "mmot/io.hpp"
#include "mmot/lp.hpp"
#include "mmot/metric_props.hpp"
#include "mmot/rng.hpp"
#include "mmot/transport.hpp"
#include "oracles.hpp"

#ifndef MMOT_SOURCE_DIR
#define MMOT_SOURCE_DIR "."
#endif

using namespace mmot;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

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

double W(const std::vector<DiscreteDistribution>& d) { return pairwise_mmot(d, PairwiseCost::euclidean(d)).value; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mmot_accept_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_file(e.path().string());
  return files;
}

// Some leave-one-out role of the 4-subset q breaks C = 1.
bool violates(const DistanceTensor& t, const Tuple& q) {
  double sum = 0;
  std::vector<double> v;
  for (std::size_t r = 0; r < 4; ++r) {
    Tuple base;
    for (std::size_t s = 0; s < 4; ++s)
      if (s != r) base.push_back(q[s]);
    v.push_back(t.value(base));
    sum += v.back();
  }
  for (double x : v)
    if (x > sum - x + 1e-12) return true;
  return false;
}

// Returns an empty string on success, otherwise the reason.
using Criterion = std::function<std::string(std::ostringstream& info)>;

std::string c1(std::ostringstream& info) {
  const auto t0 = Clock::now();
  const Theorem2Values v = theorem2_values(theorem2_instance(0.01));
  const double s = since(t0);
  info << "W123=" << v.w123 << " W124=" << v.w124 << " W134=" << v.w134 << " W234=" << v.w234
       << " margin=" << v.margin << " " << s << "s";
  if (std::abs(v.w123 - 0.5) > 1e-8 || std::abs(v.w124 - 0.125) > 1e-8 || std::abs(v.w134 - 0.1275) > 1e-8 ||
      std::abs(v.w234 - 0.1275) > 1e-8)
    return "value mismatch";
  if (!(v.w123 > v.w124 + v.w134 + v.w234)) return "no strict violation";
  if (s >= 1.0) return "too slow";
  return "";
}

std::string c2(std::ostringstream& info) {
  const auto t0 = Clock::now();
  std::vector<double> a{1, 0, 1, 0, 1, 0, 0, 0, 0};
  for (double& x : a) x /= 3;
  const JointMass p12({3, 3}, a), p23({3, 3}, std::vector<double>(9, 1.0 / 9));
  if (no_gluing_check(p12, p12, p23).feasible) return "counterexample reported feasible";
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Shape s{2 + rng.below(3), 2 + rng.below(3), 2 + rng.below(3)};
    const JointMass r(s, simplex(shape_size(s), rng));
    const GluingCheck g = no_gluing_check(marginal(r, {0, 1}), marginal(r, {0, 2}), marginal(r, {1, 2}));
    if (!g.feasible || !g.witness) return "random joint reported infeasible";
    const std::vector<std::vector<std::size_t>> pairs{{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pr : pairs) {
      const JointMass w = marginal(*g.witness, pr), m = marginal(r, pr);
      for (std::size_t i = 0; i < w.size(); ++i)
        if (std::abs(w.entries()[i] - m.entries()[i]) > 1e-8) return "witness marginals off";
    }
  }
  const double s = since(t0);
  info << "counterexample infeasible, 20 random joints feasible, " << s << "s";
  return s < 1.0 ? "" : "too slow";
}

std::string c3(std::ostringstream& info) {
  const auto t0 = Clock::now();
  std::size_t worst = 0;
  for (std::size_t n = 2; n <= 40; ++n) {
    const auto a = hash::audit_H(n);
    if (!a.passed) return "audit_H failed at n=" + std::to_string(n) + ": " + a.failures.front();
    const auto b = hash::audit_H_prime(n);
    worst = std::max(worst, b.max_multiplicity);
    if (b.max_multiplicity > 5) return "H' multiplicity above 5 at n=" + std::to_string(n);
  }
  const std::size_t m4 = hash::audit_H_prime(4).multiplicity(hash::Triple{2, 3, 1});
  const double s = since(t0);
  info << "max H' multiplicity " << worst << ", (2,3,1) at n=4 listed " << m4 << " times, " << s << "s";
  if (m4 != 5) return "(2,3,1) multiplicity is not 5";
  return s < 30.0 ? "" : "too slow";
}

std::string c4(std::ostringstream& info) {
  Rng rng(4004);
  std::size_t checks = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<DiscreteDistribution> d;
    for (int i = 0; i < 4; ++i) d.push_back(random_planar(2 + rng.below(3), rng));
    const double w012 = W({d[0], d[1], d[2]});
    if (w012 < 0) return "negative value";
    for (const auto& perm : std::vector<std::array<int, 3>>{{0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}})
      if (std::abs(W({d[perm[0]], d[perm[1]], d[perm[2]]}) - w012) > 1e-8) return "not symmetric";
    if (std::abs(W({d[0], d[0], d[0]})) > 1e-8) return "identical inputs give nonzero value";
    if (w012 <= 1e-8) return "distinct inputs give zero value";
    const double w013 = W({d[0], d[1], d[3]}), w023 = W({d[0], d[2], d[3]}), w123 = W({d[1], d[2], d[3]});
    const double vals[4] = {w012, w013, w023, w123};
    const double sum = w012 + w013 + w023 + w123;
    for (double v : vals)
      if (v > sum - v + 1e-8) return "generalized triangle inequality fails";
    checks += 9;
  }
  info << "200 instances, " << checks << " solves";
  return "";
}

std::string c5(std::ostringstream& info) {
  const AppendixERatio r = appendixE_ratio(appendixE_instance(4, 3), 1);
  const AppendixEInstance found = appendixE_search(4, 3, 1, 1e-3);
  const AppendixERatio near = appendixE_ratio(found, 1);
  info << "empirical C " << r.min_over_roles << ", searched spacing delta " << found.delta << " gives "
       << near.min_over_roles;
  if (r.min_over_roles > 3.0 + 1e-6) return "empirical C above 3";
  return std::abs(near.min_over_roles - 3.0) <= 1e-3 ? "" : "no configuration within 1e-3 of 3";
}

std::string c6(std::ostringstream& info) {
  Rng rng(99);
  std::size_t lps = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t cols = 2 + rng.below(7), rows = 1 + rng.below(std::min<std::size_t>(cols, 4));
    lp::LpProblem p(rows, cols);
    std::vector<double> x0(cols);
    double s = 0;
    for (auto& x : x0) s += x = rng.bernoulli(0.6) ? rng.uniform01() : 0.0;
    if (s == 0) x0[0] = s = 1;
    for (auto& x : x0) x /= s;
    for (std::size_t j = 0; j < cols; ++j) p.a(0, j) = 1;
    for (std::size_t r = 1; r < rows; ++r)
      for (std::size_t j = 0; j < cols; ++j) p.a(r, j) = rng.uniform(-1, 1);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < cols; ++j) p.rhs[r] += p.a(r, j) * x0[j];
    for (auto& c : p.objective) c = rng.uniform(-1, 1);
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows), c(cols);
    for (std::size_t r = 0; r < rows; ++r) {
      b(r) = p.rhs[r];
      for (std::size_t j = 0; j < cols; ++j) A(r, j) = p.a(r, j);
    }
    for (std::size_t j = 0; j < cols; ++j) c(j) = p.objective[j];
    const auto expect = oracle::bfs_min(A, b, c);
    if (!expect) return "oracle found no basic solution";
    for (auto pr : {lp::Pricing::Bland, lp::Pricing::DantzigWithBlandFallback}) {
      lp::SimplexOptions o;
      o.pricing = pr;
      const lp::LpSolution sol = lp::solve(p, o);
      if (sol.status != lp::Status::Optimal || std::abs(sol.value - *expect) > 1e-8)
        return "LP " + std::to_string(t) + " disagrees with enumeration";
      ++lps;
    }
  }
  Rng r1(2718);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m1 = 1 + r1.below(6), m2 = 1 + r1.below(6);
    std::vector<Atom> a1, a2;
    std::vector<std::pair<double, double>> o1, o2;
    const auto w1 = simplex(m1, r1), w2 = simplex(m2, r1);
    for (std::size_t s = 0; s < m1; ++s) {
      const double x = r1.uniform(-3, 3);
      a1.push_back(Atom::scalar(x));
      o1.push_back({x, w1[s]});
    }
    for (std::size_t s = 0; s < m2; ++s) {
      const double x = r1.uniform(-3, 3);
      a2.push_back(Atom::scalar(x));
      o2.push_back({x, w2[s]});
    }
    const DiscreteDistribution p(a1, w1), q(a2, w2);
    const double v = wasserstein(p, q, PairwiseCost::euclidean({p, q}).get(0, 1), 1).value;
    if (std::abs(v - oracle::w1_line(o1, o2)) > 1e-9) return "1D instance " + std::to_string(t) + " off";
  }
  info << lps << " LP solves matched enumeration, 50 line instances matched";
  return "";
}

std::string c7(std::ostringstream& info) {
  Rng rng(7007);
  for (int t = 0; t < 100; ++t) {
    const std::size_t axes = 2 + rng.below(3), pivot = rng.below(axes);
    Shape shape(axes);
    for (auto& m : shape) m = 1 + rng.below(4);
    const auto q = simplex(shape[pivot], rng);
    std::map<std::size_t, ConditionalMass> conds;
    for (std::size_t i = 0; i < axes; ++i) {
      if (i == pivot) continue;
      std::vector<double> e(shape[i] * shape[pivot]);
      for (std::size_t c = 0; c < shape[pivot]; ++c) {
        const auto col = simplex(shape[i], rng);
        for (std::size_t s = 0; s < shape[i]; ++s) e[s * shape[pivot] + c] = col[s];
      }
      conds.emplace(i, ConditionalMass(shape[i], shape[pivot], e));
    }
    const JointMass g = glue(q, conds, pivot, axes);
    for (const auto& [i, cm] : conds) {
      const JointMass uni = marginal(g, {i});
      const JointMass bi = marginal(g, {std::min(i, pivot), std::max(i, pivot)});
      for (std::size_t s = 0; s < shape[i]; ++s) {
        double expect = 0;
        for (std::size_t k = 0; k < shape[pivot]; ++k) {
          expect += q[k] * cm(s, k);
          const double got = i < pivot ? bi.at({s, k}) : bi.at({k, s});
          if (std::abs(got - q[k] * cm(s, k)) > 1e-12) return "glue bivariate marginal off";
        }
        if (std::abs(uni.at({s}) - expect) > 1e-12) return "glue univariate marginal off";
      }
    }
  }
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
          if (pair_term(r, cost, i, j, ell) > pair_term(r, cost, i, k, ell) + pair_term(r, cost, k, j, ell) + 1e-9)
            return "pair-term triangle inequality fails";
        }
  }
  info << "100 glue constructions, 100 joint masses x 3 exponents";
  return "";
}

std::string c8(std::ostringstream& info) {
  Rng data(808);
  std::vector<DiscreteDistribution> d;
  for (int i = 0; i < 10; ++i) d.push_back(random_planar(2 + data.below(2), data));
  DistanceTensor t(3, 10);
  for (const auto& q : combinations(10, 3)) t.set(q, W({d[q[0]], d[q[1]], d[q[2]]}));
  const double before = check_W_tensor(t, 1.0).empirical_C;
  Rng rng(derive_seed(808, 0, kStreamInject));
  const InjectionResult r = inject_violations(t, {0.20, 1.3, false}, rng);
  const std::size_t expect = std::size_t(std::ceil(0.20 * double(t.sampled_count())));
  std::size_t changed = 0;
  for (const auto& k : t.keys()) changed += t.value(k) != r.tensor.value(k);
  const MetricReport after = check_W_tensor(r.tensor, 1.0);
  std::size_t targeted_ok = 0;
  for (const Tuple& q : r.targeted) targeted_ok += violates(r.tensor, q);
  info << changed << " of " << t.sampled_count() << " entries changed (expected " << expect << "), "
       << targeted_ok << "/" << r.targeted.size() << " targeted subsets violate, empirical C " << before << " -> "
       << after.empirical_C;
  if (changed != expect) return "wrong number of modified entries";
  if (targeted_ok != r.targeted.size()) return "a targeted subset does not violate";
  return after.empirical_C < 1.0 ? "" : "empirical C did not drop below 1";
}

double median_of(const ExperimentReport& r, const std::string& key) {
  const auto it = r.summary.find(key);
  return it == r.summary.end() ? std::nan("") : it->second.median;
}

std::string c9(std::ostringstream& info) {
  const auto t0 = Clock::now();
  ExperimentConfig c = ExperimentConfig::load(std::string(MMOT_SOURCE_DIR) + "/tools/desk_clustering.conf");
  c.set("seed", "2024");
  const fs::path out = scratch("desk");
  c.output_dir = out.string();
  c.validate();
  if (c.families.size() != 7 || c.graphs_per_family != 5 || c.triple_budget != 60 || c.trials != 20)
    return "desk config does not match 7 x 5 graphs, 60 triples, 20 trials";
  std::ostringstream log;
  cmd_distances(c, log);
  const ExperimentReport r = cmd_cluster(c, log);
  fs::remove_all(out);
  const double s = since(t0);
  std::string fail;
  for (const char* m : {"ttm", "nhcut"}) {
    const double clean = median_of(r, std::string("mmot_pairwise/") + m);
    const double nonmetric = median_of(r, std::string("mmot_nonmetric/") + m);
    const double injected = median_of(r, std::string("mmot_pairwise+inject/") + m);
    info << m << ": pairwise " << clean << ", nonmetric " << nonmetric << ", injected " << injected << "; ";
    if (!(clean < 0.857)) fail += std::string("(a) ") + m + " ";
    if (!(clean <= nonmetric)) fail += std::string("(b) ") + m + " ";
    if (!(injected >= clean)) fail += std::string("(c) ") + m + " ";
  }
  info << s << "s";
  if (s >= 15 * 60) fail += "runtime ";
  return fail;
}

std::string c10(std::ostringstream& info) {
  std::istringstream text(
      "seed = 77\ntrials = 2\nfamilies = cycle:8,complete_bipartite:3:4,erdos_renyi:8:0.4\n"
      "graphs_per_family = 3\ntop_k = 8\nbackends = wd_pairwise,mmot_pairwise,mmot_barycenter,mmot_nonmetric\n"
      "pair_budget = 20\ntriple_budget = 40\nclusterers = spectral,ttm,nhcut\nrestarts = 3\ninject_fraction = 0.2\n");
  ExperimentConfig c = ExperimentConfig::parse(text);
  const fs::path run = scratch("det"), first = scratch("det_first");
  c.output_dir = run.string();
  c.validate();
  for (int i = 0; i < 2; ++i) {
    std::ostringstream log;
    cmd_distances(c, log);
    cmd_cluster(c, log);
    if (i == 0) fs::rename(run, first);
  }
  const auto a = snapshot(first), b = snapshot(run);
  fs::remove_all(run);
  fs::remove_all(first);
  std::size_t same = 0;
  for (const auto& [k, v] : a) same += b.count(k) && b.at(k) == v;
  info << same << "/" << a.size() << " files identical across reruns";
  return same == a.size() && a.size() == b.size() ? "" : "outputs differ";
}

}  // namespace

int main() {
  const std::vector<std::pair<int, Criterion>> all{{1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5},
                                                   {6, c6}, {7, c7}, {8, c8}, {9, c9}, {10, c10}};
  int failed = 0;
  for (const auto& [id, run] : all) {
    std::ostringstream info;
    std::string why;
    try {
      why = run(info);
    } catch (const std::exception& e) {
      why = std::string("raised: ") + e.what();
    }
    std::printf("criterion %2d: %s  %s%s%s\n", id, why.empty() ? "PASS" : "FAIL", info.str().c_str(),
                why.empty() ? "" : "  reason: ", why.c_str());
    std::fflush(stdout);
    failed += !why.empty();
  }
  return failed == 0 ? 0 : 1;
}
