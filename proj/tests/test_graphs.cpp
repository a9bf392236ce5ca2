#include <algorithm>
#include <complex>
#include <sstream>

#include "doctest.h"
#include "mmot/error.hpp"
#include "mmot/graphs.hpp"
#include "mmot/rng.hpp"

using namespace mmot;
using cd = std::complex<double>;

namespace {

Graph from_edges(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> e) {
  Graph g(n);
  for (auto [u, v] : e) g.set_edge(u, v, 1);
  return g;
}

Graph cycle(std::size_t n) {
  Rng rng(0);
  return generate(family::Cycle{n}, rng);
}

bool spectrum_close(ComplexSpectrum a, ComplexSpectrum b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-8) return false;
  return true;
}

}  // namespace

TEST_CASE("family generators") {
  Rng rng(1);
  const Graph k4 = generate(family::Complete{4}, rng);
  CHECK(k4.edge_count() == 6);
  const Graph q3 = generate(family::Hypercube{3}, rng);
  CHECK(q3.node_count() == 8);
  CHECK(q3.edge_count() == 12);
  const Graph c5 = cycle(5);
  CHECK(c5.edge_count() == 5);
  for (std::size_t u = 0; u < 5; ++u) CHECK(c5.degree(u) == 2);
  CHECK_THROWS_AS(generate(family::Cycle{2}, rng), InvalidArgument);
  const Graph kab = generate(family::CompleteBipartite{2, 3}, rng);
  CHECK(kab.edge_count() == 6);
  const Graph lat = generate(family::KHopLattice{12, 2}, rng);
  CHECK(lat.edge_count() == 24);
  const Graph grid = generate(family::Grid2dPeriodic{3, 4}, rng);
  CHECK(grid.edge_count() == 24);
  for (const auto& spec : default_families()) {
    CHECK(describe(parse_graph_spec(describe(spec))) == describe(spec));
    const Graph g = generate(spec, rng);
    for (std::size_t u = 0; u < g.node_count(); ++u) {
      CHECK_FALSE(g.has_edge(u, u));
      for (std::size_t v = 0; v < g.node_count(); ++v) CHECK(g.weight(u, v) == g.weight(v, u));
    }
  }
  CHECK(default_families().size() == 7);
  CHECK_THROWS_AS(parse_graph_spec("petersen"), InvalidArgument);
  CHECK_THROWS_AS(parse_graph_spec("cycle:x"), InvalidArgument);
}

TEST_CASE("perturbation") {
  Rng rng(2);
  const Graph c = cycle(5);
  CHECK(perturb(c, 0.0, rng, 0) == c);
  const Graph comp = perturb(c, 1.0, rng, 0);
  for (std::size_t u = 0; u < 5; ++u)
    for (std::size_t v = u + 1; v < 5; ++v) CHECK(comp.has_edge(u, v) != c.has_edge(u, v));

  Rng gen(3);
  const Graph k10 = generate(family::Complete{10}, gen);
  Rng a(77), b(77);
  const Graph pa = perturb(k10, 0.05, a, 0), pb = perturb(k10, 0.05, b, 0);
  CHECK(pa == pb);
  // Mean number of flips over seeds is close to 0.05 * 45.
  double flips = 0;
  for (int s = 0; s < 400; ++s) {
    Rng r(1000 + s);
    flips += double(45 - perturb(k10, 0.05, r, 0).edge_count());
  }
  CHECK(flips / 400 == doctest::Approx(2.25).epsilon(0.15));
  CHECK_THROWS_AS(perturb(c, 1.5, rng), InvalidArgument);
}

TEST_CASE("pruning") {
  Rng rng(4);
  const Graph k4 = generate(family::Complete{4}, rng);
  CHECK(prune_min_degree(k4, 1) == k4);
  const Graph star_iso = from_edges(5, {{0, 1}, {0, 2}, {0, 3}});
  const Graph pruned = prune_min_degree(star_iso, 1);
  CHECK(pruned.node_count() == 4);
  CHECK(pruned.edge_count() == 3);
  CHECK_THROWS_AS(prune_min_degree(from_edges(3, {{0, 1}, {1, 2}}), 2), InvalidArgument);
}

TEST_CASE("non-backtracking matrix") {
  const Graph c3 = cycle(3);
  const DenseMatrix b = nonbacktracking_matrix(c3);
  CHECK(b.rows() == 6);
  const ComplexSpectrum s = signature(c3, 16);
  REQUIRE(s.size() == 6);
  for (int k = 0; k < 3; ++k) {
    const cd root = std::polar(1.0, 2 * M_PI * k / 3);
    CHECK(std::count_if(s.begin(), s.end(), [&](cd z) { return std::abs(z - root) < 1e-6; }) == 2);
  }
  const DenseMatrix p2 = nonbacktracking_matrix(from_edges(2, {{0, 1}}));
  CHECK(p2.rows() == 2);
  CHECK(p2.frobenius_norm() == 0.0);
  for (cd z : signature(from_edges(4, {{0, 1}, {0, 2}, {0, 3}}), 16)) CHECK(std::abs(z) < 1e-4);

  // Row u->v holds deg(v) - 1 ones.
  Rng rng(5);
  const Graph g = generate(family::ErdosRenyi{9, 0.5}, rng);
  const DenseMatrix m = nonbacktracking_matrix(g);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    for (int dir = 0; dir < 2; ++dir) {
      const std::size_t head = dir == 0 ? edges[e].second : edges[e].first;
      double row = 0;
      for (std::size_t c = 0; c < m.cols(); ++c) row += m(2 * e + dir, c);
      CHECK(row == double(g.degree(head) - 1));
    }
}

TEST_CASE("signatures") {
  Rng rng(6);
  const Graph g = generate(family::ErdosRenyi{8, 0.5}, rng);
  const Graph h = g.permuted({3, 1, 7, 0, 2, 6, 5, 4});
  CHECK(spectrum_close(signature(g, 16), signature(h, 16)));
  CHECK(signature(g, 4).size() == 4);
  CHECK_FALSE(spectrum_close(signature(cycle(4), 16), signature(cycle(5), 16)));
  CHECK_THROWS_AS(signature(g, 0), InvalidArgument);
}

TEST_CASE("edge list files") {
  std::istringstream path("0,1,1\n1,2,2\n");
  const Graph g = read_graph(path);
  CHECK(g.node_count() == 3);
  CHECK(g.weight(1, 2) == 2);
  CHECK(g.weight(0, 1) == 1);
  std::istringstream header("u,v,weight\n0,1,1\n");
  CHECK(read_graph(header).edge_count() == 1);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_graph(empty), ParseError);
  std::istringstream conflict("0,1,1\n1,0,2\n");
  CHECK_THROWS_WITH_AS(read_graph(conflict), doctest::Contains("line 2"), ParseError);
  std::istringstream loop("0,0,1\n");
  CHECK_THROWS_AS(read_graph(loop), ParseError);
  std::istringstream heavy("0,1,3\n");
  CHECK_THROWS_AS(read_graph(heavy), ParseError);
  std::istringstream junk("0,1\n");
  CHECK_THROWS_AS(read_graph(junk), ParseError);
  std::ostringstream out;
  write_graph(out, g);
  std::istringstream back(out.str());
  CHECK(read_graph(back) == g);
  CHECK_THROWS_AS(load_graph("/nonexistent/graph.csv"), InvalidArgument);
}
