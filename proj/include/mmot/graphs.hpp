#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mmot/linalg.hpp"
#include "mmot/rng.hpp"

namespace mmot {

// Undirected graph with edge weights in {1, 2}; weight 0 means no edge.
class Graph {
 public:
  explicit Graph(std::size_t n = 0) : n_(n), w_(n * n, 0) {}

  std::size_t node_count() const { return n_; }
  int weight(std::size_t u, std::size_t v) const { return w_[u * n_ + v]; }
  bool has_edge(std::size_t u, std::size_t v) const { return weight(u, v) != 0; }
  void set_edge(std::size_t u, std::size_t v, int weight);
  void remove_edge(std::size_t u, std::size_t v) { set_edge(u, v, 0); }

  std::size_t degree(std::size_t u) const;
  std::size_t edge_count() const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;  // u < v, lexicographic

  // Relabels node u as perm[u].
  Graph permuted(const std::vector<std::size_t>& perm) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t n_;
  std::vector<int> w_;
};

namespace family {
struct Complete { std::size_t n = 10; };
struct CompleteBipartite { std::size_t a = 5, b = 5; };
struct Cycle { std::size_t n = 12; };
struct Hypercube { std::size_t dim = 3; };
struct KHopLattice { std::size_t n = 12, k = 2; };
struct Grid2dPeriodic { std::size_t rows = 3, cols = 4; };
struct ErdosRenyi { std::size_t n = 10; double p = 0.4; };
}  // namespace family

using GraphSpec = std::variant<family::Complete, family::CompleteBipartite, family::Cycle,
                               family::Hypercube, family::KHopLattice, family::Grid2dPeriodic,
                               family::ErdosRenyi>;

std::string family_name(const GraphSpec& spec);
// "name" (default sizes) or "name:p1[:p2]", e.g. "cycle:12", "erdos_renyi:10:0.4".
GraphSpec parse_graph_spec(const std::string& text);
std::string describe(const GraphSpec& spec);
// The seven families at their default sizes.
std::vector<GraphSpec> default_families();

Graph generate(const GraphSpec& spec, Rng& rng);

// Iteratively deletes nodes of degree below dmin; throws if nothing is left.
Graph prune_min_degree(const Graph& g, std::size_t dmin = 1);

// Flips every unordered pair independently with probability p (new edges get
// weight 1), then prunes to degree >= dmin unless dmin is 0.
Graph perturb(const Graph& g, double p, Rng& rng, std::size_t dmin = 1);

// Rows and columns indexed by directed edges: edge e = (u, v) with u < v
// yields 2e = u->v and 2e+1 = v->u. Entry (u->v, x->y) is 1 iff v = x and
// y != u.
DenseMatrix nonbacktracking_matrix(const Graph& g);

// Eigenvalues of the non-backtracking matrix, largest top_k by modulus.
ComplexSpectrum signature(const Graph& g, std::size_t top_k);

// Edge list `u,v,weight` with an optional header row.
Graph read_graph(std::istream& in);
Graph load_graph(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);

}  // namespace mmot
