#include "mmot/graphs.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "mmot/error.hpp"

namespace mmot {

void Graph::set_edge(std::size_t u, std::size_t v, int weight) {
  if (u >= n_ || v >= n_) throw InvalidArgument("graph: node index out of range");
  if (u == v) throw InvalidArgument("graph: self-loops are not allowed");
  if (weight < 0 || weight > 2) throw InvalidArgument("graph: weight must be 0, 1 or 2");
  w_[u * n_ + v] = weight;
  w_[v * n_ + u] = weight;
}

std::size_t Graph::degree(std::size_t u) const {
  std::size_t d = 0;
  for (std::size_t v = 0; v < n_; ++v) d += has_edge(u, v) ? 1 : 0;
  return d;
}

std::size_t Graph::edge_count() const { return edges().size(); }

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = u + 1; v < n_; ++v)
      if (has_edge(u, v)) out.emplace_back(u, v);
  return out;
}

Graph Graph::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != n_) throw InvalidArgument("graph: permutation has the wrong length");
  Graph g(n_);
  for (auto [u, v] : edges()) g.set_edge(perm[u], perm[v], weight(u, v));
  return g;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t need(std::size_t value, std::size_t lowest, const char* what) {
  if (value < lowest) {
    std::ostringstream msg;
    msg << "graph spec: " << what << " must be at least " << lowest;
    throw InvalidArgument(msg.str());
  }
  return value;
}

}  // namespace

std::string family_name(const GraphSpec& spec) {
  return std::visit(overloaded{
                        [](const family::Complete&) { return "complete"; },
                        [](const family::CompleteBipartite&) { return "complete_bipartite"; },
                        [](const family::Cycle&) { return "cycle"; },
                        [](const family::Hypercube&) { return "hypercube"; },
                        [](const family::KHopLattice&) { return "khop_lattice"; },
                        [](const family::Grid2dPeriodic&) { return "grid2d_periodic"; },
                        [](const family::ErdosRenyi&) { return "erdos_renyi"; },
                    },
                    spec);
}

std::string describe(const GraphSpec& spec) {
  std::ostringstream s;
  s << family_name(spec);
  std::visit(overloaded{
                 [&](const family::Complete& f) { s << ':' << f.n; },
                 [&](const family::CompleteBipartite& f) { s << ':' << f.a << ':' << f.b; },
                 [&](const family::Cycle& f) { s << ':' << f.n; },
                 [&](const family::Hypercube& f) { s << ':' << f.dim; },
                 [&](const family::KHopLattice& f) { s << ':' << f.n << ':' << f.k; },
                 [&](const family::Grid2dPeriodic& f) { s << ':' << f.rows << ':' << f.cols; },
                 [&](const family::ErdosRenyi& f) { s << ':' << f.n << ':' << f.p; },
             },
             spec);
  return s.str();
}

GraphSpec parse_graph_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  if (parts.empty()) throw InvalidArgument("graph spec: empty");
  const std::string& name = parts[0];
  auto count = [&](std::size_t i, std::size_t fallback) -> std::size_t {
    if (i >= parts.size()) return fallback;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(parts[i], &used);
      if (used == parts[i].size()) return v;
    } catch (const std::logic_error&) {
    }
    throw InvalidArgument("graph spec: bad integer '" + parts[i] + "' in " + text);
  };
  auto real = [&](std::size_t i, double fallback) -> double {
    if (i >= parts.size()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(parts[i], &used);
      if (used == parts[i].size()) return v;
    } catch (const std::logic_error&) {
    }
    throw InvalidArgument("graph spec: bad number '" + parts[i] + "' in " + text);
  };
  GraphSpec spec;
  std::size_t arity = 0;
  if (name == "complete") {
    spec = family::Complete{count(1, 10)};
    arity = 1;
  } else if (name == "complete_bipartite") {
    spec = family::CompleteBipartite{count(1, 5), count(2, 5)};
    arity = 2;
  } else if (name == "cycle") {
    spec = family::Cycle{count(1, 12)};
    arity = 1;
  } else if (name == "hypercube") {
    spec = family::Hypercube{count(1, 3)};
    arity = 1;
  } else if (name == "khop_lattice") {
    spec = family::KHopLattice{count(1, 12), count(2, 2)};
    arity = 2;
  } else if (name == "grid2d_periodic") {
    spec = family::Grid2dPeriodic{count(1, 3), count(2, 4)};
    arity = 2;
  } else if (name == "erdos_renyi") {
    spec = family::ErdosRenyi{count(1, 10), real(2, 0.4)};
    arity = 2;
  } else {
    throw InvalidArgument("graph spec: unknown family '" + name + "'");
  }
  if (parts.size() > arity + 1) throw InvalidArgument("graph spec: too many parameters in " + text);
  return spec;
}

std::vector<GraphSpec> default_families() {
  return {family::Complete{},  family::CompleteBipartite{}, family::Cycle{},
          family::Hypercube{}, family::KHopLattice{},       family::Grid2dPeriodic{},
          family::ErdosRenyi{}};
}

Graph generate(const GraphSpec& spec, Rng& rng) {
  return std::visit(
      overloaded{
          [](const family::Complete& f) {
            Graph g(need(f.n, 2, "complete size"));
            for (std::size_t u = 0; u < f.n; ++u)
              for (std::size_t v = u + 1; v < f.n; ++v) g.set_edge(u, v, 1);
            return g;
          },
          [](const family::CompleteBipartite& f) {
            need(f.a, 1, "bipartite side");
            need(f.b, 1, "bipartite side");
            Graph g(f.a + f.b);
            for (std::size_t u = 0; u < f.a; ++u)
              for (std::size_t v = 0; v < f.b; ++v) g.set_edge(u, f.a + v, 1);
            return g;
          },
          [](const family::Cycle& f) {
            Graph g(need(f.n, 3, "cycle length"));
            for (std::size_t u = 0; u < f.n; ++u) g.set_edge(u, (u + 1) % f.n, 1);
            return g;
          },
          [](const family::Hypercube& f) {
            need(f.dim, 1, "hypercube dimension");
            if (f.dim > 10) throw InvalidArgument("graph spec: hypercube dimension above 10");
            const std::size_t n = std::size_t(1) << f.dim;
            Graph g(n);
            for (std::size_t u = 0; u < n; ++u)
              for (std::size_t b = 0; b < f.dim; ++b) {
                const std::size_t v = u ^ (std::size_t(1) << b);
                if (u < v) g.set_edge(u, v, 1);
              }
            return g;
          },
          [](const family::KHopLattice& f) {
            need(f.n, 3, "lattice size");
            need(f.k, 1, "lattice hop count");
            if (2 * f.k >= f.n) throw InvalidArgument("graph spec: lattice hop count too large");
            Graph g(f.n);
            for (std::size_t u = 0; u < f.n; ++u)
              for (std::size_t h = 1; h <= f.k; ++h) g.set_edge(u, (u + h) % f.n, 1);
            return g;
          },
          [](const family::Grid2dPeriodic& f) {
            need(f.rows, 3, "grid rows");
            need(f.cols, 3, "grid columns");
            Graph g(f.rows * f.cols);
            for (std::size_t r = 0; r < f.rows; ++r)
              for (std::size_t c = 0; c < f.cols; ++c) {
                const std::size_t u = r * f.cols + c;
                g.set_edge(u, r * f.cols + (c + 1) % f.cols, 1);
                g.set_edge(u, ((r + 1) % f.rows) * f.cols + c, 1);
              }
            return g;
          },
          [&rng](const family::ErdosRenyi& f) {
            need(f.n, 2, "Erdos-Renyi size");
            if (!(f.p >= 0.0 && f.p <= 1.0))
              throw InvalidArgument("graph spec: edge probability outside [0, 1]");
            Graph g(f.n);
            for (std::size_t u = 0; u < f.n; ++u)
              for (std::size_t v = u + 1; v < f.n; ++v)
                if (rng.bernoulli(f.p)) g.set_edge(u, v, 1);
            return g;
          },
      },
      spec);
}

Graph prune_min_degree(const Graph& g, std::size_t dmin) {
  std::vector<bool> alive(g.node_count(), true);
  std::vector<std::size_t> deg(g.node_count());
  for (std::size_t u = 0; u < g.node_count(); ++u) deg[u] = g.degree(u);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t u = 0; u < g.node_count(); ++u) {
      if (!alive[u] || deg[u] >= dmin) continue;
      alive[u] = false;
      changed = true;
      for (std::size_t v = 0; v < g.node_count(); ++v)
        if (alive[v] && g.has_edge(u, v)) --deg[v];
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t u = 0; u < g.node_count(); ++u)
    if (alive[u]) keep.push_back(u);
  if (keep.empty()) throw InvalidArgument("prune: no node has the required degree");
  Graph out(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = a + 1; b < keep.size(); ++b)
      if (g.has_edge(keep[a], keep[b])) out.set_edge(a, b, g.weight(keep[a], keep[b]));
  return out;
}

Graph perturb(const Graph& g, double p, Rng& rng, std::size_t dmin) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("perturb: p must lie in [0, 1]");
  Graph out = g;
  for (std::size_t u = 0; u < g.node_count(); ++u)
    for (std::size_t v = u + 1; v < g.node_count(); ++v)
      if (rng.bernoulli(p)) out.set_edge(u, v, g.has_edge(u, v) ? 0 : 1);
  return dmin == 0 ? out : prune_min_degree(out, dmin);
}

DenseMatrix nonbacktracking_matrix(const Graph& g) {
  const auto edges = g.edges();
  const std::size_t m = 2 * edges.size();
  std::vector<std::pair<std::size_t, std::size_t>> dir;
  dir.reserve(m);
  for (auto [u, v] : edges) {
    dir.emplace_back(u, v);
    dir.emplace_back(v, u);
  }
  // Directed edges grouped by tail.
  std::vector<std::vector<std::size_t>> out_of(g.node_count());
  for (std::size_t e = 0; e < m; ++e) out_of[dir[e].first].push_back(e);
  DenseMatrix b(m, m);
  for (std::size_t e = 0; e < m; ++e) {
    const auto [u, v] = dir[e];
    for (std::size_t f : out_of[v])
      if (dir[f].second != u) b(e, f) = 1.0;
  }
  return b;
}

ComplexSpectrum signature(const Graph& g, std::size_t top_k) {
  if (top_k == 0) throw InvalidArgument("signature: top_k must be positive");
  ComplexSpectrum w = eig_general(nonbacktracking_matrix(g));
  if (w.size() > top_k) w.resize(top_k);
  return w;
}

Graph read_graph(std::istream& in) {
  struct Row {
    std::size_t u, v;
    int w;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (rows.empty() && line == "u,v,weight") continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    auto fail = [&](const std::string& why) {
      throw ParseError("edge list: line " + std::to_string(lineno) + ": " + why);
    };
    if (f.size() != 3) fail("expected u,v,weight");
    long long vals[3];
    for (int i = 0; i < 3; ++i) {
      try {
        std::size_t used = 0;
        vals[i] = std::stoll(f[i], &used);
        if (used != f[i].size()) fail("malformed number");
      } catch (const std::logic_error&) {
        fail("malformed number");
      }
    }
    if (vals[0] < 0 || vals[1] < 0) fail("negative node index");
    if (vals[0] == vals[1]) fail("self-loop");
    if (vals[2] != 1 && vals[2] != 2) fail("weight must be 1 or 2");
    rows.push_back({std::size_t(vals[0]), std::size_t(vals[1]), int(vals[2]), lineno});
    n = std::max(n, std::size_t(std::max(vals[0], vals[1])) + 1);
  }
  if (rows.empty()) throw ParseError("edge list: no edges");
  Graph g(n);
  for (const Row& r : rows) {
    const int old = g.weight(r.u, r.v);
    if (old != 0 && old != r.w)
      throw ParseError("edge list: line " + std::to_string(r.line) +
                       ": conflicting weight for a repeated edge");
    g.set_edge(r.u, r.v, r.w);
  }
  return g;
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("edge list: cannot open " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "u,v,weight\n";
  for (auto [u, v] : g.edges()) out << u << ',' << v << ',' << g.weight(u, v) << '\n';
}

}  // namespace mmot
