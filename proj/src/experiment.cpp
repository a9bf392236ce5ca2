#include "mmot/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "mmot/constructions.hpp"
#include "mmot/error.hpp"
#include "mmot/io.hpp"

namespace mmot {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Backend b) {
  switch (b) {
    case Backend::WdPairwise: return "wd_pairwise";
    case Backend::MmotPairwise: return "mmot_pairwise";
    case Backend::MmotBarycenter: return "mmot_barycenter";
    case Backend::MmotNonmetric: return "mmot_nonmetric";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Spectral: return "spectral";
    case Method::Ttm: return "ttm";
    case Method::Nhcut: return "nhcut";
  }
  return "?";
}

const char* to_string(Sampling s) { return s == Sampling::Uniform ? "uniform" : "quad_closed"; }

Backend backend_from_string(const std::string& s) {
  for (Backend b : {Backend::WdPairwise, Backend::MmotPairwise, Backend::MmotBarycenter,
                    Backend::MmotNonmetric})
    if (s == to_string(b)) return b;
  throw InvalidArgument("unknown backend '" + s + "'");
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::Spectral, Method::Ttm, Method::Nhcut})
    if (s == to_string(m)) return m;
  throw InvalidArgument("unknown clusterer '" + s + "'");
}

Sampling sampling_from_string(const std::string& s) {
  if (s == "uniform") return Sampling::Uniform;
  if (s == "quad_closed") return Sampling::QuadClosed;
  throw InvalidArgument("unknown sampling '" + s + "'");
}

std::size_t tensor_order(Backend b) { return b == Backend::WdPairwise ? 2 : 3; }

// ---- config ----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string shortest(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T, class F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + f(v[i]);
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& expect,
                            const std::string& value) {
  throw ParseError("config key '" + key + "': expected " + expect + ", got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, "a non-negative integer", v);
  return x;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size() && !std::isnan(x)) return x;
  } catch (const std::logic_error&) {
  }
  bad_value(key, "a number", v);
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (const auto& spec : default_families()) families.push_back(describe(spec));
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = {
      "seed",          "trials",        "families",        "graphs_per_family",
      "perturb_p",     "min_degree",    "input_dir",       "top_k",
      "backends",      "ell",           "pair_budget",     "triple_budget",
      "sampling",      "clusterers",    "thresholds",      "clusters",
      "restarts",      "inject_fraction", "inject_factor", "inject_backends",
      "pricing",       "output_dir"};
  return k;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto wrap = [&](auto&& f) {
    try {
      f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError("config key '" + key + "': " + e.what());
    }
  };
  if (key == "seed") {
    seed = parse_u64(key, v);
    has_seed = true;
  } else if (key == "trials") {
    trials = parse_u64(key, v);
  } else if (key == "families") {
    auto list = split_list(v);
    wrap([&] {
      for (const auto& f : list) parse_graph_spec(f);
    });
    families = list;
  } else if (key == "graphs_per_family") {
    graphs_per_family = parse_u64(key, v);
  } else if (key == "perturb_p") {
    perturb_p = parse_real(key, v);
  } else if (key == "min_degree") {
    min_degree = parse_u64(key, v);
  } else if (key == "input_dir") {
    input_dir = v;
  } else if (key == "top_k") {
    top_k = parse_u64(key, v);
  } else if (key == "backends") {
    std::vector<Backend> b;
    wrap([&] {
      for (const auto& s : split_list(v)) b.push_back(backend_from_string(s));
    });
    backends = b;
  } else if (key == "ell") {
    const auto x = parse_u64(key, v);
    if (x == 0 || x > 16) bad_value(key, "an integer in [1, 16]", v);
    ell = static_cast<int>(x);
  } else if (key == "pair_budget") {
    pair_budget = parse_u64(key, v);
  } else if (key == "triple_budget") {
    triple_budget = parse_u64(key, v);
  } else if (key == "sampling") {
    wrap([&] { sampling = sampling_from_string(v); });
  } else if (key == "clusterers") {
    std::vector<Method> m;
    wrap([&] {
      for (const auto& s : split_list(v)) m.push_back(method_from_string(s));
    });
    clusterers = m;
  } else if (key == "thresholds") {
    std::vector<double> t;
    if (v != "deciles")
      for (const auto& s : split_list(v)) t.push_back(parse_real(key, s));
    if (v != "deciles" && t.empty()) bad_value(key, "'deciles' or a list of numbers", v);
    thresholds = t;
  } else if (key == "clusters") {
    clusters = parse_u64(key, v);
  } else if (key == "restarts") {
    restarts = parse_u64(key, v);
  } else if (key == "inject_fraction") {
    inject_fraction = parse_real(key, v);
  } else if (key == "inject_factor") {
    inject_factor = parse_real(key, v);
  } else if (key == "inject_backends") {
    std::vector<Backend> b;
    wrap([&] {
      for (const auto& s : split_list(v)) b.push_back(backend_from_string(s));
    });
    inject_backends = b;
  } else if (key == "pricing") {
    if (v == "bland")
      pricing = lp::Pricing::Bland;
    else if (v == "dantzig")
      pricing = lp::Pricing::DantzigWithBlandFallback;
    else
      bad_value(key, "'bland' or 'dantzig'", v);
  } else if (key == "output_dir") {
    output_dir = v;
  } else {
    throw ParseError("unknown config key '" + key + "'");
  }
}

std::string ExperimentConfig::get(const std::string& key) const {
  auto num = [](auto x) { return std::to_string(x); };
  if (key == "seed") return has_seed ? num(seed) : "";
  if (key == "trials") return num(trials);
  if (key == "families") return join(families, [](const std::string& s) { return s; });
  if (key == "graphs_per_family") return num(graphs_per_family);
  if (key == "perturb_p") return shortest(perturb_p);
  if (key == "min_degree") return num(min_degree);
  if (key == "input_dir") return input_dir;
  if (key == "top_k") return num(top_k);
  if (key == "backends") return join(backends, [](Backend b) { return std::string(to_string(b)); });
  if (key == "ell") return num(ell);
  if (key == "pair_budget") return num(pair_budget);
  if (key == "triple_budget") return num(triple_budget);
  if (key == "sampling") return to_string(sampling);
  if (key == "clusterers") return join(clusterers, [](Method m) { return std::string(to_string(m)); });
  if (key == "thresholds") return thresholds.empty() ? "deciles" : join(thresholds, shortest);
  if (key == "clusters") return num(clusters);
  if (key == "restarts") return num(restarts);
  if (key == "inject_fraction") return shortest(inject_fraction);
  if (key == "inject_factor") return shortest(inject_factor);
  if (key == "inject_backends")
    return join(inject_backends, [](Backend b) { return std::string(to_string(b)); });
  if (key == "pricing") return pricing == lp::Pricing::Bland ? "bland" : "dantzig";
  if (key == "output_dir") return output_dir;
  throw ParseError("unknown config key '" + key + "'");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (!seen.insert(key).second)
      throw ParseError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      c.set(key, t.substr(eq + 1));
    } catch (const ParseError& e) {
      throw ParseError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path);
  return parse(in);
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& k : keys()) {
    if (k == "seed" && !has_seed) continue;
    out += k + " = " + get(k) + "\n";
  }
  return out;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw InvalidArgument("config key '" + key + "': " + why);
  };
  if (!has_seed) fail("seed", "a master seed is required");
  if (trials == 0) fail("trials", "must be positive");
  if (input_dir.empty()) {
    if (families.size() < 2) fail("families", "need at least two families");
    if (graphs_per_family == 0) fail("graphs_per_family", "must be positive");
  }
  if (!(perturb_p >= 0.0 && perturb_p <= 1.0)) fail("perturb_p", "must lie in [0, 1]");
  if (top_k == 0) fail("top_k", "must be positive");
  if (backends.empty()) fail("backends", "list is empty");
  bool three_way = false;
  for (Backend b : backends) {
    if (tensor_order(b) == 3) three_way = true;
    if (ell != 1 && (b == Backend::MmotPairwise || b == Backend::MmotBarycenter))
      throw Unsupported(std::string("config key 'ell': backend ") + to_string(b) +
                        " is an LP only for ell = 1");
  }
  if (pair_budget == 0) fail("pair_budget", "must be positive");
  if (triple_budget == 0) fail("triple_budget", "must be positive");
  if (clusterers.empty()) fail("clusterers", "list is empty");
  if (three_way && std::none_of(clusterers.begin(), clusterers.end(),
                                [](Method m) { return m != Method::Spectral; }))
    fail("clusterers", "3-way backends need ttm or nhcut");
  if (clusters == 1) fail("clusters", "need at least 2 (or 0 for the class count)");
  if (restarts == 0) fail("restarts", "must be positive");
  if (!(inject_fraction >= 0.0 && inject_fraction < 1.0)) fail("inject_fraction", "must lie in [0, 1)");
  if (!(inject_factor > 1.0)) fail("inject_factor", "must exceed 1");
  if (output_dir.empty()) fail("output_dir", "is empty");
}

// ---- corpus ----------------------------------------------------------------

std::vector<std::size_t> Corpus::labels() const {
  std::vector<std::size_t> l;
  for (const auto& e : entries) l.push_back(e.label);
  return l;
}

std::vector<DiscreteDistribution> Corpus::signatures() const {
  std::vector<DiscreteDistribution> d;
  for (const auto& e : entries) d.push_back(e.signature);
  return d;
}

namespace {

DiscreteDistribution spectrum_distribution(const Graph& g, std::size_t top_k) {
  std::vector<Atom> atoms;
  for (const auto& z : signature(g, top_k)) atoms.push_back(Atom::planar(z.real(), z.imag()));
  return DiscreteDistribution::from_samples(atoms);
}

}  // namespace

Corpus build_corpus(const ExperimentConfig& config, std::size_t trial) {
  Corpus c;
  if (config.input_dir.empty()) {
    std::size_t u = 0;
    for (std::size_t f = 0; f < config.families.size(); ++f) {
      const GraphSpec spec = parse_graph_spec(config.families[f]);
      c.classes.push_back(config.families[f]);
      for (std::size_t g = 0; g < config.graphs_per_family; ++g, ++u) {
        CorpusEntry e;
        e.source = config.families[f];
        e.seed = derive_seed(config.seed, trial, kStreamGraphBase + u);
        e.label = f;
        Rng rng(e.seed);
        e.graph = perturb(generate(spec, rng), config.perturb_p, rng, config.min_degree);
        e.signature = spectrum_distribution(e.graph, config.top_k);
        c.entries.push_back(std::move(e));
      }
    }
    return c;
  }

  std::vector<fs::path> classes;
  for (const auto& d : fs::directory_iterator(config.input_dir))
    if (d.is_directory()) classes.push_back(d.path());
  std::sort(classes.begin(), classes.end());
  if (classes.size() < 2) throw InvalidArgument("input_dir: need at least two class directories");
  std::size_t u = 0;
  for (std::size_t label = 0; label < classes.size(); ++label) {
    c.classes.push_back(classes[label].filename().string());
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(classes[label]))
      if (f.is_regular_file() && f.path().extension() == ".csv") files.push_back(f.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InvalidArgument("input_dir: no .csv graphs in " + classes[label].string());
    for (const auto& path : files) {
      CorpusEntry e;
      e.source = path.string();
      e.seed = derive_seed(config.seed, trial, kStreamGraphBase + u++);
      e.label = label;
      Rng rng(e.seed);
      Graph g = load_graph(path.string());
      if (config.perturb_p > 0.0)
        g = perturb(g, config.perturb_p, rng, config.min_degree);
      else if (config.min_degree > 0)
        g = prune_min_degree(g, config.min_degree);
      e.graph = std::move(g);
      e.signature = spectrum_distribution(e.graph, config.top_k);
      c.entries.push_back(std::move(e));
    }
  }
  return c;
}

json manifest_json(const Corpus& corpus) {
  json graphs = json::array();
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const auto& e = corpus.entries[i];
    graphs.push_back({{"graph_id", i},
                      {"source", e.source},
                      {"seed", e.seed},
                      {"label", e.label},
                      {"nodes", e.graph.node_count()},
                      {"edges", e.graph.edge_count()},
                      {"atoms", e.signature.size()}});
  }
  return {{"classes", corpus.classes}, {"graphs", graphs}};
}

// ---- sampling ----------------------------------------------------------------

std::vector<Tuple> sample_tuples(std::size_t n, std::size_t order, std::size_t budget,
                                 Sampling sampling, Rng& rng) {
  if (order < 2 || n < order) throw InvalidArgument("sample_tuples: need n >= order >= 2");
  std::vector<Tuple> all = combinations(n, order);
  if (budget >= all.size()) return all;

  if (sampling == Sampling::Uniform || n < order + 1) {
    rng.shuffle(all);
    all.resize(budget);
    std::sort(all.begin(), all.end());
    return all;
  }

  const std::size_t g = order + 1;
  std::set<Tuple> chosen;
  auto add_group = [&](Tuple group) {
    std::sort(group.begin(), group.end());
    for (const Tuple& rel : combinations(g, order)) {
      if (chosen.size() >= budget) return;
      Tuple t;
      for (std::size_t r : rel) t.push_back(group[r]);
      chosen.insert(t);
    }
  };
  auto fill = [&](Tuple& group) {
    while (group.size() < g) {
      const std::size_t x = rng.below(n);
      if (std::find(group.begin(), group.end(), x) == group.end()) group.push_back(x);
    }
  };

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);
  for (std::size_t start = 0; start < n && chosen.size() < budget; start += g) {
    Tuple group(perm.begin() + start, perm.begin() + std::min(start + g, n));
    fill(group);
    add_group(group);
  }
  while (chosen.size() < budget) {
    Tuple group;
    fill(group);
    add_group(group);
  }
  return {chosen.begin(), chosen.end()};
}

// ---- tensors ----------------------------------------------------------------

double corpus_gamma(const std::vector<DiscreteDistribution>& dists) {
  std::vector<Atom> distinct;
  for (const auto& d : dists)
    for (const auto& a : d.atoms())
      if (std::find(distinct.begin(), distinct.end(), a) == distinct.end()) distinct.push_back(a);
  std::vector<Point2> pts;
  for (const auto& a : distinct) pts.push_back(a.as_point());
  const double g = min_positive_area(pts);
  if (!std::isfinite(g)) throw InvalidArgument("corpus_gamma: all atoms are collinear");
  return g;
}

double tuple_distance(const std::vector<DiscreteDistribution>& dists, const Tuple& tuple,
                      const AssemblyOptions& options) {
  std::vector<DiscreteDistribution> sel;
  for (std::size_t i : tuple) sel.push_back(dists.at(i));
  switch (options.backend) {
    case Backend::WdPairwise: {
      if (sel.size() != 2) throw InvalidArgument("wd_pairwise: tuples must be pairs");
      return wasserstein(sel[0], sel[1], PairwiseCost::euclidean(sel).get(0, 1), options.ell,
                         options.transport)
          .value;
    }
    case Backend::MmotPairwise:
      return pairwise_mmot(sel, PairwiseCost::euclidean(sel), options.ell, options.transport).value;
    case Backend::MmotBarycenter: {
      if (options.ell != 1) throw Unsupported("mmot_barycenter: only ell = 1");
      std::vector<Atom> omega;
      for (const auto& d : sel)
        for (const auto& a : d.atoms())
          if (std::find(omega.begin(), omega.end(), a) == omega.end()) omega.push_back(a);
      DenseMatrix base(omega.size(), omega.size(), 0.0);
      for (std::size_t a = 0; a < omega.size(); ++a)
        for (std::size_t b = 0; b < omega.size(); ++b) base(a, b) = euclidean(omega[a], omega[b]);
      return barycenter_mmot(sel, omega, base, options.transport).value;
    }
    case Backend::MmotNonmetric:
      if (sel.size() != 3) throw InvalidArgument("mmot_nonmetric: tuples must be triples");
      return mmot(sel, triangle_area_tensor(sel, options.gamma), options.ell, options.transport)
          .value;
  }
  throw InvalidArgument("tuple_distance: unknown backend");
}

namespace {

DistanceTensor fill_tensor(std::size_t n, const std::vector<Tuple>& tuples,
                           const std::vector<double>& values) {
  if (tuples.empty()) throw InvalidArgument("assemble_tensor: no tuples");
  DistanceTensor t(tuples.front().size(), n);
  for (std::size_t u = 0; u < tuples.size(); ++u) t.set(tuples[u], values[u]);
  return t;
}

}  // namespace

DistanceTensor assemble_tensor(const std::vector<DiscreteDistribution>& dists,
                               const std::vector<Tuple>& tuples, const AssemblyOptions& options) {
  std::vector<double> values(tuples.size(), 0.0);
  std::vector<std::exception_ptr> errors(tuples.size());
  const long count = static_cast<long>(tuples.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long u = 0; u < count; ++u) {
    try {
      values[u] = tuple_distance(dists, tuples[u], options);
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return fill_tensor(dists.size(), tuples, values);
}

DistanceTensor assemble_tensor_serial(const std::vector<DiscreteDistribution>& dists,
                                      const std::vector<Tuple>& tuples,
                                      const AssemblyOptions& options) {
  std::vector<double> values;
  for (const auto& t : tuples) values.push_back(tuple_distance(dists, t, options));
  return fill_tensor(dists.size(), tuples, values);
}

// ---- trials ----------------------------------------------------------------

namespace {

bool injected(const ExperimentConfig& config, Backend b) {
  return config.inject_fraction > 0.0 &&
         std::find(config.inject_backends.begin(), config.inject_backends.end(), b) !=
             config.inject_backends.end();
}

}  // namespace

TrialData compute_trial(const ExperimentConfig& config, std::size_t trial) {
  config.validate();
  TrialData data;
  data.corpus = build_corpus(config, trial);
  const auto dists = data.corpus.signatures();
  const std::size_t n = dists.size();

  bool need2 = false, need3 = false, nonmetric = false;
  for (Backend b : config.backends) {
    (tensor_order(b) == 2 ? need2 : need3) = true;
    nonmetric = nonmetric || b == Backend::MmotNonmetric;
  }
  std::vector<Tuple> pairs, triples;
  if (need2) {
    Rng rng(derive_seed(config.seed, trial, kStreamPairs));
    pairs = sample_tuples(n, 2, config.pair_budget, config.sampling, rng);
  }
  if (need3) {
    Rng rng(derive_seed(config.seed, trial, kStreamTuples));
    triples = sample_tuples(n, 3, config.triple_budget, config.sampling, rng);
  }
  if (nonmetric) data.gamma = corpus_gamma(dists);

  AssemblyOptions opts;
  opts.ell = config.ell;
  opts.gamma = data.gamma;
  opts.transport.simplex.pricing = config.pricing;
  for (Backend b : config.backends) {
    opts.backend = b;
    const bool three = tensor_order(b) == 3;
    DistanceTensor t = assemble_tensor(dists, three ? triples : pairs, opts);
    if (three && injected(config, b)) {
      InjectionOptions io;
      io.fraction = config.inject_fraction;
      io.factor = config.inject_factor;
      auto r = cmd_inject(t, io, derive_seed(config.seed, trial, kStreamInject));
      data.injections[std::string(to_string(b)) + "+inject"] = r.summary;
      data.tensors.emplace(std::string(to_string(b)) + "+inject", std::move(r.tensor));
    }
    data.tensors.emplace(to_string(b), std::move(t));
  }
  return data;
}

TrialResult cluster_trial(const ExperimentConfig& config, std::size_t trial,
                          const std::vector<std::size_t>& truth,
                          const std::map<std::string, DistanceTensor>& tensors) {
  std::set<std::size_t> classes(truth.begin(), truth.end());
  const std::size_t k = config.clusters ? config.clusters : classes.size();
  ClusterOptions copt;
  copt.seed = derive_seed(config.seed, trial, kStreamCluster);
  copt.restarts = config.restarts;
  copt.isolated = IsolatedPolicy::Regularize;

  TrialResult result;
  result.trial = trial;
  for (const auto& [name, t] : tensors) {
    if (t.size() != truth.size())
      throw InvalidArgument("tensor " + name + " has " + std::to_string(t.size()) +
                            " objects, corpus has " + std::to_string(truth.size()));
    result.empirical_C[name] = check_W_tensor(t, 1.0).empirical_C;
    const auto grid = config.thresholds.empty() ? decile_grid(t) : config.thresholds;

    std::vector<Method> methods;
    if (t.order() == 2)
      methods.push_back(Method::Spectral);
    else
      for (Method m : config.clusterers)
        if (m != Method::Spectral) methods.push_back(m);

    for (Method m : methods) {
      Clusterer run = [&, m](const DistanceTensor& x, double th) {
        if (m == Method::Spectral) return spectral_cluster(x, k, copt, th);
        const Hypergraph3 h = build_hypergraph(x, th);
        return m == Method::Ttm ? ttm(h, k, copt) : nhcut(h, k, copt);
      };
      const TuneResult tuned = tune_threshold(t, truth, run, grid);
      MethodResult mr;
      mr.error = tuned.error;
      mr.threshold = tuned.threshold;
      mr.failed_thresholds = tuned.failed;
      mr.labels = tuned.solution.labels;
      result.methods[name + "/" + to_string(m)] = std::move(mr);
    }
  }
  return result;
}

MethodSummary summarize(const std::vector<double>& errors) {
  MethodSummary s;
  s.histogram.assign(10, 0);
  if (errors.empty()) return s;
  std::vector<double> v = errors;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  s.min = v.front();
  s.max = v.back();
  double sum = 0.0;
  for (double e : v) {
    sum += e;
    ++s.histogram[std::min<std::size_t>(9, static_cast<std::size_t>(std::max(0.0, e) * 10.0))];
  }
  s.mean = sum / double(n);
  return s;
}

ExperimentReport aggregate(std::vector<TrialResult> trials) {
  std::sort(trials.begin(), trials.end(),
            [](const TrialResult& a, const TrialResult& b) { return a.trial < b.trial; });
  ExperimentReport r;
  std::map<std::string, std::vector<double>> errors;
  for (const auto& t : trials)
    for (const auto& [name, m] : t.methods) errors[name].push_back(m.error);
  for (const auto& [name, e] : errors) r.summary[name] = summarize(e);
  r.trials = std::move(trials);
  return r;
}

namespace {

json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

json report_json(const ExperimentConfig& config, const ExperimentReport& report) {
  json cfg = json::object();
  for (const auto& k : ExperimentConfig::keys()) cfg[k] = config.get(k);
  json trials = json::array();
  for (const auto& t : report.trials) {
    json methods = json::object();
    for (const auto& [name, m] : t.methods)
      methods[name] = {{"error", m.error},
                       {"threshold", number_or_null(m.threshold)},
                       {"failed_thresholds", m.failed_thresholds},
                       {"labels", m.labels}};
    json ec = json::object();
    for (const auto& [name, c] : t.empirical_C) ec[name] = number_or_null(c);
    trials.push_back({{"trial", t.trial}, {"methods", methods}, {"empirical_C", ec}});
  }
  json summary = json::object();
  for (const auto& [name, s] : report.summary)
    summary[name] = {{"median", s.median},
                     {"mean", s.mean},
                     {"min", s.min},
                     {"max", s.max},
                     {"histogram", s.histogram}};
  json out = {{"config", cfg}, {"trials", trials}, {"summary", summary}};
  if (!report.seconds.empty()) out["seconds"] = report.seconds;
  return out;
}

std::string trial_dir(const ExperimentConfig& config, std::size_t trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%03zu", trial);
  return (fs::path(config.output_dir) / buf).string();
}

namespace {

std::vector<std::string> tensor_names(const ExperimentConfig& config) {
  std::vector<std::string> names;
  for (Backend b : config.backends) {
    names.push_back(to_string(b));
    if (tensor_order(b) == 3 && injected(config, b))
      names.push_back(std::string(to_string(b)) + "+inject");
  }
  return names;
}

std::string tensor_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / ("tensor_" + name + ".csv")).string();
}

std::string file_safe(std::string s) {
  std::replace(s.begin(), s.end(), '/', '_');
  std::replace(s.begin(), s.end(), '+', '_');
  return s;
}

}  // namespace

void cmd_distances(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  fs::create_directories(config.output_dir);
  io::write_file((fs::path(config.output_dir) / "config.txt").string(), config.to_text());
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrialData data = compute_trial(config, trial);
    const std::string dir = trial_dir(config, trial);
    fs::create_directories(dir);

    json manifest = manifest_json(data.corpus);
    manifest["trial"] = trial;
    manifest["gamma"] = data.gamma > 0.0 ? json(data.gamma) : json(nullptr);
    io::write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");

    std::ostringstream sig;
    sig << "graph,re,im,mass\n";
    for (std::size_t g = 0; g < data.corpus.entries.size(); ++g) {
      const auto& d = data.corpus.entries[g].signature;
      for (std::size_t s = 0; s < d.size(); ++s)
        sig << g << ',' << io::format_double(d.atom(s).as_point().x) << ','
            << io::format_double(d.atom(s).as_point().y) << ',' << io::format_double(d.mass(s))
            << '\n';
    }
    io::write_file((fs::path(dir) / "signatures.csv").string(), sig.str());

    for (const auto& [name, t] : data.tensors) {
      std::ostringstream out;
      t.write_csv(out);
      io::write_file(tensor_path(dir, name), out.str());
    }
    if (!data.injections.empty()) {
      json inj = json::object();
      for (const auto& [name, s] : data.injections)
        inj[name] = {{"modified", s.modified},
                     {"empirical_C_before", number_or_null(s.empirical_C_before)},
                     {"empirical_C_after", number_or_null(s.empirical_C_after)}};
      io::write_file((fs::path(dir) / "injection.json").string(), inj.dump(2) + "\n");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << "trial " << trial << ": " << data.tensors.size() << " tensors, " << secs << " s\n";
  }
}

ExperimentReport cmd_cluster(const ExperimentConfig& config, std::ostream& log, bool with_timing) {
  config.validate();
  const auto names = tensor_names(config);
  std::vector<TrialResult> results;
  double seconds = 0.0;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const std::string dir = trial_dir(config, trial);
    json manifest;
    try {
      manifest = json::parse(io::read_file((fs::path(dir) / "manifest.json").string()));
    } catch (const json::exception& e) {
      throw ParseError(dir + "/manifest.json: " + e.what());
    }
    std::vector<std::size_t> truth;
    for (const auto& g : manifest.at("graphs")) truth.push_back(g.at("label").get<std::size_t>());

    std::map<std::string, DistanceTensor> tensors;
    for (const auto& name : names) {
      std::istringstream in(io::read_file(tensor_path(dir, name)));
      tensors.emplace(name, DistanceTensor::read_csv(in));
    }
    const auto t0 = std::chrono::steady_clock::now();
    TrialResult r = cluster_trial(config, trial, truth, tensors);
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& [method, m] : r.methods) {
      std::ostringstream conf;
      io::write_confusion_csv(conf, m.labels, truth);
      io::write_file((fs::path(dir) / ("confusion_" + file_safe(method) + ".csv")).string(),
                     conf.str());
      log << "trial " << trial << ' ' << method << ": error " << m.error << '\n';
    }
    results.push_back(std::move(r));
  }

  ExperimentReport report = aggregate(std::move(results));
  if (with_timing) report.seconds["cluster"] = seconds;
  io::write_file((fs::path(config.output_dir) / "report.json").string(),
                 report_json(config, report).dump(2) + "\n");
  for (const auto& [method, s] : report.summary) {
    std::ostringstream h;
    h << "# bin_lo bin_hi count\n";
    for (std::size_t b = 0; b < s.histogram.size(); ++b)
      h << shortest(b / 10.0) << ' ' << shortest((b + 1) / 10.0) << ' ' << s.histogram[b] << '\n';
    io::write_file((fs::path(config.output_dir) / ("hist_" + file_safe(method) + ".dat")).string(),
                   h.str());
  }
  return report;
}

InjectCommandResult cmd_inject(const DistanceTensor& t, const InjectionOptions& options,
                               std::uint64_t seed) {
  InjectCommandResult r{{}, t};
  r.summary.empirical_C_before = check_W_tensor(t, 1.0).empirical_C;
  if (options.fraction > 0.0) {
    Rng rng(seed);
    InjectionResult inj = inject_violations(t, options, rng);
    r.summary.modified = inj.modified.size();
    r.tensor = std::move(inj.tensor);
  }
  r.summary.empirical_C_after = check_W_tensor(r.tensor, 1.0).empirical_C;
  return r;
}

}  // namespace mmot
