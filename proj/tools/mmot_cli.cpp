// Command-line front end: experiments, audits and small reproductions.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "mmot/constructions.hpp"
#include "mmot/error.hpp"
#include "mmot/experiment.hpp"
#include "mmot/graphs.hpp"
#include "mmot/hash.hpp"
#include "mmot/io.hpp"
#include "mmot/verify.hpp"

using namespace mmot;
using nlohmann::json;

namespace {

// Options shared by the experiment commands: a config file, the master seed
// and one flag per config key.
struct ExperimentFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "master seed")->required();
    for (const auto& key : ExperimentConfig::keys()) {
      if (key == "seed") continue;
      app->add_option("--" + key, overrides[key], "config key " + key);
    }
  }

  ExperimentConfig build() const {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig() : ExperimentConfig::load(config_path);
    for (const auto& [key, value] : overrides)
      if (!value.empty()) c.set(key, value);
    c.set("seed", std::to_string(seed));
    c.validate();
    return c;
  }
};

std::string fmt(double v) { return io::format_double(v); }

int cmd_verify_main(bool mutate_h_prime, double gamma) {
  VerifyHooks hooks;
  if (mutate_h_prime)
    hooks.h_prime = [](std::size_t i, std::size_t r, std::size_t n) {
      return hash::h_prime(i, r, n) % n + 1;  // shifted by one
    };
  hooks.gamma = gamma;
  bool ok = true;
  for (const auto& c : run_verify(hooks)) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-marginal optimal transport distances and graph clustering"};
  app.require_subcommand(1);

  ExperimentFlags dist_flags, cluster_flags;
  auto* distances = app.add_subcommand("distances", "compute distance tensors for every trial");
  dist_flags.attach(distances);

  bool timing = false;
  auto* cluster = app.add_subcommand("cluster", "cluster stored tensors and write report.json");
  cluster_flags.attach(cluster);
  cluster->add_flag("--timing", timing, "add wall-clock seconds to the report");

  std::string in_path, out_path, report_path;
  double fraction = 0.2, factor = 1.3;
  std::uint64_t inject_seed = 0;
  bool count_all = false;
  auto* inject = app.add_subcommand("inject", "inject generalized triangle violations");
  inject->add_option("--in", in_path, "tensor CSV")->required()->check(CLI::ExistingFile);
  inject->add_option("--out", out_path, "output tensor CSV")->required();
  inject->add_option("--fraction", fraction, "fraction of entries to modify");
  inject->add_option("--factor", factor, "increase as a multiple of the needed change");
  inject->add_option("--seed", inject_seed, "seed")->required();
  inject->add_flag("--count-all", count_all, "base the count on all entries, not sampled ones");
  inject->add_option("--report", report_path, "write the JSON summary here too");

  bool mutate = false;
  double gamma = -1.0;
  auto* verify = app.add_subcommand("verify", "run the reproduction checks");
  verify->add_flag("--mutate-h-prime", mutate, "use an off-by-one h' (should fail)");
  verify->add_option("--gamma", gamma, "triangle-area gamma (negative: eps/4)");

  std::size_t hash_n = 0;
  bool per_r = false;
  auto* hash_cmd = app.add_subcommand("hash", "index hash utilities");
  hash_cmd->require_subcommand(1);
  auto* audit = hash_cmd->add_subcommand("audit", "audit H^n and H'^n");
  audit->add_option("--n", hash_n, "n")->required()->check(CLI::Range(2, 60));
  audit->add_flag("--per-r", per_r, "count H' multiplicities per r instead of pooled");

  double epsilon = 0.01, t2_gamma = -1.0;
  auto* cons = app.add_subcommand("constructions", "explicit constructions");
  cons->require_subcommand(1);
  auto* t2 = cons->add_subcommand("theorem2", "four-distribution planar instance");
  t2->add_option("--epsilon", epsilon, "epsilon")->required();
  t2->add_option("--gamma", t2_gamma, "gamma (negative: eps/4)");

  std::string family = "cycle";
  std::uint64_t graph_seed = 0;
  double perturb_p = 0.0;
  std::size_t min_degree = 1, top_k = 0;
  std::string graph_out;
  auto* graphs_cmd = app.add_subcommand("graphs", "graph utilities");
  graphs_cmd->require_subcommand(1);
  auto* gen = graphs_cmd->add_subcommand("gen", "generate one graph as an edge list");
  gen->add_option("--family", family, "family spec, e.g. cycle:12 or erdos_renyi:10:0.4");
  gen->add_option("--seed", graph_seed, "seed")->required();
  gen->add_option("--perturb", perturb_p, "edge flip probability");
  gen->add_option("--min-degree", min_degree, "prune to this degree after perturbing");
  gen->add_option("--out", graph_out, "edge list path (default stdout)");
  gen->add_option("--signature", top_k, "also print the top-k non-backtracking eigenvalues");

  CLI11_PARSE(app, argc, argv);

  try {
    if (distances->parsed()) {
      cmd_distances(dist_flags.build(), std::cerr);
      return 0;
    }
    if (cluster->parsed()) {
      const auto report = cmd_cluster(cluster_flags.build(), std::cerr, timing);
      for (const auto& [name, s] : report.summary)
        std::cout << name << ": median " << fmt(s.median) << " mean " << fmt(s.mean) << '\n';
      return 0;
    }
    if (inject->parsed()) {
      std::ifstream in(in_path);
      const DistanceTensor t = DistanceTensor::read_csv(in);
      InjectionOptions opts;
      opts.fraction = fraction;
      opts.factor = factor;
      opts.count_all_entries = count_all;
      const auto r = cmd_inject(t, opts, inject_seed);
      std::ostringstream out;
      r.tensor.write_csv(out);
      io::write_file(out_path, out.str());
      auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
      const json j = {{"modified", r.summary.modified},
                      {"empirical_C_before", num(r.summary.empirical_C_before)},
                      {"empirical_C_after", num(r.summary.empirical_C_after)}};
      if (!report_path.empty()) io::write_file(report_path, j.dump(2) + "\n");
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (verify->parsed()) return cmd_verify_main(mutate, gamma);
    if (audit->parsed()) {
      const auto h = hash::audit_H(hash_n);
      hash::PrimeAuditOptions opts;
      opts.pool_over_r = !per_r;
      const auto hp = hash::audit_H_prime(hash_n, opts);
      for (const auto* a : {&h, &hp}) {
        std::cout << (a == &h ? "H" : "H'") << " n=" << a->n << " listed=" << a->listed
                  << " distinct=" << a->counts.size() << " max_multiplicity=" << a->max_multiplicity
                  << (a->passed ? " PASS" : " FAIL") << '\n';
        std::cout << "  multiplicity histogram:";
        for (const auto& [m, c] : a->histogram) std::cout << ' ' << m << ':' << c;
        std::cout << '\n';
        for (const auto& f : a->failures) std::cout << "  " << f << '\n';
      }
      return h.passed && hp.passed ? 0 : 1;
    }
    if (t2->parsed()) {
      const PlanarInstance inst = theorem2_instance(epsilon, t2_gamma);
      const Theorem2Values v = theorem2_values(inst);
      const json j = {{"epsilon", epsilon},
                      {"gamma", inst.gamma},
                      {"W123", v.w123},
                      {"W124", v.w124},
                      {"W134", v.w134},
                      {"W234", v.w234},
                      {"margin", v.margin},
                      {"violated", v.margin > 0.0}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (gen->parsed()) {
      Rng rng(graph_seed);
      Graph g = generate(parse_graph_spec(family), rng);
      if (perturb_p > 0.0) g = perturb(g, perturb_p, rng, min_degree);
      std::ostringstream out;
      write_graph(out, g);
      if (graph_out.empty())
        std::cout << out.str();
      else
        io::write_file(graph_out, out.str());
      if (top_k > 0)
        for (const auto& z : signature(g, top_k))
          std::cerr << fmt(z.real()) << (z.imag() < 0 ? " - " : " + ") << fmt(std::abs(z.imag())) << "i\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
