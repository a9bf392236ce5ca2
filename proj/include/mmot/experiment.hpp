#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmot/clustering.hpp"
#include "mmot/graphs.hpp"
#include "mmot/metric_props.hpp"
#include "mmot/transport.hpp"

namespace mmot {

enum class Backend { WdPairwise, MmotPairwise, MmotBarycenter, MmotNonmetric };
enum class Method { Spectral, Ttm, Nhcut };
enum class Sampling { Uniform, QuadClosed };

const char* to_string(Backend b);
const char* to_string(Method m);
const char* to_string(Sampling s);
Backend backend_from_string(const std::string& s);
Method method_from_string(const std::string& s);
Sampling sampling_from_string(const std::string& s);
// 2 for wd_pairwise, 3 otherwise.
std::size_t tensor_order(Backend b);

// Flat `key = value` settings. Lines starting with '#' are comments. Every
// key has a default except seed.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::size_t trials = 20;
  std::vector<std::string> families;  // graph specs, see parse_graph_spec
  std::size_t graphs_per_family = 5;
  double perturb_p = 0.05;
  std::size_t min_degree = 1;
  // Directory of class subdirectories holding edge-list CSVs; replaces the
  // synthetic families when set.
  std::string input_dir;
  std::size_t top_k = 16;
  std::vector<Backend> backends = {Backend::MmotPairwise};
  int ell = 1;
  std::size_t pair_budget = 150;
  std::size_t triple_budget = 100;
  Sampling sampling = Sampling::QuadClosed;
  std::vector<Method> clusterers = {Method::Ttm, Method::Nhcut};
  std::vector<double> thresholds;  // empty: deciles of the sampled values, then +inf
  std::size_t clusters = 0;        // 0: number of classes in the corpus
  std::size_t restarts = 10;
  double inject_fraction = 0.0;    // > 0 adds injected copies, see inject_backends
  double inject_factor = 1.3;
  // Backends whose tensors get an injected copy; n-metric ones by default.
  std::vector<Backend> inject_backends = {Backend::MmotPairwise, Backend::MmotBarycenter};
  lp::Pricing pricing = lp::Pricing::DantzigWithBlandFallback;
  std::string output_dir = "out";

  ExperimentConfig();

  // Throws ParseError naming the key for unknown keys and bad values.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);
  // Every key in keys() order; parse(to_text()) reproduces the config.
  std::string to_text() const;

  // Cross-field checks; throws InvalidArgument or Unsupported.
  void validate() const;
};

struct CorpusEntry {
  std::string source;  // graph spec or file path
  std::uint64_t seed = 0;
  std::size_t label = 0;
  Graph graph;
  DiscreteDistribution signature = DiscreteDistribution::point_mass(Atom::planar(0, 0));
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::vector<std::string> classes;

  std::vector<std::size_t> labels() const;
  std::vector<DiscreteDistribution> signatures() const;
};

// Seed streams under derive_seed(master, trial, stream).
inline constexpr std::uint64_t kStreamTuples = 1;
inline constexpr std::uint64_t kStreamPairs = 2;
inline constexpr std::uint64_t kStreamInject = 3;
inline constexpr std::uint64_t kStreamCluster = 4;
inline constexpr std::uint64_t kStreamGraphBase = 1000;  // + graph index

Corpus build_corpus(const ExperimentConfig& config, std::size_t trial);
nlohmann::json manifest_json(const Corpus& corpus);

// `budget` distinct increasing tuples of the given order, sorted. Uniform
// draws without replacement. QuadClosed adds every sub-tuple of random
// (order+1)-subsets, starting with a pass that covers every object once, so
// the injection step finds fully sampled subsets to work on.
std::vector<Tuple> sample_tuples(std::size_t n, std::size_t order, std::size_t budget,
                                 Sampling sampling, Rng& rng);

// Smallest positive triangle area among the distinct atoms of all inputs.
double corpus_gamma(const std::vector<DiscreteDistribution>& dists);

struct AssemblyOptions {
  Backend backend = Backend::MmotPairwise;
  int ell = 1;
  double gamma = 0.0;  // mmot_nonmetric only
  TransportOptions transport;
};

double tuple_distance(const std::vector<DiscreteDistribution>& dists, const Tuple& tuple,
                      const AssemblyOptions& options);
// Solves every tuple, OpenMP-parallel over tuples.
DistanceTensor assemble_tensor(const std::vector<DiscreteDistribution>& dists,
                               const std::vector<Tuple>& tuples, const AssemblyOptions& options);
DistanceTensor assemble_tensor_serial(const std::vector<DiscreteDistribution>& dists,
                                      const std::vector<Tuple>& tuples,
                                      const AssemblyOptions& options);

struct InjectionSummary {
  std::size_t modified = 0;
  double empirical_C_before = 0.0;
  double empirical_C_after = 0.0;
};

struct TrialData {
  Corpus corpus;
  double gamma = 0.0;
  std::map<std::string, DistanceTensor> tensors;  // by tensor name
  std::map<std::string, InjectionSummary> injections;
};

// Tensor names are backend names, with "+inject" for injected copies.
TrialData compute_trial(const ExperimentConfig& config, std::size_t trial);

struct MethodResult {
  double error = 1.0;
  double threshold = 0.0;
  std::size_t failed_thresholds = 0;
  std::vector<std::size_t> labels;
};

struct TrialResult {
  std::size_t trial = 0;
  std::map<std::string, MethodResult> methods;  // "<tensor>/<clusterer>"
  std::map<std::string, double> empirical_C;    // per tensor; NaN if unaudited
};

TrialResult cluster_trial(const ExperimentConfig& config, std::size_t trial,
                          const std::vector<std::size_t>& truth,
                          const std::map<std::string, DistanceTensor>& tensors);

struct MethodSummary {
  double median = 0.0, mean = 0.0, min = 0.0, max = 0.0;
  std::vector<std::size_t> histogram;  // 10 equal bins over [0, 1]
};

struct ExperimentReport {
  std::vector<TrialResult> trials;
  std::map<std::string, MethodSummary> summary;
  std::map<std::string, double> seconds;  // filled only on request
};

MethodSummary summarize(const std::vector<double>& errors);
ExperimentReport aggregate(std::vector<TrialResult> trials);
nlohmann::json report_json(const ExperimentConfig& config, const ExperimentReport& report);

std::string trial_dir(const ExperimentConfig& config, std::size_t trial);

// Writes <output_dir>/config.txt and one trial_NNN directory per trial with
// manifest.json, signatures.csv, tensor_<name>.csv and injection.json.
void cmd_distances(const ExperimentConfig& config, std::ostream& log);
// Reads the tensors back, clusters them and writes report.json, hist_*.dat
// and per-trial confusion matrices. Timing goes into the report only when
// asked, since it would break byte-identical reruns.
ExperimentReport cmd_cluster(const ExperimentConfig& config, std::ostream& log,
                             bool with_timing = false);

struct InjectCommandResult {
  InjectionSummary summary;
  DistanceTensor tensor;
};
InjectCommandResult cmd_inject(const DistanceTensor& t, const InjectionOptions& options,
                               std::uint64_t seed);

}  // namespace mmot
