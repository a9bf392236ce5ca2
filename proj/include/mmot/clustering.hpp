#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "mmot/metric_props.hpp"
#include "mmot/rng.hpp"

namespace mmot {

struct Hyperedge {
  std::size_t i = 0, j = 0, k = 0;  // i < j < k
  double weight = 0.0;
};

struct Hypergraph3 {
  std::size_t n = 0;
  std::vector<Hyperedge> edges;
};

struct ClusteringSolution {
  std::vector<std::size_t> labels;
  std::size_t k = 0;
};

// Sampled triples with value <= threshold become hyperedges weighted by the
// distance. Throws if none survive.
Hypergraph3 build_hypergraph(const DistanceTensor& t,
                             double threshold = std::numeric_limits<double>::infinity());

enum class IsolatedPolicy {
  Error,       // a vertex without affinity raises InvalidArgument naming it
  Regularize,  // such vertices get a zero row in the normalized operator
};

struct ClusterOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  IsolatedPolicy isolated = IsolatedPolicy::Error;
};

// exp(-w / sigma) with sigma the median weight (mean, then 1, if that is not
// positive).
std::vector<double> affinities(const std::vector<double>& weights);

// Contracts the 3-way affinity tensor to A_ij = sum_k a_ijk and runs
// normalized spectral clustering on I - D^-1/2 A D^-1/2.
ClusteringSolution ttm(const Hypergraph3& h, std::size_t k, const ClusterOptions& options = {});

// Hypergraph normalized Laplacian I - Dv^-1/2 H W De^-1 H^T Dv^-1/2.
ClusteringSolution nhcut(const Hypergraph3& h, std::size_t k, const ClusterOptions& options = {});

// Random-walk Laplacian clustering of an order-2 tensor; unsampled pairs and
// pairs above `threshold` carry zero affinity.
ClusteringSolution spectral_cluster(const DistanceTensor& d, std::size_t k,
                                    const ClusterOptions& options = {},
                                    double threshold = std::numeric_limits<double>::infinity());

struct KMeansResult {
  std::vector<std::size_t> labels;
  double inertia = 0.0;
};

// Lloyd iterations from k-means++ seeds; the best of `restarts` by inertia.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, Rng& rng,
                    std::size_t restarts = 10);

// Fraction of points whose label disagrees with the truth after the best
// matching of predicted to true labels. Brute force over permutations when
// both sides have at most 8 labels, Hungarian assignment otherwise.
double clustering_error(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth);
double clustering_error_bruteforce(const std::vector<std::size_t>& pred,
                                   const std::vector<std::size_t>& truth);
double clustering_error_hungarian(const std::vector<std::size_t>& pred,
                                  const std::vector<std::size_t>& truth);

// Runs the clusterer on t restricted by a threshold.
using Clusterer = std::function<ClusteringSolution(const DistanceTensor& t, double threshold)>;

struct TuneResult {
  double threshold = 0.0;
  double error = 1.0;
  ClusteringSolution solution;
  std::size_t failed = 0;  // grid points where the clusterer raised an Error
};

// Deciles of the sampled values followed by +infinity.
std::vector<double> decile_grid(const DistanceTensor& t);

// Argmin of the clustering error over the grid (first one on ties). Grid
// points where the clusterer fails are skipped; if all fail the last error
// is rethrown.
TuneResult tune_threshold(const DistanceTensor& t, const std::vector<std::size_t>& truth,
                          const Clusterer& clusterer, const std::vector<double>& grid);

}  // namespace mmot
