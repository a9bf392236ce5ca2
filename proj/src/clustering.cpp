#include "mmot/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "mmot/error.hpp"
#include "mmot/linalg.hpp"

namespace mmot {

Hypergraph3 build_hypergraph(const DistanceTensor& t, double threshold) {
  if (t.order() != 3) throw InvalidArgument("build_hypergraph: tensor must have order 3");
  Hypergraph3 h;
  h.n = t.size();
  for (const auto& key : t.sampled_keys()) {
    const double w = t.value(key);
    if (w <= threshold) h.edges.push_back({key[0], key[1], key[2], w});
  }
  if (h.edges.empty()) throw InvalidArgument("build_hypergraph: no triple survives the threshold");
  return h;
}

std::vector<double> affinities(const std::vector<double>& weights) {
  std::vector<double> out(weights.size());
  if (weights.empty()) return out;
  std::vector<double> sorted = weights;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  double sigma = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  if (!(sigma > 0.0)) sigma = std::accumulate(sorted.begin(), sorted.end(), 0.0) / double(n);
  if (!(sigma > 0.0)) sigma = 1.0;
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(-weights[i] / sigma);
  return out;
}

namespace {

// D^-1/2 for the given degrees; zero degrees are reported or zeroed.
std::vector<double> inv_sqrt_degrees(const std::vector<double>& deg, IsolatedPolicy policy,
                                     const char* who) {
  std::vector<double> out(deg.size());
  std::vector<std::size_t> isolated;
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] > 0.0) {
      out[i] = 1.0 / std::sqrt(deg[i]);
    } else {
      out[i] = 0.0;
      isolated.push_back(i);
    }
  }
  if (!isolated.empty() && policy == IsolatedPolicy::Error) {
    std::ostringstream msg;
    msg << who << ": isolated vertices";
    for (std::size_t i = 0; i < isolated.size() && i < 20; ++i) msg << ' ' << isolated[i];
    if (isolated.size() > 20) msg << " ...";
    throw InvalidArgument(msg.str());
  }
  return out;
}

// k smallest eigenvectors of I - S as rows, one per vertex.
std::vector<std::vector<double>> embedding(const DenseMatrix& s, std::size_t k) {
  const std::size_t n = s.rows();
  DenseMatrix l(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) l(i, j) = (i == j ? 1.0 : 0.0) - s(i, j);
  const SymmetricEigen eig = eig_symmetric(l, k, Which::Smallest);
  std::vector<std::vector<double>> rows(n, std::vector<double>(k));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c) rows[i][c] = eig.vectors(i, c);
  return rows;
}

void normalize_rows(std::vector<std::vector<double>>& rows) {
  for (auto& r : rows) {
    double norm = 0.0;
    for (double x : r) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& x : r) x /= norm;
  }
}

void check_k(std::size_t k, std::size_t n, const char* who) {
  if (k < 1 || k > n) {
    std::ostringstream msg;
    msg << who << ": cluster count " << k << " outside [1, " << n << "]";
    throw InvalidArgument(msg.str());
  }
}

ClusteringSolution finish(const std::vector<std::vector<double>>& rows, std::size_t k,
                          const ClusterOptions& options) {
  Rng rng(options.seed);
  ClusteringSolution sol;
  sol.labels = kmeans(rows, k, rng, options.restarts).labels;
  sol.k = k;
  return sol;
}

// Normalized affinity S = D^-1/2 A D^-1/2.
DenseMatrix normalized(const DenseMatrix& a, const std::vector<double>& dinv) {
  DenseMatrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = dinv[i] * a(i, j) * dinv[j];
  return s;
}

std::vector<double> edge_affinities(const Hypergraph3& h) {
  std::vector<double> w;
  w.reserve(h.edges.size());
  for (const auto& e : h.edges) w.push_back(e.weight);
  return affinities(w);
}

}  // namespace

ClusteringSolution ttm(const Hypergraph3& h, std::size_t k, const ClusterOptions& options) {
  check_k(k, h.n, "ttm");
  const auto aff = edge_affinities(h);
  DenseMatrix a(h.n, h.n);
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    const auto& he = h.edges[e];
    for (auto [x, y] : {std::pair{he.i, he.j}, std::pair{he.i, he.k}, std::pair{he.j, he.k}}) {
      a(x, y) += aff[e];
      a(y, x) += aff[e];
    }
  }
  std::vector<double> deg(h.n, 0.0);
  for (std::size_t i = 0; i < h.n; ++i)
    for (std::size_t j = 0; j < h.n; ++j) deg[i] += a(i, j);
  const auto dinv = inv_sqrt_degrees(deg, options.isolated, "ttm");
  auto rows = embedding(normalized(a, dinv), k);
  normalize_rows(rows);
  return finish(rows, k, options);
}

ClusteringSolution nhcut(const Hypergraph3& h, std::size_t k, const ClusterOptions& options) {
  check_k(k, h.n, "nhcut");
  const auto aff = edge_affinities(h);
  // H W De^-1 H^T with every hyperedge of size 3.
  DenseMatrix m(h.n, h.n);
  std::vector<double> deg(h.n, 0.0);
  for (std::size_t e = 0; e < h.edges.size(); ++e) {
    const auto& he = h.edges[e];
    const std::size_t v[3] = {he.i, he.j, he.k};
    for (std::size_t x : v) {
      deg[x] += aff[e];
      for (std::size_t y : v) m(x, y) += aff[e] / 3.0;
    }
  }
  const auto dinv = inv_sqrt_degrees(deg, options.isolated, "nhcut");
  auto rows = embedding(normalized(m, dinv), k);
  normalize_rows(rows);
  return finish(rows, k, options);
}

ClusteringSolution spectral_cluster(const DistanceTensor& d, std::size_t k,
                                    const ClusterOptions& options, double threshold) {
  if (d.order() != 2) throw InvalidArgument("spectral_cluster: tensor must have order 2");
  check_k(k, d.size(), "spectral_cluster");
  std::vector<Tuple> pairs;
  std::vector<double> w;
  for (const auto& key : d.sampled_keys())
    if (d.value(key) <= threshold) {
      pairs.push_back(key);
      w.push_back(d.value(key));
    }
  if (pairs.empty()) throw InvalidArgument("spectral_cluster: no pair survives the threshold");
  const auto aff = affinities(w);
  DenseMatrix a(d.size(), d.size());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    a(pairs[e][0], pairs[e][1]) = aff[e];
    a(pairs[e][1], pairs[e][0]) = aff[e];
  }
  std::vector<double> deg(d.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) deg[i] += a(i, j);
  const auto dinv = inv_sqrt_degrees(deg, options.isolated, "spectral_cluster");
  auto rows = embedding(normalized(a, dinv), k);
  // Eigenvectors of the random-walk Laplacian: v = D^-1/2 u.
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (double& x : rows[i]) x *= dinv[i];
  return finish(rows, k, options);
}

// ---------------------------------------------------------------------------
// k-means

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

KMeansResult lloyd(const std::vector<std::vector<double>>& pts, std::size_t k, Rng& rng) {
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> centers;
  centers.push_back(pts[rng.below(n)]);
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist(pts[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double u = rng.uniform01() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (u < d2[i]) {
          pick = i;
          break;
        }
        u -= d2[i];
      }
    } else {
      pick = rng.below(n);
    }
    centers.push_back(pts[pick]);
  }

  const std::size_t dim = pts.front().size();
  std::vector<std::size_t> label(n, k);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double bd = sq_dist(pts[i], centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double dc = sq_dist(pts[i], centers[c]);
        if (dc < bd) {
          bd = dc;
          best = c;
        }
      }
      if (label[i] != best) {
        label[i] = best;
        changed = true;
      }
    }
    std::vector<std::size_t> count(k, 0);
    std::vector<std::vector<double>> sum(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      ++count[label[i]];
      for (std::size_t d = 0; d < dim; ++d) sum[label[i]][d] += pts[i][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) {
        // Reseed an empty cluster with the point farthest from its center.
        std::size_t far = 0;
        double fd = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double di = sq_dist(pts[i], centers[label[i]]);
          if (di > fd && count[label[i]] > 1) {
            fd = di;
            far = i;
          }
        }
        --count[label[far]];
        label[far] = c;
        count[c] = 1;
        centers[c] = pts[far];
        changed = true;
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sum[c][d] / double(count[c]);
    }
    if (!changed) break;
  }
  KMeansResult r;
  r.labels = label;
  for (std::size_t i = 0; i < n; ++i) r.inertia += sq_dist(pts[i], centers[label[i]]);
  return r;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, Rng& rng,
                    std::size_t restarts) {
  if (points.empty()) throw InvalidArgument("kmeans: no points");
  if (k < 1 || k > points.size()) throw InvalidArgument("kmeans: k must lie in [1, #points]");
  const std::size_t dim = points.front().size();
  for (const auto& p : points)
    if (p.size() != dim) throw InvalidArgument("kmeans: points differ in dimension");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    KMeansResult cur = lloyd(points, k, rng);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Clustering error

namespace {

struct Confusion {
  std::size_t size = 0;  // square, padded with zero rows/columns
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  std::size_t operator()(std::size_t p, std::size_t t) const { return counts[p * size + t]; }
};

Confusion confusion(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth) {
  if (pred.size() != truth.size()) throw InvalidArgument("clustering_error: length mismatch");
  if (pred.empty()) throw InvalidArgument("clustering_error: empty labelings");
  std::map<std::size_t, std::size_t> pid, tid;
  for (std::size_t x : pred) pid.emplace(x, pid.size());
  for (std::size_t x : truth) tid.emplace(x, tid.size());
  Confusion c;
  c.size = std::max(pid.size(), tid.size());
  c.counts.assign(c.size * c.size, 0);
  c.total = pred.size();
  for (std::size_t i = 0; i < pred.size(); ++i) ++c.counts[pid[pred[i]] * c.size + tid[truth[i]]];
  return c;
}

std::size_t best_match_bruteforce(const Confusion& c) {
  std::vector<std::size_t> perm(c.size);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t m = 0;
    for (std::size_t p = 0; p < c.size; ++p) m += c(p, perm[p]);
    best = std::max(best, m);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Hungarian algorithm (potentials form) maximizing the matched count.
std::size_t best_match_hungarian(const Confusion& c) {
  const std::size_t n = c.size;
  const long long inf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  auto cost = [&](std::size_t i, std::size_t j) { return -static_cast<long long>(c(i - 1, j - 1)); };
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<long long> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      long long delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::size_t matched = 0;
  for (std::size_t j = 1; j <= n; ++j) matched += c(p[j] - 1, j - 1);
  return matched;
}

double as_error(const Confusion& c, std::size_t matched) {
  return double(c.total - matched) / double(c.total);
}

}  // namespace

double clustering_error_bruteforce(const std::vector<std::size_t>& pred,
                                   const std::vector<std::size_t>& truth) {
  const Confusion c = confusion(pred, truth);
  if (c.size > 10) throw InvalidArgument("clustering_error: too many labels for brute force");
  return as_error(c, best_match_bruteforce(c));
}

double clustering_error_hungarian(const std::vector<std::size_t>& pred,
                                  const std::vector<std::size_t>& truth) {
  const Confusion c = confusion(pred, truth);
  return as_error(c, best_match_hungarian(c));
}

double clustering_error(const std::vector<std::size_t>& pred, const std::vector<std::size_t>& truth) {
  const Confusion c = confusion(pred, truth);
  return as_error(c, c.size <= 8 ? best_match_bruteforce(c) : best_match_hungarian(c));
}

// ---------------------------------------------------------------------------
// Threshold tuning

std::vector<double> decile_grid(const DistanceTensor& t) {
  std::vector<double> v;
  for (const auto& key : t.sampled_keys()) v.push_back(t.value(key));
  if (v.empty()) throw InvalidArgument("decile_grid: tensor has no sampled entries");
  std::sort(v.begin(), v.end());
  std::vector<double> grid;
  for (int q = 1; q <= 9; ++q) {
    const double pos = q / 10.0 * double(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    grid.push_back(v[lo] + (pos - double(lo)) * (v[hi] - v[lo]));
  }
  grid.push_back(std::numeric_limits<double>::infinity());
  return grid;
}

TuneResult tune_threshold(const DistanceTensor& t, const std::vector<std::size_t>& truth,
                          const Clusterer& clusterer, const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("tune_threshold: empty grid");
  TuneResult best;
  bool found = false;
  std::string last_error;
  for (double th : grid) {
    ClusteringSolution sol;
    try {
      sol = clusterer(t, th);
    } catch (const Error& e) {
      ++best.failed;
      last_error = e.what();
      continue;
    }
    const double err = clustering_error(sol.labels, truth);
    if (!found || err < best.error) {
      best.threshold = th;
      best.error = err;
      best.solution = std::move(sol);
      found = true;
    }
  }
  if (!found) throw Error("tune_threshold: every grid point failed; last: " + last_error);
  return best;
}

}  // namespace mmot
