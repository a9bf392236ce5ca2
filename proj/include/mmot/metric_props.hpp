#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmot/core.hpp"
#include "mmot/rng.hpp"

namespace mmot {

using Tuple = std::vector<std::size_t>;

// Symmetric k-way distances among N objects (k = 2 or 3). Only strictly
// increasing index tuples are addressable; entries that were never computed
// hold kSentinel and are excluded from every audit.
class DistanceTensor {
 public:
  static constexpr double kSentinel = 1e9;

  DistanceTensor(std::size_t order, std::size_t size);

  std::size_t order() const { return order_; }
  std::size_t size() const { return n_; }
  std::size_t key_count() const;  // C(N, k)

  double value(const Tuple& t) const { return values_[offset(t)]; }
  bool sampled(const Tuple& t) const { return sampled_[offset(t)] != 0; }
  // Stores a computed value and marks the tuple as sampled.
  void set(const Tuple& t, double v);
  // Overwrites a sampled value (used by injection).
  void overwrite(const Tuple& t, double v);

  std::size_t sampled_count() const;
  std::vector<Tuple> keys() const;  // every increasing tuple, lexicographic
  std::vector<Tuple> sampled_keys() const;

  // Rows `i,j[,k],value,sampled` for every key, after a header line.
  void write_csv(std::ostream& out) const;
  static DistanceTensor read_csv(std::istream& in);

  friend bool operator==(const DistanceTensor& a, const DistanceTensor& b);

 private:
  std::size_t offset(const Tuple& t) const;

  std::size_t order_;
  std::size_t n_;
  std::vector<double> values_;
  std::vector<char> sampled_;
};

// Every increasing k-subset of {0..n-1} in lexicographic order.
std::vector<Tuple> combinations(std::size_t n, std::size_t k);

struct Violation {
  std::string property;  // nonnegativity, symmetry, identity, triangle
  Tuple tuple;
  double margin = 0.0;   // amount by which the property fails
};

struct MetricReport {
  bool nonnegative = true;
  bool symmetric = true;
  bool identity = true;
  bool triangle = true;
  std::vector<Violation> violations;
  // Minimum of (sum of leave-one-out values) / base over audited tuples with
  // base > 1e-12; NaN when nothing was audited.
  double empirical_C;
  std::size_t audited = 0;

  MetricReport();
  bool ok() const { return nonnegative && symmetric && identity && triangle; }
};

// d(i, j, s, t): cost between atom s of space i and atom t of space j.
using PairCostFn = std::function<double(std::size_t, std::size_t, std::size_t, std::size_t)>;

// Exhaustive check of the four metric axioms over all spaces (including
// i = j) and all atom indices.
MetricReport check_metric(const std::vector<std::vector<Atom>>& spaces, const PairCostFn& d);

// d(s_1..s_n) for atom indices into one shared space.
using NCostFn = std::function<double(std::span<const std::size_t>)>;

// Exhaustive check that an n-way cost over one atom list is an (n, C)-metric:
// nonnegativity, permutation symmetry, zero iff all atoms equal, and
// C d(s_1..s_n) <= sum_{r <= n} d(s without s_r) for every (n+1)-tuple.
MetricReport check_n_metric_cost(const std::vector<Atom>& space, std::size_t n, const NCostFn& d,
                                 double C);

// Generalized triangle inequality over every (k+1)-subset whose k-subsets are
// all sampled, in each of the k+1 roles. OpenMP-parallel over subsets.
MetricReport check_W_tensor(const DistanceTensor& t, double C);
// Single-threaded reference with identical output.
MetricReport check_W_tensor_serial(const DistanceTensor& t, double C);

struct InjectionOptions {
  double fraction = 0.20;
  double factor = 1.3;
  // Base the target count on all C(N, k) entries instead of sampled ones.
  bool count_all_entries = false;
};

struct InjectionResult {
  DistanceTensor tensor;
  std::vector<Tuple> modified;  // entries that were increased
  std::vector<Tuple> targeted;  // (k+1)-subsets made to violate, same order
};

// Draws fully sampled (k+1)-subsets in seeded random order. For each subset
// that has no modified entry and is not already violating, picks among the
// entries not shared with an earlier targeted subset the one needing the
// smallest increase delta to become a violation, and adds factor * delta.
// Stops after ceil(fraction * count) modifications.
InjectionResult inject_violations(const DistanceTensor& t, const InjectionOptions& options,
                                  Rng& rng);

struct GluingCheck {
  bool feasible = false;
  std::optional<JointMass> witness;
  double phase_one_value = 0.0;
};

// Decides whether some joint mass on X1 x X2 x X3 has the three given
// bivariate marginals. Inputs whose shared univariate marginals disagree
// (beyond 1e-9) raise InvalidArgument.
GluingCheck no_gluing_check(const JointMass& p12, const JointMass& p13, const JointMass& p23);

}  // namespace mmot
