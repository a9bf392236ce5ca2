#include "mmot/metric_props.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "mmot/error.hpp"
#include "mmot/lp.hpp"

namespace mmot {

namespace {

constexpr double kZero = 1e-12;

double audit_tolerance(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Advances an increasing tuple over {0..n-1}; false after the last one.
bool next_combination(Tuple& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

Tuple without(const Tuple& s, std::size_t pos) {
  Tuple t;
  t.reserve(s.size() - 1);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i != pos) t.push_back(s[i]);
  return t;
}

}  // namespace

std::vector<Tuple> combinations(std::size_t n, std::size_t k) {
  std::vector<Tuple> out;
  if (k == 0 || k > n) return out;
  Tuple c(k);
  std::iota(c.begin(), c.end(), 0);
  do {
    out.push_back(c);
  } while (next_combination(c, n));
  return out;
}

// ---------------------------------------------------------------------------
// DistanceTensor

DistanceTensor::DistanceTensor(std::size_t order, std::size_t size) : order_(order), n_(size) {
  if (order < 2 || order > 3) throw InvalidArgument("distance tensor: order must be 2 or 3");
  if (size < order) throw InvalidArgument("distance tensor: fewer objects than the order");
  std::size_t total = 1;
  for (std::size_t i = 0; i < order; ++i) total *= size;
  values_.assign(total, kSentinel);
  sampled_.assign(total, 0);
}

std::size_t DistanceTensor::key_count() const { return binomial(n_, order_); }

std::size_t DistanceTensor::offset(const Tuple& t) const {
  if (t.size() != order_) throw InvalidArgument("distance tensor: tuple length differs from order");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= n_ || (i > 0 && t[i] <= t[i - 1]))
      throw InvalidArgument("distance tensor: tuple must be strictly increasing and in range");
    flat = flat * n_ + t[i];
  }
  return flat;
}

void DistanceTensor::set(const Tuple& t, double v) {
  if (!std::isfinite(v)) throw InvalidArgument("distance tensor: non-finite value");
  const std::size_t o = offset(t);
  values_[o] = v;
  sampled_[o] = 1;
}

void DistanceTensor::overwrite(const Tuple& t, double v) {
  const std::size_t o = offset(t);
  if (!sampled_[o]) throw InvalidArgument("distance tensor: overwrite of an unsampled entry");
  values_[o] = v;
}

std::size_t DistanceTensor::sampled_count() const {
  return static_cast<std::size_t>(std::count(sampled_.begin(), sampled_.end(), 1));
}

std::vector<Tuple> DistanceTensor::keys() const { return combinations(n_, order_); }

std::vector<Tuple> DistanceTensor::sampled_keys() const {
  std::vector<Tuple> out;
  for (auto& t : keys())
    if (sampled(t)) out.push_back(t);
  return out;
}

void DistanceTensor::write_csv(std::ostream& out) const {
  out << (order_ == 2 ? "i,j" : "i,j,k") << ",value,sampled\n";
  for (const auto& t : keys()) {
    for (std::size_t x : t) out << x << ',';
    out << format_double(value(t)) << ',' << (sampled(t) ? 1 : 0) << '\n';
  }
}

DistanceTensor DistanceTensor::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("distance tensor: empty file");
  std::size_t order;
  if (line == "i,j,value,sampled")
    order = 2;
  else if (line == "i,j,k,value,sampled")
    order = 3;
  else
    throw ParseError("distance tensor: line 1: unrecognized header");

  struct Row {
    Tuple t;
    double v;
    bool s;
  };
  std::vector<Row> rows;
  std::size_t n = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    auto fail = [&](const std::string& why) {
      throw ParseError("distance tensor: line " + std::to_string(lineno) + ": " + why);
    };
    if (fields.size() != order + 2) fail("expected " + std::to_string(order + 2) + " fields");
    Row r;
    try {
      for (std::size_t i = 0; i < order; ++i) {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(fields[i], &used);
        if (used != fields[i].size()) fail("bad index");
        r.t.push_back(static_cast<std::size_t>(x));
      }
      std::size_t used = 0;
      r.v = std::stod(fields[order], &used);
      if (used != fields[order].size()) fail("bad value");
    } catch (const std::logic_error&) {
      fail("bad number");
    }
    if (fields[order + 1] != "0" && fields[order + 1] != "1") fail("sampled flag must be 0 or 1");
    r.s = fields[order + 1] == "1";
    for (std::size_t i = 1; i < order; ++i)
      if (r.t[i] <= r.t[i - 1]) fail("indices must be strictly increasing");
    n = std::max(n, r.t.back() + 1);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError("distance tensor: no rows");
  DistanceTensor out(order, n);
  if (rows.size() != out.key_count())
    throw ParseError("distance tensor: expected one row per index tuple");
  for (const auto& r : rows) {
    if (r.s) {
      out.set(r.t, r.v);
    } else {
      const std::size_t o = out.offset(r.t);
      out.values_[o] = r.v;
    }
  }
  return out;
}

bool operator==(const DistanceTensor& a, const DistanceTensor& b) {
  return a.order_ == b.order_ && a.n_ == b.n_ && a.values_ == b.values_ && a.sampled_ == b.sampled_;
}

// ---------------------------------------------------------------------------
// Reports

MetricReport::MetricReport() : empirical_C(std::numeric_limits<double>::quiet_NaN()) {}

namespace {

void note_ratio(MetricReport& rep, double base, double others) {
  if (base <= kZero) return;
  const double ratio = others / base;
  if (std::isnan(rep.empirical_C) || ratio < rep.empirical_C) rep.empirical_C = ratio;
}

}  // namespace

MetricReport check_metric(const std::vector<std::vector<Atom>>& spaces, const PairCostFn& d) {
  MetricReport rep;
  const std::size_t n = spaces.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t s = 0; s < spaces[i].size(); ++s)
        for (std::size_t r = 0; r < spaces[j].size(); ++r) {
          const double v = d(i, j, s, r);
          if (v < 0.0) {
            rep.nonnegative = false;
            rep.violations.push_back({"nonnegativity", {i, j, s, r}, -v});
          }
          const double w = d(j, i, r, s);
          if (std::abs(v - w) > kZero * std::max(1.0, std::abs(v))) {
            rep.symmetric = false;
            rep.violations.push_back({"symmetry", {i, j, s, r}, std::abs(v - w)});
          }
          const bool equal = spaces[i][s] == spaces[j][r];
          if (equal != (std::abs(v) <= kZero)) {
            rep.identity = false;
            rep.violations.push_back({"identity", {i, j, s, r}, std::abs(v)});
          }
          for (std::size_t k = 0; k < n; ++k)
            for (std::size_t t = 0; t < spaces[k].size(); ++t) {
              const double others = d(i, k, s, t) + d(k, j, t, r);
              ++rep.audited;
              note_ratio(rep, v, others);
              if (v > others + audit_tolerance(others)) {
                rep.triangle = false;
                rep.violations.push_back({"triangle", {i, j, k, s, r, t}, v - others});
              }
            }
        }
  return rep;
}

MetricReport check_n_metric_cost(const std::vector<Atom>& space, std::size_t n, const NCostFn& d,
                                 double C) {
  if (n < 2) throw InvalidArgument("check_n_metric_cost: n must be at least 2");
  if (space.empty()) throw InvalidArgument("check_n_metric_cost: empty space");
  MetricReport rep;
  const Shape shape(n, space.size());
  std::vector<std::size_t> idx(n, 0);
  do {
    const double v = d(idx);
    if (v < 0.0) {
      rep.nonnegative = false;
      rep.violations.push_back({"nonnegativity", idx, -v});
    }
    bool all_equal = true;
    for (std::size_t a = 1; a < n; ++a) all_equal = all_equal && space[idx[a]] == space[idx[0]];
    if (all_equal != (std::abs(v) <= kZero)) {
      rep.identity = false;
      rep.violations.push_back({"identity", idx, std::abs(v)});
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> permuted(n);
    while (std::next_permutation(perm.begin(), perm.end())) {
      for (std::size_t a = 0; a < n; ++a) permuted[a] = idx[perm[a]];
      const double w = d(permuted);
      if (std::abs(v - w) > kZero * std::max(1.0, std::abs(v))) {
        rep.symmetric = false;
        rep.violations.push_back({"symmetry", idx, std::abs(v - w)});
        break;
      }
    }
  } while (next_index(idx, shape));

  const Shape wide(n + 1, space.size());
  std::vector<std::size_t> big(n + 1, 0);
  std::vector<std::size_t> sub(n);
  do {
    const double base = d(std::span<const std::size_t>(big.data(), n));
    double others = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t w = 0;
      for (std::size_t a = 0; a <= n; ++a)
        if (a != r) sub[w++] = big[a];
      others += d(sub);
    }
    ++rep.audited;
    note_ratio(rep, base, others);
    if (C * base > others + audit_tolerance(others)) {
      rep.triangle = false;
      rep.violations.push_back({"triangle", big, C * base - others});
    }
  } while (next_index(big, wide));
  return rep;
}


namespace {

struct SubsetAudit {
  std::vector<Violation> violations;
  MetricReport ratios;  // only empirical_C is used
  std::size_t audited = 0;
};

// Values of the k+1 faces of `subset` (face e leaves out subset[e]), or false
// when one of them was never sampled.
bool face_values(const DistanceTensor& t, const Tuple& subset, std::vector<double>& v) {
  v.resize(subset.size());
  for (std::size_t e = 0; e < subset.size(); ++e) {
    const Tuple face = without(subset, e);
    if (!t.sampled(face)) return false;
    v[e] = t.value(face);
  }
  return true;
}

// Audits every fully sampled (k+1)-subset whose smallest element is `first`.
SubsetAudit audit_from(const DistanceTensor& t, double C, std::size_t first) {
  SubsetAudit out;
  const std::size_t k = t.order();
  const std::size_t n = t.size();
  if (first + k >= n) return out;
  const std::size_t span = n - first - 1;
  Tuple rel(k);
  std::iota(rel.begin(), rel.end(), 0);
  Tuple subset(k + 1);
  std::vector<double> v;
  do {
    subset[0] = first;
    for (std::size_t i = 0; i < k; ++i) subset[i + 1] = first + 1 + rel[i];
    if (!face_values(t, subset, v)) continue;
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    for (std::size_t e = 0; e <= k; ++e) {
      const double base = v[e];
      const double others = total - base;
      ++out.audited;
      note_ratio(out.ratios, base, others);
      if (C * base > others + audit_tolerance(others)) {
        // The tuple lists the subset followed by the element left out of the base face.
        Tuple role = subset;
        role.push_back(subset[e]);
        out.violations.push_back({"triangle", role, C * base - others});
      }
    }
  } while (next_combination(rel, span));
  return out;
}

MetricReport merge_audits(const DistanceTensor& t, std::vector<SubsetAudit>& parts) {
  MetricReport rep;
  for (const auto& key : t.sampled_keys())
    if (t.value(key) < 0.0) {
      rep.nonnegative = false;
      rep.violations.push_back({"nonnegativity", key, -t.value(key)});
    }
  for (auto& p : parts) {
    rep.audited += p.audited;
    if (!std::isnan(p.ratios.empirical_C))
      note_ratio(rep, 1.0, p.ratios.empirical_C);
    for (auto& v : p.violations) rep.violations.push_back(std::move(v));
    if (!p.violations.empty()) rep.triangle = false;
  }
  return rep;
}

}  // namespace

MetricReport check_W_tensor_serial(const DistanceTensor& t, double C) {
  std::vector<SubsetAudit> parts(t.size());
  for (std::size_t a = 0; a < t.size(); ++a) parts[a] = audit_from(t, C, a);
  return merge_audits(t, parts);
}

MetricReport check_W_tensor(const DistanceTensor& t, double C) {
  std::vector<SubsetAudit> parts(t.size());
  const long n = static_cast<long>(t.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long a = 0; a < n; ++a) parts[std::size_t(a)] = audit_from(t, C, std::size_t(a));
  return merge_audits(t, parts);
}

// ---------------------------------------------------------------------------
// Injection

InjectionResult inject_violations(const DistanceTensor& t, const InjectionOptions& options,
                                  Rng& rng) {
  if (!(options.fraction >= 0.0 && options.fraction <= 1.0))
    throw InvalidArgument("inject: fraction must lie in [0, 1]");
  if (!(options.factor > 1.0)) throw InvalidArgument("inject: factor must exceed 1");
  InjectionResult out{t, {}, {}};
  const std::size_t base_count = options.count_all_entries ? t.key_count() : t.sampled_count();
  const auto target =
      static_cast<std::size_t>(std::ceil(options.fraction * double(base_count) - 1e-9));
  if (target == 0) return out;

  std::vector<Tuple> subsets;
  std::vector<double> v;
  for (auto& s : combinations(t.size(), t.order() + 1))
    if (face_values(t, s, v)) subsets.push_back(std::move(s));
  rng.shuffle(subsets);

  std::set<Tuple> modified;
  std::set<Tuple> protected_faces;
  for (const auto& s : subsets) {
    if (out.modified.size() == target) break;
    face_values(out.tensor, s, v);
    std::vector<Tuple> faces;
    bool touched = false;
    for (std::size_t e = 0; e < s.size(); ++e) {
      faces.push_back(without(s, e));
      touched = touched || modified.count(faces.back()) > 0;
    }
    if (touched) continue;
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    double min_delta = std::numeric_limits<double>::infinity();
    std::size_t pick = s.size();
    for (std::size_t e = 0; e < s.size(); ++e) {
      const double others = total - v[e];
      const double delta = others - v[e];
      min_delta = std::min(min_delta, delta);
      if (protected_faces.count(faces[e])) continue;
      // The resulting margin (factor - 1) * delta must clear the audit tolerance.
      const double bumped = v[e] + options.factor * delta;
      if (bumped - others <= audit_tolerance(others)) continue;
      if (pick == s.size() || delta < total - v[pick] - v[pick]) pick = e;
    }
    if (min_delta <= audit_tolerance(total) || pick == s.size()) continue;
    const double delta = total - 2.0 * v[pick];
    out.tensor.overwrite(faces[pick], v[pick] + options.factor * delta);
    modified.insert(faces[pick]);
    for (std::size_t e = 0; e < s.size(); ++e)
      if (e != pick) protected_faces.insert(faces[e]);
    out.modified.push_back(faces[pick]);
    out.targeted.push_back(s);
  }
  if (out.modified.size() < target) {
    std::ostringstream msg;
    msg << "inject: only " << out.modified.size() << " of " << target
        << " entries could be modified; the tensor has too few fully sampled "
        << t.order() + 1 << "-subsets";
    throw InvalidArgument(msg.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gluing

namespace {

std::vector<double> axis_marginal(const JointMass& p, std::size_t axis) {
  const JointMass m = marginal(p, {axis});
  return {m.entries().begin(), m.entries().end()};
}

void require_same(const std::vector<double>& a, const std::vector<double>& b, const char* what) {
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = std::abs(a[i] - b[i]) <= 1e-9;
  if (!same) throw InvalidArgument(std::string("gluing: incompatible marginals on ") + what);
}

}  // namespace

GluingCheck no_gluing_check(const JointMass& p12, const JointMass& p13, const JointMass& p23) {
  if (p12.rank() != 2 || p13.rank() != 2 || p23.rank() != 2)
    throw InvalidArgument("gluing: inputs must be bivariate");
  require_same(axis_marginal(p12, 0), axis_marginal(p13, 0), "X1");
  require_same(axis_marginal(p12, 1), axis_marginal(p23, 0), "X2");
  require_same(axis_marginal(p13, 1), axis_marginal(p23, 1), "X3");
  const std::size_t m1 = p12.shape()[0], m2 = p12.shape()[1], m3 = p13.shape()[1];

  const std::size_t rows = m1 * m2 + m1 * m3 + m2 * m3;
  const std::size_t cols = m1 * m2 * m3;
  std::vector<double> a(rows * cols, 0.0);
  std::vector<double> b(rows, 0.0);
  for (std::size_t i = 0; i < m1; ++i)
    for (std::size_t j = 0; j < m2; ++j)
      for (std::size_t k = 0; k < m3; ++k) {
        const std::size_t c = (i * m2 + j) * m3 + k;
        a[(i * m2 + j) * cols + c] = 1.0;
        a[(m1 * m2 + i * m3 + k) * cols + c] = 1.0;
        a[(m1 * m2 + m1 * m3 + j * m3 + k) * cols + c] = 1.0;
      }
  for (std::size_t i = 0; i < m1; ++i)
    for (std::size_t j = 0; j < m2; ++j) b[i * m2 + j] = p12.at({i, j});
  for (std::size_t i = 0; i < m1; ++i)
    for (std::size_t k = 0; k < m3; ++k) b[m1 * m2 + i * m3 + k] = p13.at({i, k});
  for (std::size_t j = 0; j < m2; ++j)
    for (std::size_t k = 0; k < m3; ++k) b[m1 * m2 + m1 * m3 + j * m3 + k] = p23.at({j, k});

  const lp::Feasibility f = lp::feasible(rows, cols, a, b);
  GluingCheck out;
  out.feasible = f.feasible;
  out.phase_one_value = f.phase_one_value;
  if (f.feasible) out.witness = JointMass({m1, m2, m3}, f.x);
  return out;
}

}  // namespace mmot
