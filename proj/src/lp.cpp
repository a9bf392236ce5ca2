#include "mmot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmot/error.hpp"

namespace mmot::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

constexpr double kDependentRowTol = 1e-10;
constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr std::size_t kStallBeforeBland = 50;

void validate(std::size_t rows, std::size_t cols, const std::vector<double>& matrix,
              const std::vector<double>& rhs, const std::vector<double>* objective) {
  if (rows == 0 || cols == 0) throw InvalidArgument("lp: empty problem");
  if (matrix.size() != rows * cols || rhs.size() != rows ||
      (objective != nullptr && objective->size() != cols))
    throw InvalidArgument("lp: inconsistent dimensions");
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(matrix) || !finite(rhs) || (objective != nullptr && !finite(*objective)))
    throw InvalidArgument("lp: non-finite coefficient");
}

// Indices of a maximal set of rows of [A | b] that are linearly independent.
// A row whose A-part is dependent but whose right-hand side is not stays in
// the set; phase one then reports the system infeasible.
std::vector<std::size_t> independent_rows(std::size_t rows, std::size_t cols,
                                          const std::vector<double>& matrix,
                                          const std::vector<double>& rhs) {
  std::vector<std::vector<double>> basis;  // echelon rows, length cols + 1
  std::vector<std::size_t> pivot_cols;
  std::vector<std::size_t> keep;
  std::vector<double> v(cols + 1);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(matrix.begin() + std::ptrdiff_t(r * cols), cols, v.begin());
    v[cols] = rhs[r];
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) continue;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const double f = v[pivot_cols[k]];
      if (f == 0.0) continue;
      const auto& row = basis[k];
      for (std::size_t j = 0; j <= cols; ++j) v[j] -= f * row[j];
    }
    std::size_t best = cols;
    double best_abs = kDependentRowTol * scale;
    for (std::size_t j = 0; j < cols; ++j)
      if (std::abs(v[j]) > best_abs) {
        best_abs = std::abs(v[j]);
        best = j;
      }
    if (best == cols) {
      if (std::abs(v[cols]) > kDependentRowTol * scale) keep.push_back(r);
      continue;
    }
    const double p = v[best];
    for (double& x : v) x /= p;
    basis.push_back(v);
    pivot_cols.push_back(best);
    keep.push_back(r);
  }
  return keep;
}

// Dense simplex tableau over structural columns [0, n) followed by one
// artificial column per row; the last column holds the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols, const std::vector<double>& matrix,
          const std::vector<double>& rhs, const std::vector<std::size_t>& keep)
      : m_(keep.size()), n_(cols), width_(cols + keep.size() + 1) {
    t_.assign((m_ + 1) * width_, 0.0);
    basis_.resize(m_);
    (void)rows;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t r = keep[i];
      const double sign = rhs[r] < 0.0 ? -1.0 : 1.0;
      double* row = this->row(i);
      for (std::size_t j = 0; j < n_; ++j) row[j] = sign * matrix[r * cols + j];
      row[n_ + i] = 1.0;
      row[width_ - 1] = sign * rhs[r];
      basis_[i] = n_ + i;
    }
    banned_.assign(n_ + m_, false);
  }

  std::size_t rows() const { return m_; }
  double* row(std::size_t i) { return t_.data() + i * width_; }
  const double* row(std::size_t i) const { return t_.data() + i * width_; }
  double* objective() { return row(m_); }
  double rhs(std::size_t i) const { return row(i)[width_ - 1]; }
  std::size_t basic(std::size_t i) const { return basis_[i]; }
  bool is_artificial(std::size_t j) const { return j >= n_; }

  // Phase-one objective: minimize the sum of artificials.
  void load_phase_one() {
    double* obj = objective();
    std::fill(obj, obj + width_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double* r = row(i);
      for (std::size_t j = 0; j < n_; ++j) obj[j] -= r[j];
      obj[width_ - 1] -= r[width_ - 1];
    }
  }

  // Phase-two objective in reduced-cost form for the current basis.
  void load_phase_two(const std::vector<double>& c) {
    double* obj = objective();
    std::fill(obj, obj + width_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) obj[j] = c[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      const double cb = b < n_ ? c[b] : 0.0;
      if (cb == 0.0) continue;
      const double* r = row(i);
      for (std::size_t j = 0; j < width_; ++j) obj[j] -= cb * r[j];
    }
    for (std::size_t j = n_; j < n_ + m_; ++j) banned_[j] = true;
  }

  // Current objective value (the tableau stores its negative).
  double objective_value() const { return -row(m_)[width_ - 1]; }

  void pivot(std::size_t r, std::size_t q) {
    double* pr = row(r);
    const double p = pr[q];
    nz_.clear();
    for (std::size_t j = 0; j < width_; ++j) {
      if (pr[j] == 0.0) continue;
      pr[j] /= p;
      nz_.push_back(j);
    }
    pr[q] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* ri = row(i);
      const double f = ri[q];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) ri[j] -= f * pr[j];
      ri[q] = 0.0;
    }
    basis_[r] = q;
  }

  // Runs simplex iterations on the loaded objective. Returns false when the
  // problem is unbounded in the entering direction.
  bool optimize(const SimplexOptions& options, std::size_t& pivots) {
    std::size_t stalled = 0;
    for (;;) {
      const bool use_bland =
          options.pricing == Pricing::Bland || stalled >= kStallBeforeBland;
      const std::size_t q = entering(use_bland);
      if (q == npos) return true;
      const std::size_t r = leaving(q);
      if (r == npos) return false;
      if (++pivots > options.max_pivots) {
        std::ostringstream msg;
        msg << "lp: pivot limit of " << options.max_pivots << " exceeded";
        throw IterationLimit(msg.str());
      }
      const bool degenerate = rhs(r) <= kPivotTol;
      pivot(r, q);
      stalled = degenerate ? stalled + 1 : 0;
    }
  }

  // Pivots remaining artificials out of the basis; rows that cannot be
  // cleared are redundant and dropped from further consideration.
  void expel_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      const double* r = row(i);
      std::size_t best = npos;
      double best_abs = kPivotTol;
      for (std::size_t j = 0; j < n_; ++j)
        if (std::abs(r[j]) > best_abs) {
          best_abs = std::abs(r[j]);
          best = j;
        }
      if (best != npos) {
        pivot(i, best);
      } else {
        double* w = row(i);
        std::fill(w, w + width_, 0.0);
      }
    }
  }

  std::vector<double> primal(std::size_t n) const {
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n) x[basis_[i]] = std::max(0.0, rhs(i));
    return x;
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::size_t entering(bool bland) const {
    const double* obj = row(m_);
    std::size_t best = npos;
    double best_val = -kReducedCostTol;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (banned_[j] || obj[j] >= best_val) continue;
      if (bland) return j;
      best = j;
      best_val = obj[j];
    }
    return best;
  }

  std::size_t leaving(std::size_t q) const {
    std::size_t best = npos;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = row(i)[q];
      if (a <= kPivotTol) continue;
      const double ratio = std::max(0.0, rhs(i)) / a;
      if (best == npos) {
        best = i;
        best_ratio = ratio;
        continue;
      }
      const double tie = 1e-12 * std::max(1.0, best_ratio);
      if (ratio < best_ratio - tie ||
          (ratio <= best_ratio + tie && basis_[i] < basis_[best])) {
        best_ratio = std::min(ratio, best_ratio);
        best = i;
      }
    }
    return best;
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<bool> banned_;
  std::vector<std::size_t> nz_;
};

}  // namespace

Feasibility feasible(std::size_t rows, std::size_t cols, const std::vector<double>& matrix,
                     const std::vector<double>& rhs, const SimplexOptions& options) {
  validate(rows, cols, matrix, rhs, nullptr);
  const auto keep = independent_rows(rows, cols, matrix, rhs);
  Feasibility out;
  if (keep.empty()) {
    out.feasible = true;
    out.x.assign(cols, 0.0);
    return out;
  }
  Tableau tab(rows, cols, matrix, rhs, keep);
  tab.load_phase_one();
  std::size_t pivots = 0;
  tab.optimize(options, pivots);
  out.phase_one_value = std::max(0.0, tab.objective_value());
  out.feasible = out.phase_one_value <= kPhaseOneTolerance;
  if (out.feasible) out.x = tab.primal(cols);
  return out;
}

LpSolution solve(const LpProblem& p, const SimplexOptions& options) {
  validate(p.rows, p.cols, p.matrix, p.rhs, &p.objective);
  LpSolution out;
  const auto keep = independent_rows(p.rows, p.cols, p.matrix, p.rhs);
  if (keep.empty()) {
    // Every constraint is 0 = 0: optimum is x = 0 unless some cost is negative.
    const bool unbounded =
        std::any_of(p.objective.begin(), p.objective.end(), [](double c) { return c < 0.0; });
    out.status = unbounded ? Status::Unbounded : Status::Optimal;
    out.x.assign(p.cols, 0.0);
    return out;
  }

  Tableau tab(p.rows, p.cols, p.matrix, p.rhs, keep);
  tab.load_phase_one();
  tab.optimize(options, out.pivots);
  if (tab.objective_value() > kPhaseOneTolerance) {
    out.status = Status::Infeasible;
    return out;
  }
  tab.expel_artificials();
  tab.load_phase_two(p.objective);
  if (!tab.optimize(options, out.pivots)) {
    out.status = Status::Unbounded;
    return out;
  }
  out.status = Status::Optimal;
  out.x = tab.primal(p.cols);
  out.value = 0.0;
  for (std::size_t j = 0; j < p.cols; ++j) out.value += p.objective[j] * out.x[j];
  return out;
}

}  // namespace mmot::lp
