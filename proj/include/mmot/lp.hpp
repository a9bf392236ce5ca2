#pragma once

#include <cstddef>
#include <vector>

namespace mmot::lp {

// min c.x  subject to  A x = b,  x >= 0.  A is rows x cols, row-major.
struct LpProblem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> objective;
  std::vector<double> matrix;
  std::vector<double> rhs;

  LpProblem() = default;
  LpProblem(std::size_t rows, std::size_t cols)
      : rows(rows), cols(cols), objective(cols, 0.0), matrix(rows * cols, 0.0), rhs(rows, 0.0) {}

  double& a(std::size_t r, std::size_t c) { return matrix[r * cols + c]; }
  double a(std::size_t r, std::size_t c) const { return matrix[r * cols + c]; }
};

enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status s);

struct LpSolution {
  Status status = Status::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

enum class Pricing {
  // Smallest-index entering and leaving variables on every pivot.
  Bland,
  // Most negative reduced cost; drops to Bland's rule while the objective
  // stalls on a degenerate vertex.
  DantzigWithBlandFallback,
};

struct SimplexOptions {
  std::size_t max_pivots = 1'000'000;
  Pricing pricing = Pricing::Bland;
};

// Two-phase dense primal simplex. Dependent equality rows are removed by
// pivoted elimination before phase one. Throws InvalidArgument on non-finite
// or inconsistent input and IterationLimit when the pivot budget runs out.
LpSolution solve(const LpProblem& problem, const SimplexOptions& options = {});

struct Feasibility {
  bool feasible = false;
  std::vector<double> x;        // a feasible point when `feasible`
  double phase_one_value = 0.0;  // > 1e-8 certifies infeasibility
};

// Phase one only: decides whether {x >= 0 : A x = b} is empty.
Feasibility feasible(std::size_t rows, std::size_t cols, const std::vector<double>& matrix,
                     const std::vector<double>& rhs, const SimplexOptions& options = {});

inline constexpr double kPhaseOneTolerance = 1e-8;

}  // namespace mmot::lp
