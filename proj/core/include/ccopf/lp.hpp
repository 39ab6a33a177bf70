#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ccopf {

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* lp_status_name(LpStatus s);

// min objective . x + objective_constant  s.t.  A x <= rhs, lower <= x <= upper.
// +-infinity bounds allowed; magnitudes at or past 1e20 count as infinite
// (the usual solver convention).
struct LpProblem {
  Eigen::VectorXd objective;
  double objective_constant = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<std::string> var_labels;  // optional; x1.. when empty
  std::vector<std::string> row_labels;  // optional

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(A.rows()); }

  // Shape and finiteness checks; throws Validation on NaN/Inf coefficients.
  void validate() const;
};

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
  long iterations = 0;
  // Shadow prices of the A-rows (dObj/drhs, <= 0), filled on optimal exits.
  Eigen::VectorXd row_duals;
  // On infeasible exits: index of the row with the largest phase-1 residual,
  // -1 when the infeasibility comes from the variable bounds.
  int most_violated_row = -1;
};

struct SimplexOptions {
  double pivot_tol = 1e-9;
  long max_iterations = 1000000;
};

// Two-phase primal simplex on the dense slack-form tableau. Dantzig pricing
// with smallest-index tie-breaks, falling back to Bland's rule after a run
// of degenerate pivots. Infeasible/unbounded are returned as statuses;
// hitting the iteration cap throws a Numerical error.
LpSolution solve_lp(const LpProblem& lp, const SimplexOptions& opt = {});

// Plain-text export (CPLEX LP dialect) for cross-checks with other solvers.
std::string lp_export_text(const LpProblem& lp);

}  // namespace ccopf
