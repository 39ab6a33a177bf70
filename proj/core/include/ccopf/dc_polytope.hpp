#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "ccopf/grid_case.hpp"

namespace ccopf {

enum class RowKind { AnglePlus, AngleMinus, GenUpper, GenLower };

const char* row_kind_name(RowKind k);

struct RowLabel {
  RowKind kind;
  int source;  // 0-based branch index for angle rows, generator index otherwise
};

// Reduced DC feasibility polytope W p <= b over the non-slack generation
// vector (MW). Angles are eliminated against the grounded node equations,
// the slack generator against the balancing row; its bounds survive as two
// reconstructed rows, so J = 2m + 2*n_g.
struct FeasibilityPolytope {
  Eigen::MatrixXd W;          // J x (n_g - 1)
  Eigen::VectorXd b;          // J
  std::vector<RowLabel> row_labels;

  Eigen::VectorXd a_ref;      // length n_g, balancing row over full generation
  double b_ref = 0.0;

  Eigen::MatrixXd theta_map;  // n x (n_g - 1)
  Eigen::VectorXd theta_base; // n;  theta(p) = theta_map * p + theta_base

  int slack_gen = 0;              // index into GridCase::generators
  std::vector<int> reduced_gens;  // generator index behind each column
  int n_buses = 0;
  int n_branches = 0;
  int n_gens = 0;

  int rows() const { return static_cast<int>(W.rows()); }
  int dim() const { return static_cast<int>(W.cols()); }

  // True iff W p <= b + 1e-9 componentwise.
  bool check_feasible(const Eigen::VectorXd& p) const;

  // Full generation (slack recovered from the balancing row) and bus angles.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> reconstruct_state(const Eigen::VectorXd& p) const;
};

// Transformed linear cost over the reduced vector: value(p) equals the
// original cost of the reconstructed full dispatch.
struct CostFunction {
  Eigen::VectorXd c;  // n_g - 1
  double ct = 0.0;
  double value(const Eigen::VectorXd& p) const { return c.dot(p) + ct; }
};

// Per-unit Laplacian of branch susceptances.
Eigen::MatrixXd build_admittance(const GridCase& gc);

// Equality system A x = b over x = (theta, p_g), in MW: row 0 is the
// balancing equation, rows 1..n the node equations G p - base*B theta = d.
// rank(A) = n, one short of the row count.
struct EqualitySystem {
  Eigen::MatrixXd A;  // (n+1) x (n + n_g)
  Eigen::VectorXd b;
};
EqualitySystem build_equality_system(const GridCase& gc);

std::pair<FeasibilityPolytope, CostFunction> build_feasibility_polytope(const GridCase& gc);

// Labeled CSV of (kind, source, b, w...) rows.
std::string polytope_csv(const FeasibilityPolytope& poly);
// Deterministic text dump for golden tests.
std::string polytope_text_dump(const FeasibilityPolytope& poly);

}  // namespace ccopf
