#include "ccopf/scenario_opt.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ccopf/errors.hpp"

namespace ccopf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shapes(const FeasibilityPolytope& poly, const ScenarioSet& scenarios,
                  const AgcPolicy& policy, const Eigen::VectorXd& ramps) {
  if (scenarios.size() < 1)
    throw validation_error("scenario LP: scenario set is empty (N=0 is rejected; "
                           "use solve_deterministic_dcopf for the tau=0-only program)");
  if (policy.alpha.size() != poly.n_gens)
    throw validation_error("scenario LP: alpha length does not match generator count");
  if (ramps.size() != poly.n_gens)
    throw validation_error("scenario LP: ramp vector length does not match generator count");
}

// Fixed-alpha ramp facts contain no decision variable; a violating scenario
// makes the whole program infeasible by construction.
void check_fixed_ramps(const ScenarioSet& scenarios, const AgcPolicy& policy,
                       const Eigen::VectorXd& ramps) {
  const int T = scenarios.horizon();
  for (int j = 0; j < scenarios.size(); ++j) {
    double prev = 0.0;
    for (int t = 0; t < T; ++t) {
      double xi = scenarios.zeta(j, t) - prev;
      prev = scenarios.zeta(j, t);
      for (int k = 0; k < policy.alpha.size(); ++k) {
        if (std::abs(policy.alpha(k) * xi) > ramps(k) + 1e-9)
          throw infeasible_error("scenario forces ramp violation (scenario " +
                                 std::to_string(j + 1) + ", step " + std::to_string(t + 1) +
                                 ", generator " + std::to_string(k + 1) + ")");
      }
    }
  }
}

}  // namespace

Eigen::VectorXd reduced_alpha(const FeasibilityPolytope& poly, const AgcPolicy& policy) {
  if (policy.alpha.size() != poly.n_gens)
    throw validation_error("alpha length does not match generator count");
  Eigen::VectorXd out(poly.dim());
  for (int c = 0; c < poly.dim(); ++c) out(c) = policy.alpha(poly.reduced_gens[c]);
  return out;
}

LpProblem build_scenario_lp(const FeasibilityPolytope& poly, const CostFunction& cost,
                            const ScenarioSet& scenarios, const AgcPolicy& policy,
                            const Eigen::VectorXd& ramps, AlphaMode mode,
                            const OuterPolytope* outer) {
  check_shapes(poly, scenarios, policy, ramps);
  policy.validate();
  const int J = poly.rows();
  const int nr = poly.dim();
  const int ng = poly.n_gens;
  const int N = scenarios.size();
  const int T = scenarios.horizon();
  const Eigen::VectorXd alpha_red = reduced_alpha(poly, policy);

  LpProblem lp;
  const int outer_rows = outer ? J : 0;

  if (mode == AlphaMode::Fixed) {
    check_fixed_ramps(scenarios, policy, ramps);
    const int rows = N * (T + 1) * J + outer_rows;
    lp.objective = cost.c;
    lp.objective_constant = cost.ct;
    lp.A.resize(rows, nr);
    lp.rhs.resize(rows);
    lp.lower = Eigen::VectorXd::Constant(nr, -kInf);
    lp.upper = Eigen::VectorXd::Constant(nr, kInf);
    const Eigen::VectorXd walpha = poly.W * alpha_red;
    int r = 0;
    for (int j = 0; j < N; ++j) {
      for (int tau = 0; tau <= T; ++tau) {
        const double z = tau == 0 ? 0.0 : scenarios.zeta(j, tau - 1);
        lp.A.block(r, 0, J, nr) = poly.W;
        lp.rhs.segment(r, J) = poly.b - walpha * z;
        r += J;
      }
    }
    if (outer) {
      lp.A.block(r, 0, J, nr) = outer->W;
      lp.rhs.segment(r, J) = outer->effective_b;
    }
    for (int c = 0; c < nr; ++c)
      lp.var_labels.push_back("p" + std::to_string(poly.reduced_gens[c] + 1));
    return lp;
  }

  // Box mode: variables (p, alpha).
  if (!(policy.deviation_bound > 0.0))
    throw validation_error("scenario LP: box mode needs a positive deviation bound");
  const int nv = nr + ng;
  const int rows = N * (T + 1) * J + N * T * ng * 2 + 2 + outer_rows;
  lp.objective = Eigen::VectorXd::Zero(nv);
  lp.objective.head(nr) = cost.c;
  lp.objective_constant = cost.ct;
  lp.A = Eigen::MatrixXd::Zero(rows, nv);
  lp.rhs.resize(rows);
  lp.lower = Eigen::VectorXd::Constant(nv, -kInf);
  lp.upper = Eigen::VectorXd::Constant(nv, kInf);
  for (int k = 0; k < ng; ++k) {
    lp.lower(nr + k) = std::max(0.0, policy.alpha_ref(k) - policy.deviation_bound);
    lp.upper(nr + k) = policy.alpha_ref(k) + policy.deviation_bound;
  }

  int r = 0;
  for (int j = 0; j < N; ++j) {
    for (int tau = 0; tau <= T; ++tau) {
      const double z = tau == 0 ? 0.0 : scenarios.zeta(j, tau - 1);
      lp.A.block(r, 0, J, nr) = poly.W;
      if (z != 0.0)
        for (int c = 0; c < nr; ++c)
          lp.A.block(r, nr + poly.reduced_gens[c], J, 1) = poly.W.col(c) * z;
      lp.rhs.segment(r, J) = poly.b;
      r += J;
    }
  }
  for (int j = 0; j < N; ++j) {
    double prev = 0.0;
    for (int t = 0; t < T; ++t) {
      const double xi = scenarios.zeta(j, t) - prev;
      prev = scenarios.zeta(j, t);
      for (int k = 0; k < ng; ++k) {
        lp.A(r, nr + k) = xi;
        lp.rhs(r) = ramps(k);
        ++r;
        lp.A(r, nr + k) = -xi;
        lp.rhs(r) = ramps(k);
        ++r;
      }
    }
  }
  // sum(alpha) = 1 as a pair of <= rows.
  lp.A.block(r, nr, 1, ng).setOnes();
  lp.rhs(r) = 1.0;
  ++r;
  lp.A.block(r, nr, 1, ng).setConstant(-1.0);
  lp.rhs(r) = -1.0;
  ++r;
  if (outer) {
    lp.A.block(r, 0, J, nr) = outer->W;
    lp.rhs.segment(r, J) = outer->effective_b;
  }
  for (int c = 0; c < nr; ++c)
    lp.var_labels.push_back("p" + std::to_string(poly.reduced_gens[c] + 1));
  for (int k = 0; k < ng; ++k) lp.var_labels.push_back("alpha" + std::to_string(k + 1));
  return lp;
}

LpProblem build_scenario_lp_folded(const FeasibilityPolytope& poly, const CostFunction& cost,
                                   const ScenarioSet& scenarios, const AgcPolicy& policy,
                                   const Eigen::VectorXd& ramps, const OuterPolytope* outer) {
  check_shapes(poly, scenarios, policy, ramps);
  policy.validate();
  check_fixed_ramps(scenarios, policy, ramps);
  const int J = poly.rows();
  const Eigen::VectorXd walpha = poly.W * reduced_alpha(poly, policy);

  Eigen::VectorXd rhs = poly.b;  // tau = 0 block
  for (int j = 0; j < scenarios.size(); ++j)
    for (int t = 0; t < scenarios.horizon(); ++t) {
      const double z = scenarios.zeta(j, t);
      rhs = rhs.cwiseMin(poly.b - walpha * z);
    }
  if (outer) rhs = rhs.cwiseMin(outer->effective_b);

  LpProblem lp;
  lp.objective = cost.c;
  lp.objective_constant = cost.ct;
  lp.A = poly.W;
  lp.rhs = std::move(rhs);
  lp.lower = Eigen::VectorXd::Constant(poly.dim(), -kInf);
  lp.upper = Eigen::VectorXd::Constant(poly.dim(), kInf);
  for (int c = 0; c < poly.dim(); ++c)
    lp.var_labels.push_back("p" + std::to_string(poly.reduced_gens[c] + 1));
  for (int i = 0; i < J; ++i)
    lp.row_labels.push_back(std::string(row_kind_name(poly.row_labels[i].kind)) + " " +
                            std::to_string(poly.row_labels[i].source + 1));
  return lp;
}

Eigen::VectorXd ramp_vector(const GridCase& gc) {
  Eigen::VectorXd r(gc.generators.size());
  for (std::size_t k = 0; k < gc.generators.size(); ++k) r(k) = gc.generators[k].ramp_limit;
  return r;
}

AgcPolicy ramp_proportional_policy(const GridCase& gc, double deviation_bound) {
  const Eigen::VectorXd r = ramp_vector(gc);
  const double total = r.sum();
  if (!(total > 0.0)) throw validation_error("ramp-proportional policy needs positive ramps");
  AgcPolicy policy;
  policy.alpha = r / total;
  policy.alpha_ref = policy.alpha;
  policy.deviation_bound = deviation_bound;
  return policy;
}

DcopfResult solve_deterministic_dcopf(const GridCase& gc) {
  auto [poly, cost] = build_feasibility_polytope(gc);

  LpProblem lp;
  lp.objective = cost.c;
  lp.objective_constant = cost.ct;
  lp.A = poly.W;
  lp.rhs = poly.b;
  lp.lower = Eigen::VectorXd::Constant(poly.dim(), -kInf);
  lp.upper = Eigen::VectorXd::Constant(poly.dim(), kInf);

  DcopfResult res;
  res.solution = solve_lp(lp);
  if (res.solution.status == LpStatus::Optimal) {
    auto [dispatch, theta] = poly.reconstruct_state(res.solution.x);
    res.dispatch = std::move(dispatch);
    res.theta = std::move(theta);
  } else if (res.solution.status == LpStatus::Infeasible) {
    int row = res.solution.most_violated_row;
    if (row >= 0) {
      const RowLabel& lab = poly.row_labels[row];
      res.infeasibility_note = std::string(row_kind_name(lab.kind)) + " " +
                               (lab.kind == RowKind::AnglePlus || lab.kind == RowKind::AngleMinus
                                    ? "branch "
                                    : "generator ") +
                               std::to_string(lab.source + 1);
    }
  }
  return res;
}

}  // namespace ccopf
