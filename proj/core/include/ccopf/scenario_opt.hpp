#pragma once

#include <Eigen/Dense>
#include <string>

#include "ccopf/dc_polytope.hpp"
#include "ccopf/grid_case.hpp"
#include "ccopf/lp.hpp"
#include "ccopf/redundancy.hpp"
#include "ccopf/uncertainty.hpp"

namespace ccopf {

enum class AlphaMode { Fixed, Box };

// alpha restricted to the reduced generator coordinates (slack dropped).
Eigen::VectorXd reduced_alpha(const FeasibilityPolytope& poly, const AgcPolicy& policy);

// Scenario-approximation LP over the reduced setpoint p^0 (and alpha in box
// mode). Per scenario j and tau = 0..T one block
//     W p^0 + (W alpha~) zeta^tau(j) <= b,
// ramp limits |alpha_k xi^t(j)| <= R_k as rows in box mode; in fixed mode
// they are constants, checked at build time (an Infeasible error names the
// offending scenario, step and generator). Box mode appends alpha bounds
// and the two rows pinning sum(alpha) = 1. When `outer` is given its
// tightened rows W p^0 <= b_out join the system (the tightening is the one
// computed for alpha^0, also in box mode).
//
// Row order: scenario blocks (j-major, tau-minor), ramp rows (box mode),
// the two simplex rows (box mode), outer rows.
LpProblem build_scenario_lp(const FeasibilityPolytope& poly, const CostFunction& cost,
                            const ScenarioSet& scenarios, const AgcPolicy& policy,
                            const Eigen::VectorXd& ramps, AlphaMode mode,
                            const OuterPolytope* outer = nullptr);

// Fixed-alpha equivalent with the scenario blocks folded row-wise:
// J rows with rhs_i = min over (j, tau) of b_i - (w_i . alpha~) zeta^tau(j).
// Same feasible set and optimum as the full block LP; used for large
// trial counts.
LpProblem build_scenario_lp_folded(const FeasibilityPolytope& poly, const CostFunction& cost,
                                   const ScenarioSet& scenarios, const AgcPolicy& policy,
                                   const Eigen::VectorXd& ramps,
                                   const OuterPolytope* outer = nullptr);

struct DcopfResult {
  LpSolution solution;
  Eigen::VectorXd dispatch;  // full generation, MW (optimal exits)
  Eigen::VectorXd theta;     // bus angles, radians
  std::string infeasibility_note;  // most violated row label on infeasible exits
};

// Deterministic DC-OPF: min c . p + ct over W p <= b.
DcopfResult solve_deterministic_dcopf(const GridCase& gc);

// Ramp limits straight off the case, MW per step.
Eigen::VectorXd ramp_vector(const GridCase& gc);

// alpha^0 proportional to generator ramp limits.
AgcPolicy ramp_proportional_policy(const GridCase& gc, double deviation_bound = 0.0);

}  // namespace ccopf
