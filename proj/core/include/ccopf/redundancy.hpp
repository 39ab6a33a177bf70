#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ccopf/dc_polytope.hpp"
#include "ccopf/uncertainty.hpp"

namespace ccopf {

enum class PlaneKind { Security, RampUp, RampDown };
const char* plane_kind_name(PlaneKind k);

enum class RampRedundancy {
  Deterministic,    // |alpha_k (zeta^t - zeta^{t-1})| <= R_k, no quantile factor
  SigmaNormalized,  // identity blocks with S = R_k / (alpha_k sigma^t)
};

// One plane of the redundancy polytope P_r over trajectory coordinates
// zeta = (zeta^1..zeta^T): inside means normal . zeta <= threshold.
struct PlaneRow {
  PlaneKind kind;
  int t;                   // 1-based time index
  int source;              // W-row index for security, generator index for ramps
  Eigen::VectorXd normal;  // length T
  double threshold;        // final rhs; +inf marks a vacuous row
  double raw_s;            // S-entry before the Phi^-1(1-eta) factor
};

// Trajectories inside every plane are redundant: excluding them from a
// scenario approximation built on top of the outer polytope leaves the
// optimum unchanged.
struct RedundancySystem {
  std::vector<PlaneRow> rows;
  double eta = 0.0;
  Eigen::VectorXd alpha;        // the fixed alpha^0 the system was built for
  Eigen::VectorXd sigma_tilde;  // cumulative stds, length T
  int horizon = 0;

  bool is_redundant(const Eigen::VectorXd& traj) const;
};

// Necessary-feasibility tightening of each polytope row:
// omega_i . p <= b_i - Phi^-1(1-eta) sigma~^t |omega_i . alpha~|.
struct OuterPolytope {
  Eigen::MatrixXd thresholds;   // J x T tightened rhs per (row, t)
  Eigen::VectorXd effective_b;  // min over t (the t = T column: sigma~ grows)
  Eigen::VectorXd original_b;
  Eigen::MatrixXd W;            // row geometry shared with the source polytope
  double eta = 0.0;
};

OuterPolytope build_outer_polytope(const FeasibilityPolytope& poly, const AgcPolicy& policy,
                                   const UncertaintyModel& model, double eta);

// Security planes for every W-row with omega . alpha~ != 0 at every t, plus
// ramp-up/ramp-down planes per generator and step (vacuous when alpha_k = 0).
RedundancySystem build_redundancy_system(const FeasibilityPolytope& poly, const AgcPolicy& policy,
                                         const UncertaintyModel& model,
                                         const Eigen::VectorXd& ramps, double eta,
                                         RampRedundancy ramp_mode = RampRedundancy::Deterministic);

// Labeled CSV (kind, t, source, normal..., threshold) for inspection.
std::string redundancy_csv(const RedundancySystem& system);

}  // namespace ccopf
