#include "ccopf/redundancy.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ccopf/errors.hpp"
#include "ccopf/normal.hpp"
#include "detail_fmt.hpp"

namespace ccopf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kActiveTol = 1e-12;

// alpha restricted to the reduced (non-slack) generator coordinates.
Eigen::VectorXd reduced_alpha(const FeasibilityPolytope& poly, const AgcPolicy& policy) {
  if (policy.alpha.size() != poly.n_gens)
    throw validation_error("alpha length does not match generator count");
  Eigen::VectorXd out(poly.dim());
  for (int c = 0; c < poly.dim(); ++c) out(c) = policy.alpha(poly.reduced_gens[c]);
  return out;
}

}  // namespace

const char* plane_kind_name(PlaneKind k) {
  switch (k) {
    case PlaneKind::Security: return "security";
    case PlaneKind::RampUp: return "ramp_up";
    case PlaneKind::RampDown: return "ramp_down";
  }
  return "?";
}

OuterPolytope build_outer_polytope(const FeasibilityPolytope& poly, const AgcPolicy& policy,
                                   const UncertaintyModel& model, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw validation_error("eta must lie in (0,1)");
  const int J = poly.rows();
  const int T = model.horizon();
  const double quantile = norm_ppf(1.0 - eta);
  const Eigen::VectorXd exposure = (poly.W * reduced_alpha(poly, policy)).cwiseAbs();
  const Eigen::VectorXd sig = model.cumulative_std_vector();

  OuterPolytope out;
  out.eta = eta;
  out.W = poly.W;
  out.original_b = poly.b;
  out.thresholds.resize(J, T);
  for (int i = 0; i < J; ++i)
    for (int t = 0; t < T; ++t)
      out.thresholds(i, t) = poly.b(i) - quantile * sig(t) * exposure(i);
  out.effective_b = out.thresholds.rowwise().minCoeff().cwiseMin(poly.b);
  return out;
}

RedundancySystem build_redundancy_system(const FeasibilityPolytope& poly, const AgcPolicy& policy,
                                         const UncertaintyModel& model,
                                         const Eigen::VectorXd& ramps, double eta,
                                         RampRedundancy ramp_mode) {
  if (!(eta > 0.0 && eta < 1.0)) throw validation_error("eta must lie in (0,1)");
  if (ramps.size() != poly.n_gens)
    throw validation_error("ramp vector length does not match generator count");
  const int T = model.horizon();
  const double quantile = norm_ppf(1.0 - eta);
  const Eigen::VectorXd alpha_red = reduced_alpha(poly, policy);
  const Eigen::VectorXd proj = poly.W * alpha_red;
  const Eigen::VectorXd sig = model.cumulative_std_vector();

  RedundancySystem sys;
  sys.eta = eta;
  sys.alpha = policy.alpha;
  sys.sigma_tilde = sig;
  sys.horizon = T;

  bool any_active = false;
  for (int i = 0; i < poly.rows(); ++i) {
    if (std::abs(proj(i)) <= kActiveTol) continue;  // AGC cannot violate this row
    any_active = true;
    const double sgn = proj(i) > 0.0 ? 1.0 : -1.0;
    for (int t = 0; t < T; ++t) {
      PlaneRow row;
      row.kind = PlaneKind::Security;
      row.t = t + 1;
      row.source = i;
      row.normal = Eigen::VectorXd::Zero(T);
      row.normal(t) = sgn;
      row.raw_s = sig(t);
      row.threshold = quantile * sig(t);
      sys.rows.push_back(std::move(row));
    }
  }
  if (!any_active)
    throw validation_error(
        "redundancy system is degenerate: alpha is orthogonal to every polytope row");

  for (int k = 0; k < poly.n_gens; ++k) {
    const double ak = policy.alpha(k);
    for (int t = 0; t < T; ++t) {
      for (int dir = 0; dir < 2; ++dir) {
        const double sgn = dir == 0 ? 1.0 : -1.0;
        PlaneRow row;
        row.kind = dir == 0 ? PlaneKind::RampUp : PlaneKind::RampDown;
        row.t = t + 1;
        row.source = k;
        row.normal = Eigen::VectorXd::Zero(T);
        if (ramp_mode == RampRedundancy::Deterministic) {
          // First difference of the cumulative trajectory, zeta^0 = 0.
          if (ak > kActiveTol) {
            row.normal(t) = sgn * ak;
            if (t > 0) row.normal(t - 1) = -sgn * ak;
            row.threshold = ramps(k);
            row.raw_s = ramps(k);
          } else {
            row.threshold = kInf;  // vacuous, kept for the row-count contract
            row.raw_s = kInf;
          }
        } else {
          if (ak > kActiveTol && model.sigma_step(t) > 0.0) {
            row.normal(t) = sgn;
            row.raw_s = ramps(k) / (ak * model.sigma_step(t));
            row.threshold = quantile * row.raw_s;
          } else {
            row.threshold = kInf;
            row.raw_s = kInf;
          }
        }
        sys.rows.push_back(std::move(row));
      }
    }
  }
  return sys;
}

bool RedundancySystem::is_redundant(const Eigen::VectorXd& traj) const {
  if (traj.size() != horizon)
    throw validation_error("is_redundant: trajectory length " + std::to_string(traj.size()) +
                           " does not match horizon " + std::to_string(horizon));
  for (const auto& row : rows) {
    if (!std::isfinite(row.threshold)) continue;
    if (row.normal.dot(traj) > row.threshold + 1e-12) return false;
  }
  return true;
}

std::string redundancy_csv(const RedundancySystem& sys) {
  std::ostringstream out;
  out << "kind,t,source";
  for (int t = 1; t <= sys.horizon; ++t) out << ",n" << t;
  out << ",threshold\n";
  for (const auto& row : sys.rows) {
    out << plane_kind_name(row.kind) << ',' << row.t << ',' << row.source + 1;
    for (int t = 0; t < sys.horizon; ++t) out << ',' << detail::fmt_double(row.normal(t));
    out << ',' << (std::isfinite(row.threshold) ? detail::fmt_double(row.threshold) : "inf") << "\n";
  }
  return out.str();
}

}  // namespace ccopf
