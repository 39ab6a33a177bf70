#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ccopf/rng.hpp"

namespace ccopf {

struct RedundancySystem;  // redundancy.hpp

// Per-step disturbance magnitudes sigma^t (MW) over a horizon of T steps.
struct UncertaintyModel {
  Eigen::VectorXd sigma_step;  // length T, >= 0

  int horizon() const { return static_cast<int>(sigma_step.size()); }

  // sigma~^tau = sqrt(sum_{t<=tau} (sigma^t)^2); tau is 1-based.
  double cumulative_std(int tau) const;
  // All T cumulative values.
  Eigen::VectorXd cumulative_std_vector() const;
};

// AGC participation factors: alpha >= 0, sum alpha = 1,
// |alpha - alpha_ref|_inf <= deviation_bound.
struct AgcPolicy {
  Eigen::VectorXd alpha;      // length n_g
  Eigen::VectorXd alpha_ref;  // alpha^0
  double deviation_bound = 0.0;

  void validate() const;  // throws Validation on a broken invariant
};

// One AGC recourse step: the fleet absorbs the scalar mismatch xi in
// proportion to alpha, so total generation moves by exactly xi and every
// component moves with the sign of xi.
Eigen::VectorXd agc_step(const Eigen::VectorXd& p_prev, const AgcPolicy& policy, double xi);

enum class SamplerKind { Mc, Is };
const char* sampler_name(SamplerKind s);

// N disturbance trajectories as cumulative disbalances zeta^tau(j), MW.
struct ScenarioSet {
  Eigen::MatrixXd zeta;  // N x T
  SamplerKind sampler = SamplerKind::Mc;
  std::uint64_t seed = 0;
  std::string likelihood_note;

  int size() const { return static_cast<int>(zeta.rows()); }
  int horizon() const { return static_cast<int>(zeta.cols()); }
};

// Plain Monte-Carlo: independent xi^t ~ N(0, (sigma^t)^2), zeta = prefix sums.
ScenarioSet sample_mc_scenarios(const UncertaintyModel& model, int n, std::uint64_t seed);

// Gaussian conditioned on the half-space omega . x >= threshold.
// Draws z ~ N(0,I) and u ~ U(0,1); the marginal along phi_bar =
// Sigma^1/2 omega / |Sigma^1/2 omega| is pushed through the inverse-CDF
// of the truncated tail, the orthogonal complement is left untouched.
class PlaneConditionedSampler {
 public:
  PlaneConditionedSampler(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                          const Eigen::VectorXd& omega, double threshold);

  Eigen::VectorXd sample(CounterRng& rng) const;

  // Standardised plane distance (threshold - omega.mu)/|Sigma^1/2 omega|.
  double tau() const { return tau_; }
  // P(omega . x >= threshold) under the unconditioned Gaussian.
  double mass() const;

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sqrt_sigma_;
  Eigen::VectorXd phi_bar_;
  double tau_ = 0.0;
};

// One conditioned draw; Numerical error when the plane is out of reach
// (tau > 8, where Phi(tau) rounds to 1).
Eigen::VectorXd sample_plane_conditioned(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                                         const Eigen::VectorXd& omega, double threshold,
                                         std::uint64_t seed);

enum class MixtureWeights { Uniform, MassProportional };

// Mixture of plane-conditioned Gaussians over the active planes of a
// redundancy system: component i draws zeta ~ N(0, Sigma_zeta) conditioned
// on violating plane i.
class MixtureSampler {
 public:
  struct Component {
    Eigen::VectorXd normal;
    double threshold = 0.0;  // violation means normal . zeta > threshold
    double weight = 0.0;
    double mass = 0.0;       // unconditioned violation probability
    int plane_index = 0;     // row in the source system
  };

  const std::vector<Component>& components() const { return components_; }
  const std::string& note() const { return note_; }
  int horizon() const { return horizon_; }

  Eigen::VectorXd sample(CounterRng& rng) const;  // picks a plane, then draws

 private:
  friend MixtureSampler build_mixture(const RedundancySystem&, MixtureWeights);
  std::vector<Component> components_;
  std::vector<PlaneConditionedSampler> samplers_;
  std::vector<double> cumulative_weight_;
  std::string note_;
  int horizon_ = 0;
};

// Active planes only: zero normals and unreachable thresholds are excluded;
// errors when nothing remains. Default weights are uniform.
MixtureSampler build_mixture(const RedundancySystem& system,
                             MixtureWeights weights = MixtureWeights::Uniform);

// Importance sampling: every trajectory violates at least one plane of the
// redundancy polytope.
ScenarioSet sample_is_scenarios(const MixtureSampler& mixture, int n, std::uint64_t seed);

// CSV round-trip: metadata preamble, header, one trajectory per line.
std::string scenarios_csv(const ScenarioSet& set);
ScenarioSet parse_scenarios_csv(const std::string& text);

}  // namespace ccopf
