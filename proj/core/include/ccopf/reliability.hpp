#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccopf/dc_polytope.hpp"
#include "ccopf/lp.hpp"
#include "ccopf/scenario_opt.hpp"
#include "ccopf/uncertainty.hpp"

namespace ccopf {

struct SolutionPoint {
  Eigen::VectorXd p0;     // reduced setpoint
  Eigen::VectorXd alpha;  // full participation vector
};

// Out-of-sample constraint-satisfaction probability: n_mc fresh plain-MC
// trajectories, each checked against every security row at tau = 1..T and
// every ramp limit under AGC recourse from p0. Always plain MC regardless
// of how the solution was trained.
double estimate_feasibility_probability(const SolutionPoint& sol, const FeasibilityPolytope& poly,
                                        const UncertaintyModel& model,
                                        const Eigen::VectorXd& ramps, int n_mc,
                                        std::uint64_t seed);

struct TrialRecord {
  double p_hat = 0.0;
  double objective = 0.0;
  LpStatus status = LpStatus::Optimal;
};

struct ReliabilityPoint {
  int n_scenarios = 0;
  std::vector<TrialRecord> trials;  // length L, trial index preserved
  double reliability = 0.0;         // #{P_hat >= 1 - eta} / L
  int infeasible_trials = 0;
};

struct ReliabilityReport {
  SamplerKind sampler = SamplerKind::Mc;
  double eta = 0.0;
  int trials_per_point = 0;
  int n_mc = 0;
  std::uint64_t seed = 0;
  std::string case_name;
  std::vector<ReliabilityPoint> points;

  // Smallest grid N whose reliability reaches `level`; -1 when none does.
  int first_n_reaching(double level) const;
  // Mean objective of the optimal trials at grid point N; NaN when absent.
  double mean_objective_at(int n_scenarios) const;
};

// Everything a reliability experiment needs besides (sampler, sizes, seed).
struct ExperimentSetup {
  FeasibilityPolytope poly;
  CostFunction cost;
  UncertaintyModel model;
  AgcPolicy policy;
  Eigen::VectorXd ramps;
  std::optional<MixtureSampler> mixture;  // required for the IS sampler
  int threads = 1;
};

// Repeated scenario-approximation trials over the N-grid N_0, N_0 + s, ...
// N_max with s = ceil(N_max / 10): per (N, l) a fresh scenario set is drawn
// on a substream keyed by (N index, l), the fixed-alpha LP is solved, and
// P_hat estimated out of sample. Infeasible trials score P_hat = 0 and are
// counted in the point metadata. Deterministic for a fixed seed, whatever
// the thread count.
ReliabilityReport estimate_reliability_curve(const ExperimentSetup& setup, SamplerKind sampler,
                                             double eta, int trials, int n0, int nmax, int n_mc,
                                             std::uint64_t seed);

// CSV emitters; several reports (e.g. mc and is) may share one file.
// summary: sampler,eta,N,reliability
// trials:  sampler,eta,N,trial,P_hat,objective,status
std::string reliability_summary_csv(const std::vector<ReliabilityReport>& reports);
std::string reliability_trials_csv(const std::vector<ReliabilityReport>& reports);

}  // namespace ccopf
