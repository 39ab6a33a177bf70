#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ccopf/grid_case.hpp"
#include "ccopf/redundancy.hpp"
#include "ccopf/scenario_opt.hpp"
#include "ccopf/uncertainty.hpp"

namespace ccopf {

enum class SigmaConvention { Cumulative, PerStep };
enum class SamplerChoice { Mc, Is, Both };

// Flat key-value experiment configuration. File values first, CLI flags
// override. All randomness flows from `seed`.
struct ExperimentConfig {
  std::string case_path;
  double eta = 0.01;
  int horizon = 5;  // T
  SigmaConvention sigma_convention = SigmaConvention::Cumulative;
  double sigma_scale = 0.01;
  std::vector<double> sigma_steps;  // explicit per-step MW override
  int trials = 200;                 // L
  int n0 = 3;
  int nmax = 453;
  int n_mc = 10000;
  int n_scenarios = 93;             // single-instance solve
  AlphaMode alpha_mode = AlphaMode::Fixed;
  double delta_alpha = 0.0;
  RampRedundancy ramp_redundancy = RampRedundancy::Deterministic;
  MixtureWeights mixture_weights = MixtureWeights::Uniform;
  SamplerChoice sampler = SamplerChoice::Both;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;  // throws Parse on out-of-range values
};

// `key = value` lines, '#' comments. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// sigma~^t = sigma_scale * t * n_g * base_mva (cumulative convention) or the
// same expression applied per step; explicit sigma_steps win when present.
UncertaintyModel make_uncertainty_model(const ExperimentConfig& cfg, const GridCase& gc);

}  // namespace ccopf
