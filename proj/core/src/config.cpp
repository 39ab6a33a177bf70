#include "ccopf/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ccopf/errors.hpp"

namespace ccopf {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<double> parse_double_list(const std::string& val, int line) {
  std::vector<double> out;
  std::istringstream in(val);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw parse_error("config line " + std::to_string(line) + ": bad number '" + tok + "'");
    }
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& what) { throw parse_error("config: " + what); };
  if (!(eta > 0.0 && eta < 1.0)) bad("eta must lie in (0,1)");
  if (horizon < 1) bad("T must be >= 1");
  if (trials < 1) bad("L must be >= 1");
  if (n0 < 1 || n0 > nmax) bad("need 1 <= N_0 <= N_max");
  if (n_mc < 1) bad("N_mc must be >= 1");
  if (n_scenarios < 1) bad("N must be >= 1");
  if (sigma_scale < 0.0) bad("sigma_scale must be >= 0");
  if (delta_alpha < 0.0) bad("delta_alpha must be >= 0");
  if (alpha_mode == AlphaMode::Box && !(delta_alpha > 0.0)) bad("box mode needs delta_alpha > 0");
  for (double s : sigma_steps)
    if (s < 0.0) bad("sigma_steps entries must be >= 0");
  if (!sigma_steps.empty() && static_cast<int>(sigma_steps.size()) != horizon)
    bad("sigma_steps length must equal T");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    auto eq = raw.find('=');
    if (eq == std::string::npos)
      throw parse_error("config line " + std::to_string(line) + ": expected key = value");
    std::string key = trim(raw.substr(0, eq));
    std::string val = trim(raw.substr(eq + 1));
    auto num = [&](double lo, double hi) {
      try {
        double v = std::stod(val);
        if (v < lo || v > hi) throw std::out_of_range("range");
        return v;
      } catch (const std::exception&) {
        throw parse_error("config line " + std::to_string(line) + ": bad value for " + key);
      }
    };
    if (key == "case_path") cfg.case_path = val;
    else if (key == "eta") cfg.eta = num(1e-12, 1.0);
    else if (key == "T") cfg.horizon = static_cast<int>(num(1, 1e6));
    else if (key == "sigma_convention") {
      if (val == "cumulative") cfg.sigma_convention = SigmaConvention::Cumulative;
      else if (val == "per_step") cfg.sigma_convention = SigmaConvention::PerStep;
      else throw parse_error("config line " + std::to_string(line) +
                             ": sigma_convention must be cumulative|per_step");
    } else if (key == "sigma_scale") cfg.sigma_scale = num(0, 1e12);
    else if (key == "sigma_steps") cfg.sigma_steps = parse_double_list(val, line);
    else if (key == "L") cfg.trials = static_cast<int>(num(1, 1e9));
    else if (key == "N_0") cfg.n0 = static_cast<int>(num(1, 1e9));
    else if (key == "N_max") cfg.nmax = static_cast<int>(num(1, 1e9));
    else if (key == "N_mc") cfg.n_mc = static_cast<int>(num(1, 1e9));
    else if (key == "N") cfg.n_scenarios = static_cast<int>(num(1, 1e9));
    else if (key == "alpha_mode") {
      if (val == "fixed") cfg.alpha_mode = AlphaMode::Fixed;
      else if (val == "box") cfg.alpha_mode = AlphaMode::Box;
      else throw parse_error("config line " + std::to_string(line) + ": alpha_mode must be fixed|box");
    } else if (key == "delta_alpha") cfg.delta_alpha = num(0, 1);
    else if (key == "ramp_redundancy") {
      if (val == "deterministic") cfg.ramp_redundancy = RampRedundancy::Deterministic;
      else if (val == "sigma_normalized") cfg.ramp_redundancy = RampRedundancy::SigmaNormalized;
      else throw parse_error("config line " + std::to_string(line) +
                             ": ramp_redundancy must be deterministic|sigma_normalized");
    } else if (key == "mixture_weights") {
      if (val == "uniform") cfg.mixture_weights = MixtureWeights::Uniform;
      else if (val == "proportional") cfg.mixture_weights = MixtureWeights::MassProportional;
      else throw parse_error("config line " + std::to_string(line) +
                             ": mixture_weights must be uniform|proportional");
    } else if (key == "sampler") {
      if (val == "mc") cfg.sampler = SamplerChoice::Mc;
      else if (val == "is") cfg.sampler = SamplerChoice::Is;
      else if (val == "both") cfg.sampler = SamplerChoice::Both;
      else throw parse_error("config line " + std::to_string(line) + ": sampler must be mc|is|both");
    } else if (key == "seed") {
      try {
        cfg.seed = std::stoull(val);
      } catch (const std::exception&) {
        throw parse_error("config line " + std::to_string(line) + ": bad seed");
      }
    } else if (key == "output_dir") cfg.output_dir = val;
    else if (key == "threads") cfg.threads = static_cast<int>(num(0, 4096));
    else throw parse_error("config line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

UncertaintyModel make_uncertainty_model(const ExperimentConfig& cfg, const GridCase& gc) {
  UncertaintyModel model;
  model.sigma_step.resize(cfg.horizon);
  if (!cfg.sigma_steps.empty()) {
    for (int t = 0; t < cfg.horizon; ++t) model.sigma_step(t) = cfg.sigma_steps[t];
    return model;
  }
  // The nominal-fluctuation magnitude is per-unit; base_mva carries it to MW.
  const double scale = cfg.sigma_scale * static_cast<double>(gc.generators.size()) * gc.base_mva;
  if (cfg.sigma_convention == SigmaConvention::PerStep) {
    for (int t = 0; t < cfg.horizon; ++t) model.sigma_step(t) = scale * (t + 1);
  } else {
    // sigma~^t = scale * t; per-step values recover the cumulative profile.
    double prev_sq = 0.0;
    for (int t = 0; t < cfg.horizon; ++t) {
      const double cum = scale * (t + 1);
      model.sigma_step(t) = std::sqrt(cum * cum - prev_sq);
      prev_sq = cum * cum;
    }
  }
  return model;
}

}  // namespace ccopf
