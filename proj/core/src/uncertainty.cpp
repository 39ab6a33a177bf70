#include "ccopf/uncertainty.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ccopf/errors.hpp"
#include "ccopf/normal.hpp"
#include "ccopf/redundancy.hpp"
#include "detail_fmt.hpp"

namespace ccopf {

namespace {

constexpr double kUnreachableTau = 8.0;

// Stream tags keep sampler families on disjoint substreams of one seed.
constexpr std::uint64_t kMcTag = 0x6d63;   // "mc"
constexpr std::uint64_t kIsTag = 0x6973;   // "is"

}  // namespace

double UncertaintyModel::cumulative_std(int tau) const {
  if (tau < 1 || tau > horizon())
    throw validation_error("cumulative_std: step " + std::to_string(tau) + " outside 1.." +
                           std::to_string(horizon()));
  double acc = 0.0;
  for (int t = 0; t < tau; ++t) acc += sigma_step(t) * sigma_step(t);
  return std::sqrt(acc);
}

Eigen::VectorXd UncertaintyModel::cumulative_std_vector() const {
  Eigen::VectorXd out(horizon());
  double acc = 0.0;
  for (int t = 0; t < horizon(); ++t) {
    acc += sigma_step(t) * sigma_step(t);
    out(t) = std::sqrt(acc);
  }
  return out;
}

void AgcPolicy::validate() const {
  if (alpha.size() == 0) throw validation_error("agc policy: empty alpha");
  if ((alpha.array() < 0.0).any()) throw validation_error("agc policy: negative participation factor");
  if (std::abs(alpha.sum() - 1.0) > 1e-9)
    throw validation_error("agc policy: participation factors must sum to 1");
  if (alpha_ref.size() == alpha.size() && deviation_bound >= 0.0) {
    if ((alpha - alpha_ref).cwiseAbs().maxCoeff() > deviation_bound + 1e-9)
      throw validation_error("agc policy: alpha strays beyond the deviation bound");
  }
}

Eigen::VectorXd agc_step(const Eigen::VectorXd& p_prev, const AgcPolicy& policy, double xi) {
  return p_prev + policy.alpha * xi;
}

const char* sampler_name(SamplerKind s) { return s == SamplerKind::Mc ? "mc" : "is"; }

ScenarioSet sample_mc_scenarios(const UncertaintyModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw validation_error("sample_mc_scenarios: need at least one scenario");
  const int T = model.horizon();
  ScenarioSet set;
  set.zeta.resize(n, T);
  set.sampler = SamplerKind::Mc;
  set.seed = seed;
  set.likelihood_note = "mc";
  for (int j = 0; j < n; ++j) {
    CounterRng rng = CounterRng::substream(seed, {kMcTag, static_cast<std::uint64_t>(j)});
    double acc = 0.0;
    for (int t = 0; t < T; ++t) {
      acc += model.sigma_step(t) * rng.next_gaussian();
      set.zeta(j, t) = acc;
    }
  }
  return set;
}

PlaneConditionedSampler::PlaneConditionedSampler(const Eigen::VectorXd& mu,
                                                 const Eigen::MatrixXd& sigma,
                                                 const Eigen::VectorXd& omega, double threshold)
    : mu_(mu) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != mu.size() || omega.size() != mu.size())
    throw validation_error("plane sampler: inconsistent dimensions");

  // Symmetric square root; small negative eigenvalues of a PSD input clamp
  // to zero.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success) throw numerical_error("plane sampler: eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  sqrt_sigma_ = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

  Eigen::VectorXd so = sqrt_sigma_ * omega;
  double norm = so.norm();
  if (norm <= 0.0)
    throw validation_error("plane sampler: Sigma^1/2 omega vanishes, constraint direction is degenerate");
  phi_bar_ = so / norm;
  tau_ = (threshold - omega.dot(mu)) / norm;
  if (tau_ > kUnreachableTau)
    throw numerical_error("unreachable plane: standardized distance " + std::to_string(tau_) +
                          " exceeds 8");
}

double PlaneConditionedSampler::mass() const { return norm_sf(tau_); }

Eigen::VectorXd PlaneConditionedSampler::sample(CounterRng& rng) const {
  const int d = static_cast<int>(mu_.size());
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.next_gaussian();
  const double u = rng.next_uniform();
  // y = Phi^-1(Phi(tau) + u (1 - Phi(tau))), evaluated through the upper
  // tail so deep truncations keep their precision.
  const double y = norm_isf((1.0 - u) * norm_sf(tau_));
  const Eigen::VectorXd phi = phi_bar_ * y + (z - phi_bar_ * phi_bar_.dot(z));
  return sqrt_sigma_ * phi + mu_;
}

Eigen::VectorXd sample_plane_conditioned(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                                         const Eigen::VectorXd& omega, double threshold,
                                         std::uint64_t seed) {
  PlaneConditionedSampler sampler(mu, sigma, omega, threshold);
  CounterRng rng = CounterRng::substream(seed, {0x706c616e65});  // "plane"
  return sampler.sample(rng);
}

MixtureSampler build_mixture(const RedundancySystem& system, MixtureWeights weights) {
  const int T = system.horizon;
  if (T < 1) throw validation_error("build_mixture: empty redundancy system");

  Eigen::MatrixXd sigma_zeta = Eigen::MatrixXd::Zero(T, T);
  for (int t = 0; t < T; ++t) sigma_zeta(t, t) = system.sigma_tilde(t) * system.sigma_tilde(t);
  const Eigen::VectorXd zero_mu = Eigen::VectorXd::Zero(T);

  MixtureSampler mix;
  mix.horizon_ = T;
  int skipped_zero = 0, skipped_far = 0;
  for (std::size_t i = 0; i < system.rows.size(); ++i) {
    const PlaneRow& row = system.rows[i];
    if (!std::isfinite(row.threshold) || row.normal.norm() <= 0.0) {
      ++skipped_zero;
      continue;
    }
    // Violating the plane means normal . zeta > threshold.
    double scale = 0.0;
    for (int t = 0; t < T; ++t) {
      double v = row.normal(t) * system.sigma_tilde(t);
      scale += v * v;
    }
    scale = std::sqrt(scale);
    if (scale <= 0.0) {
      ++skipped_zero;
      continue;
    }
    if (row.threshold / scale > kUnreachableTau) {
      ++skipped_far;
      continue;
    }
    MixtureSampler::Component comp;
    comp.normal = row.normal;
    comp.threshold = row.threshold;
    comp.mass = norm_sf(row.threshold / scale);
    comp.plane_index = static_cast<int>(i);
    mix.components_.push_back(std::move(comp));
    mix.samplers_.emplace_back(zero_mu, sigma_zeta, row.normal, row.threshold);
  }
  if (mix.components_.empty())
    throw validation_error(
        "build_mixture: no reachable plane; lower eta or shrink the polytope");

  const std::size_t k = mix.components_.size();
  if (weights == MixtureWeights::Uniform) {
    for (auto& c : mix.components_) c.weight = 1.0 / static_cast<double>(k);
  } else {
    double total = 0.0;
    for (const auto& c : mix.components_) total += c.mass;
    if (total <= 0.0) throw numerical_error("build_mixture: zero total violation mass");
    for (auto& c : mix.components_) c.weight = c.mass / total;
  }
  mix.cumulative_weight_.resize(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += mix.components_[i].weight;
    mix.cumulative_weight_[i] = acc;
  }
  mix.cumulative_weight_.back() = 1.0;

  std::ostringstream note;
  note << "mixture: " << k << " planes ("
       << (weights == MixtureWeights::Uniform ? "uniform" : "mass-proportional")
       << " weights, eta=" << system.eta << ", skipped " << skipped_zero << " inactive / "
       << skipped_far << " unreachable)";
  mix.note_ = note.str();
  return mix;
}

Eigen::VectorXd MixtureSampler::sample(CounterRng& rng) const {
  const double u = rng.next_uniform();
  std::size_t pick = 0;
  while (pick + 1 < cumulative_weight_.size() && u > cumulative_weight_[pick]) ++pick;
  return samplers_[pick].sample(rng);
}

ScenarioSet sample_is_scenarios(const MixtureSampler& mixture, int n, std::uint64_t seed) {
  if (n < 1) throw validation_error("sample_is_scenarios: need at least one scenario");
  ScenarioSet set;
  set.zeta.resize(n, mixture.horizon());
  set.sampler = SamplerKind::Is;
  set.seed = seed;
  set.likelihood_note = mixture.note();
  for (int j = 0; j < n; ++j) {
    CounterRng rng = CounterRng::substream(seed, {kIsTag, static_cast<std::uint64_t>(j)});
    set.zeta.row(j) = mixture.sample(rng).transpose();
  }
  return set;
}

std::string scenarios_csv(const ScenarioSet& set) {
  std::ostringstream out;
  out << "# ccopf-scenarios sampler=" << sampler_name(set.sampler) << " seed=" << set.seed
      << " T=" << set.horizon() << " N=" << set.size() << " note=" << set.likelihood_note << "\n";
  for (int t = 1; t <= set.horizon(); ++t) out << (t > 1 ? "," : "") << "zeta_" << t;
  out << "\n";
  for (int j = 0; j < set.size(); ++j) {
    for (int t = 0; t < set.horizon(); ++t) out << (t > 0 ? "," : "") << detail::fmt_double(set.zeta(j, t));
    out << "\n";
  }
  return out.str();
}

ScenarioSet parse_scenarios_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ccopf-scenarios", 0) != 0)
    throw parse_error("scenario csv: missing metadata preamble");

  ScenarioSet set;
  {
    std::istringstream meta(line.substr(std::string("# ccopf-scenarios").size()));
    std::string tok;
    while (meta >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "sampler") {
        if (val != "mc" && val != "is") throw parse_error("scenario csv: unknown sampler " + val);
        set.sampler = val == "mc" ? SamplerKind::Mc : SamplerKind::Is;
      } else if (key == "seed") {
        try {
          set.seed = std::stoull(val);
        } catch (const std::exception&) {
          throw parse_error("scenario csv: bad seed '" + val + "'");
        }
      } else if (key == "note") {
        std::string rest;
        std::getline(meta, rest);
        set.likelihood_note = val + rest;
      }
    }
  }
  if (!std::getline(in, line)) throw parse_error("scenario csv: missing header row");

  std::vector<std::vector<double>> rows;
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw parse_error("scenario csv: bad number '" + cell + "' at line " +
                          std::to_string(lineno));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw parse_error("scenario csv: ragged row at line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("scenario csv: no trajectories");
  set.zeta.resize(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t t = 0; t < rows[j].size(); ++t)
      set.zeta(static_cast<int>(j), static_cast<int>(t)) = rows[j][t];
  return set;
}

}  // namespace ccopf
