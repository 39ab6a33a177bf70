#include "ccopf/reliability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "ccopf/errors.hpp"

namespace ccopf {

namespace {

constexpr double kTol = 1e-9;
constexpr std::uint64_t kEvalTag = 0x6576616c;   // "eval"
constexpr std::uint64_t kTrialTag = 0x747269616c; // "trial"

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// The scenario blocks collapse to a 1-D band in the scalar disturbance:
// with slack_i = b_i - w_i . p0, a state p0 + alpha~ zeta stays feasible
// iff lo <= zeta <= hi for precomputed band edges.
struct FeasibilityBand {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double ramp_bound = std::numeric_limits<double>::infinity();  // |xi| cap
  bool p0_feasible = true;
};

FeasibilityBand make_band(const SolutionPoint& sol, const FeasibilityPolytope& poly,
                          const Eigen::VectorXd& ramps) {
  FeasibilityBand band;
  AgcPolicy policy;
  policy.alpha = sol.alpha;
  const Eigen::VectorXd walpha = poly.W * reduced_alpha(poly, policy);
  const Eigen::VectorXd slack = poly.b - poly.W * sol.p0;
  if ((slack.array() < -kTol).any()) {
    band.p0_feasible = false;
    return band;
  }
  for (int i = 0; i < slack.size(); ++i) {
    const double w = walpha(i);
    const double s = slack(i) + kTol;
    if (w > kTol) {
      band.hi = std::min(band.hi, s / w);
    } else if (w < -kTol) {
      band.lo = std::max(band.lo, s / w);
    }
  }
  for (int k = 0; k < sol.alpha.size(); ++k)
    if (sol.alpha(k) > 0.0)
      band.ramp_bound = std::min(band.ramp_bound, (ramps(k) + kTol) / sol.alpha(k));
  return band;
}

}  // namespace

double estimate_feasibility_probability(const SolutionPoint& sol, const FeasibilityPolytope& poly,
                                        const UncertaintyModel& model,
                                        const Eigen::VectorXd& ramps, int n_mc,
                                        std::uint64_t seed) {
  if (n_mc < 1) throw validation_error("estimate_feasibility_probability: n_mc must be >= 1");
  if (sol.p0.size() != poly.dim() || sol.alpha.size() != poly.n_gens ||
      ramps.size() != poly.n_gens)
    throw validation_error("estimate_feasibility_probability: solution dimensions do not match");
  const FeasibilityBand band = make_band(sol, poly, ramps);
  if (!band.p0_feasible) return 0.0;

  const int T = model.horizon();
  long ok = 0;
  for (int j = 0; j < n_mc; ++j) {
    CounterRng rng = CounterRng::substream(seed, {kEvalTag, static_cast<std::uint64_t>(j)});
    double zeta = 0.0;
    bool good = true;
    for (int t = 0; t < T && good; ++t) {
      const double xi = model.sigma_step(t) * rng.next_gaussian();
      zeta += xi;
      good = std::abs(xi) <= band.ramp_bound && zeta >= band.lo && zeta <= band.hi;
    }
    ok += good;
  }
  return static_cast<double>(ok) / static_cast<double>(n_mc);
}

int ReliabilityReport::first_n_reaching(double level) const {
  for (const auto& pt : points)
    if (pt.reliability >= level - 1e-12) return pt.n_scenarios;
  return -1;
}

double ReliabilityReport::mean_objective_at(int n_scenarios) const {
  for (const auto& pt : points) {
    if (pt.n_scenarios != n_scenarios) continue;
    double acc = 0.0;
    int k = 0;
    for (const auto& tr : pt.trials)
      if (tr.status == LpStatus::Optimal) {
        acc += tr.objective;
        ++k;
      }
    return k > 0 ? acc / k : std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

ReliabilityReport estimate_reliability_curve(const ExperimentSetup& setup, SamplerKind sampler,
                                             double eta, int trials, int n0, int nmax, int n_mc,
                                             std::uint64_t seed) {
  if (trials < 1) throw validation_error("reliability curve: need at least one trial");
  if (n0 < 1 || n0 > nmax) throw validation_error("reliability curve: need 1 <= N_0 <= N_max");
  if (!(eta > 0.0 && eta < 1.0)) throw validation_error("reliability curve: eta outside (0,1)");
  if (sampler == SamplerKind::Is && !setup.mixture.has_value())
    throw validation_error("reliability curve: IS sampler needs a mixture");

  const int step = (nmax + 9) / 10;  // ceil(N_max / 10)
  std::vector<int> grid;
  for (int n = n0; n <= nmax; n += step) grid.push_back(n);

  ReliabilityReport report;
  report.sampler = sampler;
  report.eta = eta;
  report.trials_per_point = trials;
  report.n_mc = n_mc;
  report.seed = seed;
  report.points.resize(grid.size());

  const std::uint64_t tag =
      sampler == SamplerKind::Mc ? 0x72656c2d6d63ULL : 0x72656c2d6973ULL;  // "rel-mc"/"rel-is"

  auto run_trial = [&](int gi, int l) -> TrialRecord {
    const int n = grid[gi];
    const std::uint64_t scen_seed = CounterRng::derive_key(
        seed, {tag, kTrialTag, static_cast<std::uint64_t>(gi), static_cast<std::uint64_t>(l), 0});
    const std::uint64_t eval_seed = CounterRng::derive_key(
        seed, {tag, kTrialTag, static_cast<std::uint64_t>(gi), static_cast<std::uint64_t>(l), 1});
    TrialRecord rec;
    try {
      const ScenarioSet scen = sampler == SamplerKind::Mc
                                   ? sample_mc_scenarios(setup.model, n, scen_seed)
                                   : sample_is_scenarios(*setup.mixture, n, scen_seed);
      const LpProblem lp =
          build_scenario_lp_folded(setup.poly, setup.cost, scen, setup.policy, setup.ramps);
      const LpSolution ls = solve_lp(lp);
      rec.status = ls.status;
      if (ls.status == LpStatus::Optimal) {
        rec.objective = ls.objective;
        SolutionPoint sol{ls.x, setup.policy.alpha};
        rec.p_hat =
            estimate_feasibility_probability(sol, setup.poly, setup.model, setup.ramps, n_mc, eval_seed);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
      rec.status = LpStatus::Infeasible;  // ramp facts ruled the trial out
    }
    return rec;
  };

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    auto& point = report.points[gi];
    point.n_scenarios = grid[gi];
    point.trials.resize(trials);

    const int nthreads = std::max(1, setup.threads);
    if (nthreads == 1) {
      for (int l = 0; l < trials; ++l) point.trials[l] = run_trial(static_cast<int>(gi), l);
    } else {
      std::vector<std::thread> pool;
      std::atomic<int> next{0};
      for (int w = 0; w < nthreads; ++w)
        pool.emplace_back([&]() {
          for (int l = next.fetch_add(1); l < trials; l = next.fetch_add(1))
            point.trials[l] = run_trial(static_cast<int>(gi), l);
        });
      for (auto& th : pool) th.join();
    }

    int hits = 0;
    for (const auto& tr : point.trials) {
      if (tr.p_hat >= 1.0 - eta - 1e-12) ++hits;
      if (tr.status != LpStatus::Optimal) ++point.infeasible_trials;
    }
    point.reliability = static_cast<double>(hits) / static_cast<double>(trials);
  }
  return report;
}

std::string reliability_summary_csv(const std::vector<ReliabilityReport>& reports) {
  std::ostringstream out;
  out << "sampler,eta,N,reliability\n";
  for (const auto& rep : reports)
    for (const auto& pt : rep.points)
      out << sampler_name(rep.sampler) << ',' << fmt(rep.eta) << ',' << pt.n_scenarios << ','
          << fmt(pt.reliability) << "\n";
  return out.str();
}

std::string reliability_trials_csv(const std::vector<ReliabilityReport>& reports) {
  std::ostringstream out;
  out << "sampler,eta,N,trial,P_hat,objective,status\n";
  for (const auto& rep : reports)
    for (const auto& pt : rep.points)
      for (std::size_t l = 0; l < pt.trials.size(); ++l) {
        const auto& tr = pt.trials[l];
        out << sampler_name(rep.sampler) << ',' << fmt(rep.eta) << ',' << pt.n_scenarios << ','
            << l + 1 << ',' << fmt(tr.p_hat) << ',' << fmt(tr.objective) << ','
            << lp_status_name(tr.status) << "\n";
      }
  return out.str();
}

}  // namespace ccopf
