// Command-line front end: polytope construction, single scenario-approximation
// solves, reliability curves and the mc-vs-is comparison.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "ccopf/case_io.hpp"
#include "ccopf/config.hpp"
#include "ccopf/errors.hpp"
#include "ccopf/reliability.hpp"

namespace fs = std::filesystem;
using namespace ccopf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct CliOverrides {
  std::string config_path;
  std::string case_path;
  std::string out_dir;
  std::string sampler;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_scenarios;
  std::optional<double> eta;
};

ExperimentConfig resolve_config(const CliOverrides& ov) {
  ExperimentConfig cfg;
  if (!ov.config_path.empty()) cfg = load_config(ov.config_path);
  if (!ov.case_path.empty()) cfg.case_path = ov.case_path;
  if (!ov.out_dir.empty()) cfg.output_dir = ov.out_dir;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.n_scenarios) cfg.n_scenarios = *ov.n_scenarios;
  if (ov.eta) cfg.eta = *ov.eta;
  if (!ov.sampler.empty()) {
    if (ov.sampler == "mc") cfg.sampler = SamplerChoice::Mc;
    else if (ov.sampler == "is") cfg.sampler = SamplerChoice::Is;
    else if (ov.sampler == "both") cfg.sampler = SamplerChoice::Both;
    else throw parse_error("unknown sampler '" + ov.sampler + "' (expected mc|is|both)");
  }
  cfg.validate();
  if (cfg.case_path.empty()) throw parse_error("no case file given (config case_path or --case)");
  return cfg;
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw parse_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

struct Pipeline {
  GridCase grid;
  FeasibilityPolytope poly;
  CostFunction cost;
  UncertaintyModel model;
  AgcPolicy policy;
  Eigen::VectorXd ramps;
};

Pipeline build_pipeline(const ExperimentConfig& cfg) {
  Pipeline p;
  p.grid = load_case(cfg.case_path);
  auto built = build_feasibility_polytope(p.grid);
  p.poly = std::move(built.first);
  p.cost = std::move(built.second);
  p.model = make_uncertainty_model(cfg, p.grid);
  p.policy = ramp_proportional_policy(p.grid, cfg.delta_alpha);
  p.ramps = ramp_vector(p.grid);
  return p;
}

MixtureSampler build_pipeline_mixture(const Pipeline& p, const ExperimentConfig& cfg) {
  const RedundancySystem rsys = build_redundancy_system(p.poly, p.policy, p.model, p.ramps,
                                                        cfg.eta, cfg.ramp_redundancy);
  return build_mixture(rsys, cfg.mixture_weights);
}

int effective_threads(const ExperimentConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

int cmd_polytope(const std::string& case_path, const std::string& out_dir) {
  GridCase gc = load_case(case_path);
  auto [poly, cost] = build_feasibility_polytope(gc);
  std::printf("case %s: J=%d n_g=%d m=%d n=%d\n", gc.name.c_str(), poly.rows(), poly.n_gens,
              poly.n_branches, poly.n_buses);
  write_atomically(fs::path(out_dir) / "polytope.csv", polytope_csv(poly));
  write_atomically(fs::path(out_dir) / "polytope.txt", polytope_text_dump(poly));
  std::printf("wrote %s and %s\n", (fs::path(out_dir) / "polytope.csv").c_str(),
              (fs::path(out_dir) / "polytope.txt").c_str());
  return kExitOk;
}

int cmd_solve(const ExperimentConfig& cfg) {
  Pipeline p = build_pipeline(cfg);
  const SamplerKind sampler =
      cfg.sampler == SamplerChoice::Is ? SamplerKind::Is : SamplerKind::Mc;

  ScenarioSet scen;
  if (sampler == SamplerKind::Is) {
    MixtureSampler mixture = build_pipeline_mixture(p, cfg);
    scen = sample_is_scenarios(mixture, cfg.n_scenarios, cfg.seed);
  } else {
    scen = sample_mc_scenarios(p.model, cfg.n_scenarios, cfg.seed);
  }

  LpSolution sol;
  Eigen::VectorXd slack;
  std::vector<std::string> row_names;
  if (cfg.alpha_mode == AlphaMode::Fixed) {
    LpProblem lp = build_scenario_lp_folded(p.poly, p.cost, scen, p.policy, p.ramps);
    sol = solve_lp(lp);
    if (sol.status == LpStatus::Optimal) slack = lp.rhs - lp.A * sol.x;
    row_names = lp.row_labels;
    write_atomically(fs::path(cfg.output_dir) / "instance.lp", lp_export_text(lp));
  } else {
    LpProblem lp = build_scenario_lp(p.poly, p.cost, scen, p.policy, p.ramps, AlphaMode::Box);
    sol = solve_lp(lp);
    if (sol.status == LpStatus::Optimal) {
      // report slacks against the folded geometry for readability
      Eigen::VectorXd p0 = sol.x.head(p.poly.dim());
      slack = p.poly.b - p.poly.W * p0;
      for (int i = 0; i < p.poly.rows(); ++i)
        row_names.push_back(std::string(row_kind_name(p.poly.row_labels[i].kind)) + " " +
                            std::to_string(p.poly.row_labels[i].source + 1));
    }
    write_atomically(fs::path(cfg.output_dir) / "instance.lp", lp_export_text(lp));
  }
  write_atomically(fs::path(cfg.output_dir) / "scenarios.csv", scenarios_csv(scen));

  std::ostringstream report;
  report << "sampler " << sampler_name(sampler) << " N " << scen.size() << " seed " << cfg.seed
         << "\n";
  report << "status " << lp_status_name(sol.status) << "\n";
  if (sol.status == LpStatus::Optimal) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", sol.objective);
    report << "objective " << buf << "\n";
    for (int i = 0; i < slack.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.10g", slack(i));
      report << "slack " << (i < static_cast<int>(row_names.size()) ? row_names[i] : "row") << " "
             << buf << "\n";
    }
  }
  std::fputs(report.str().c_str(), stdout);
  write_atomically(fs::path(cfg.output_dir) / "solve_report.txt", report.str());
  return sol.status == LpStatus::Optimal ? kExitOk : kExitInfeasible;
}

int cmd_reliability(const ExperimentConfig& cfg, bool force_both) {
  Pipeline p = build_pipeline(cfg);
  ExperimentSetup setup{p.poly, p.cost, p.model, p.policy, p.ramps, std::nullopt,
                        effective_threads(cfg)};

  const bool want_mc = force_both || cfg.sampler != SamplerChoice::Is;
  const bool want_is = force_both || cfg.sampler != SamplerChoice::Mc;
  if (want_is) setup.mixture = build_pipeline_mixture(p, cfg);

  std::vector<ReliabilityReport> reports;
  for (SamplerKind kind : {SamplerKind::Mc, SamplerKind::Is}) {
    if ((kind == SamplerKind::Mc && !want_mc) || (kind == SamplerKind::Is && !want_is)) continue;
    ReliabilityReport rep = estimate_reliability_curve(setup, kind, cfg.eta, cfg.trials, cfg.n0,
                                                       cfg.nmax, cfg.n_mc, cfg.seed);
    rep.case_name = p.grid.name;
    for (const auto& pt : rep.points)
      std::printf("%s eta=%g N=%d reliability=%.4f (infeasible trials: %d)\n",
                  sampler_name(kind), cfg.eta, pt.n_scenarios, pt.reliability,
                  pt.infeasible_trials);
    reports.push_back(std::move(rep));
  }

  write_atomically(fs::path(cfg.output_dir) / "reliability_summary.csv",
                   reliability_summary_csv(reports));
  write_atomically(fs::path(cfg.output_dir) / "reliability_trials.csv",
                   reliability_trials_csv(reports));

  if (force_both) {
    DcopfResult det = solve_deterministic_dcopf(p.grid);
    std::ostringstream cmp;
    cmp << "sampler,eta,N_star,cost_at_N_star,dcopf_cost\n";
    for (const auto& rep : reports) {
      int nstar = rep.first_n_reaching(0.99);
      double cost = nstar > 0 ? rep.mean_objective_at(nstar)
                              : std::numeric_limits<double>::quiet_NaN();
      char line[256];
      std::snprintf(line, sizeof line, "%s,%g,%d,%.10g,%.10g\n", sampler_name(rep.sampler),
                    cfg.eta, nstar, cost, det.solution.objective);
      cmp << line;
      std::printf("%s reaches 0.99 reliability at N=%d, mean cost %.6g (dc-opf %.6g)\n",
                  sampler_name(rep.sampler), nstar, cost, det.solution.objective);
    }
    write_atomically(fs::path(cfg.output_dir) / "compare.csv", cmp.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chance-constrained DC-OPF scenario toolkit"};
  app.require_subcommand(1);

  CliOverrides ov;
  app.add_option("--config", ov.config_path, "experiment config file");
  app.add_option("--seed", ov.seed, "master seed override");
  app.add_option("--sampler", ov.sampler, "mc|is|both");
  app.add_option("--out", ov.out_dir, "output directory");
  app.add_option("--case", ov.case_path, "case file override");
  app.add_option("--n", ov.n_scenarios, "scenario count for solve");
  app.add_option("--eta", ov.eta, "confidence parameter");

  std::string polytope_case;
  auto* sub_poly = app.add_subcommand("polytope", "build and export W p <= b");
  sub_poly->add_option("case", polytope_case, "grid case file")->required();
  auto* sub_solve = app.add_subcommand("solve", "solve one scenario-approximation instance");
  auto* sub_rel = app.add_subcommand("reliability", "empirical reliability curve (Monte-Carlo)");
  auto* sub_cmp = app.add_subcommand("compare", "mc vs is reliability comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (sub_poly->parsed()) {
      return cmd_polytope(polytope_case, ov.out_dir.empty() ? "out" : ov.out_dir);
    }
    ExperimentConfig cfg = resolve_config(ov);
    if (sub_solve->parsed()) return cmd_solve(cfg);
    if (sub_rel->parsed()) return cmd_reliability(cfg, false);
    if (sub_cmp->parsed()) return cmd_reliability(cfg, true);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case ErrorKind::Parse:
      case ErrorKind::Validation: return kExitInput;
      case ErrorKind::Infeasible: return kExitInfeasible;
      case ErrorKind::Numerical: return kExitNumerical;
    }
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
