#include "test_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct HalfSpace {
  Eigen::VectorXd a;
  double b;
  bool synthetic;  // part of the auxiliary box
};

}  // namespace

LpReference enumerate_lp(const ccopf::LpProblem& lp, double box_m) {
  const int n = lp.num_vars();
  std::vector<HalfSpace> rows;
  for (int i = 0; i < lp.num_rows(); ++i)
    rows.push_back({lp.A.row(i).transpose(), lp.rhs(i), false});
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(j) = 1.0;
    if (std::isfinite(lp.upper(j))) rows.push_back({e, lp.upper(j), false});
    if (std::isfinite(lp.lower(j))) rows.push_back({-e, -lp.lower(j), false});
    rows.push_back({e, box_m, true});
    rows.push_back({-e, box_m, true});
  }

  const int total = static_cast<int>(rows.size());
  std::vector<int> pick(n);
  LpReference best{ccopf::LpStatus::Infeasible, kInf, Eigen::VectorXd()};
  bool best_on_box = false;

  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd M(n, n);
      Eigen::VectorXd r(n);
      for (int k = 0; k < n; ++k) {
        M.row(k) = rows[pick[k]].a.transpose();
        r(k) = rows[pick[k]].b;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd x = lu.solve(r);
      for (int i = 0; i < total; ++i)
        if (rows[i].a.dot(x) > rows[i].b + 1e-7) return;
      double obj = lp.objective.dot(x) + lp.objective_constant;
      if (obj < best.objective - 1e-12) {
        bool on_box = false;
        for (int k = 0; k < n; ++k) on_box = on_box || rows[pick[k]].synthetic;
        best = {ccopf::LpStatus::Optimal, obj, x};
        best_on_box = on_box;
      }
      return;
    }
    for (int i = start; i < total; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (n == 0) {
    bool ok = true;
    for (const auto& row : rows) ok = ok && row.b >= -1e-9;
    return {ok ? ccopf::LpStatus::Optimal : ccopf::LpStatus::Infeasible, lp.objective_constant,
            Eigen::VectorXd()};
  }
  rec(0, 0);
  if (best.status == ccopf::LpStatus::Optimal && best_on_box) {
    // Optimum sits on the auxiliary box: the true problem is unbounded
    // (random instances do not graze the box otherwise).
    return {ccopf::LpStatus::Unbounded, -kInf, Eigen::VectorXd()};
  }
  return best;
}

bool dc_state_feasible(const ccopf::GridCase& gc, const Eigen::VectorXd& reduced, double tol) {
  const int n = static_cast<int>(gc.buses.size());
  const int ng = static_cast<int>(gc.generators.size());
  const int k0 = gc.slack_generator();
  const int s = gc.bus_index(gc.slack_bus);

  // Full dispatch: slack generator balances total demand.
  Eigen::VectorXd pg(ng);
  {
    int c = 0;
    double rest = 0.0;
    for (int k = 0; k < ng; ++k) {
      if (k == k0) continue;
      pg(k) = reduced(c++);
      rest += pg(k);
    }
    pg(k0) = gc.total_demand() - rest;
  }

  // Own Laplacian assembly and grounded solve, in per-unit.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& br : gc.branches) {
    int i = gc.bus_index(br.from_bus), j = gc.bus_index(br.to_bus);
    lap(i, j) -= br.susceptance;
    lap(j, i) -= br.susceptance;
    lap(i, i) += br.susceptance;
    lap(j, j) += br.susceptance;
  }
  Eigen::VectorXd inj = Eigen::VectorXd::Zero(n);  // per-unit injections
  for (int k = 0; k < ng; ++k) inj(gc.bus_index(gc.generators[k].bus)) += pg(k) / gc.base_mva;
  for (int i = 0; i < n; ++i) inj(i) -= gc.buses[i].demand / gc.base_mva;

  Eigen::MatrixXd lap_red(n - 1, n - 1);
  Eigen::VectorXd inj_red(n - 1);
  {
    int r = 0;
    for (int i = 0; i < n; ++i) {
      if (i == s) continue;
      int c = 0;
      for (int j = 0; j < n; ++j) {
        if (j == s) continue;
        lap_red(r, c++) = lap(i, j);
      }
      inj_red(r++) = inj(i);
    }
  }
  Eigen::VectorXd theta_red = Eigen::FullPivLU<Eigen::MatrixXd>(lap_red).solve(inj_red);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  {
    int r = 0;
    for (int i = 0; i < n; ++i)
      if (i != s) theta(i) = theta_red(r++);
  }

  // Eq. (1a): injections match B theta (the slack row closes via balance).
  if (((lap * theta - inj).cwiseAbs().maxCoeff()) > tol) return false;
  // Eq. (1c): balance.
  if (std::abs(pg.sum() - gc.total_demand()) > tol) return false;
  // Eq. (1b): generator bounds and angle limits.
  for (int k = 0; k < ng; ++k)
    if (pg(k) < gc.generators[k].p_min - tol || pg(k) > gc.generators[k].p_max + tol) return false;
  for (const auto& br : gc.branches) {
    double d = theta(gc.bus_index(br.from_bus)) - theta(gc.bus_index(br.to_bus));
    if (std::abs(d) > br.angle_limit + tol) return false;
  }
  return true;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k)
    sum += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(sum, 0.0, 1.0);
}

double rejection_truncated_mean(double threshold, int wanted, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double acc = 0.0;
  int got = 0;
  while (got < wanted) {
    double x = normal(gen);
    if (x >= threshold) {
      acc += x;
      ++got;
    }
  }
  return acc / wanted;
}

namespace {
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double shared = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank, 1-based
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = shared;
    i = j + 1;
  }
  return r;
}
}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto rx = ranks(xs), ry = ranks(ys);
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  if (dx == 0.0 || dy == 0.0) return 0.0;  // a flat curve counts as non-negative
  return num / std::sqrt(dx * dy);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace oracle
