#include "ccopf/dc_polytope.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ccopf/errors.hpp"
#include "detail_fmt.hpp"

namespace ccopf {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kFeasTol = 1e-9;

}  // namespace

const char* row_kind_name(RowKind k) {
  switch (k) {
    case RowKind::AnglePlus: return "angle+";
    case RowKind::AngleMinus: return "angle-";
    case RowKind::GenUpper: return "gen_upper";
    case RowKind::GenLower: return "gen_lower";
  }
  return "?";
}

Eigen::MatrixXd build_admittance(const GridCase& gc) {
  const int n = static_cast<int>(gc.buses.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (const auto& br : gc.branches) {
    int i = gc.bus_index(br.from_bus);
    int j = gc.bus_index(br.to_bus);
    B(i, j) -= br.susceptance;
    B(j, i) -= br.susceptance;
    B(i, i) += br.susceptance;
    B(j, j) += br.susceptance;
  }
  return B;
}

EqualitySystem build_equality_system(const GridCase& gc) {
  const int n = static_cast<int>(gc.buses.size());
  const int ng = static_cast<int>(gc.generators.size());
  const Eigen::MatrixXd B = build_admittance(gc);

  EqualitySystem eq;
  eq.A = Eigen::MatrixXd::Zero(n + 1, n + ng);
  eq.b = Eigen::VectorXd::Zero(n + 1);

  // Balancing row: total generation equals total demand.
  for (int k = 0; k < ng; ++k) eq.A(0, n + k) = 1.0;
  eq.b(0) = gc.total_demand();

  // Node rows in MW: G p - base*B theta = d.
  for (int i = 0; i < n; ++i) {
    eq.A.block(i + 1, 0, 1, n) = -gc.base_mva * B.row(i);
    eq.b(i + 1) = gc.buses[i].demand;
  }
  for (int k = 0; k < ng; ++k) {
    int i = gc.bus_index(gc.generators[k].bus);
    eq.A(i + 1, n + k) = 1.0;
  }
  return eq;
}

std::pair<FeasibilityPolytope, CostFunction> build_feasibility_polytope(const GridCase& gc) {
  const int n = static_cast<int>(gc.buses.size());
  const int m = static_cast<int>(gc.branches.size());
  const int ng = static_cast<int>(gc.generators.size());
  const int s = gc.bus_index(gc.slack_bus);
  const int k0 = gc.slack_generator();
  if (s < 0 || k0 < 0) throw validation_error("polytope build requires a validated case");

  const EqualitySystem eq = build_equality_system(gc);

  // Column bookkeeping over x = (theta, p_g): theta columns minus the slack
  // bus, generator columns in case order.
  std::vector<int> theta_cols;
  theta_cols.reserve(n - 1);
  for (int i = 0; i < n; ++i)
    if (i != s) theta_cols.push_back(i);

  // Grounded node system: every node equation except the slack bus one.
  Eigen::MatrixXd At(n - 1, n - 1);   // theta block
  Eigen::MatrixXd Ap(n - 1, ng);      // generation block
  Eigen::VectorXd bt(n - 1);
  {
    int r = 0;
    for (int i = 0; i < n; ++i) {
      if (i == s) continue;
      for (int c = 0; c < n - 1; ++c) At(r, c) = eq.A(i + 1, theta_cols[c]);
      Ap.row(r) = eq.A.block(i + 1, n, 1, ng);
      bt(r) = eq.b(i + 1);
      ++r;
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(At);
  if (n > 1 && lu.matrixLU().diagonal().cwiseAbs().minCoeff() < kPivotTol)
    throw numerical_error("singular angle system: grid graph is not connected");

  // theta = Mtheta * p_g + theta0 from the grounded equations.
  const Eigen::MatrixXd Mtheta = lu.solve((-Ap).eval());
  const Eigen::VectorXd theta0 = lu.solve(bt);

  // Substitute into the slack-bus balancing row to express its generator
  // through the rest: a_ref^T p_g = b_ref.
  Eigen::RowVectorXd r0t(n - 1);
  for (int c = 0; c < n - 1; ++c) r0t(c) = eq.A(s + 1, theta_cols[c]);
  const Eigen::RowVectorXd r0p = eq.A.block(s + 1, n, 1, ng);
  const Eigen::VectorXd a_ref = (r0t * Mtheta + r0p).transpose();
  const double b_ref = eq.b(s + 1) - r0t.dot(theta0);

  if (std::abs(a_ref(k0)) < kPivotTol)
    throw numerical_error("slack not reconstructible: balancing row has no slack coefficient");

  // Inequality system over (theta~, p_g): two angle rows per branch, two
  // bound rows per generator.
  const int J = 2 * m + 2 * ng;
  Eigen::MatrixXd It = Eigen::MatrixXd::Zero(J, n - 1);
  Eigen::MatrixXd Ip = Eigen::MatrixXd::Zero(J, ng);
  Eigen::VectorXd bi(J);
  std::vector<RowLabel> labels(J);

  auto theta_col_of = [&](int bus_idx) {
    for (int c = 0; c < n - 1; ++c)
      if (theta_cols[c] == bus_idx) return c;
    return -1;
  };

  for (int e = 0; e < m; ++e) {
    const auto& br = gc.branches[e];
    int ci = theta_col_of(gc.bus_index(br.from_bus));
    int cj = theta_col_of(gc.bus_index(br.to_bus));
    int rp = 2 * e, rm = 2 * e + 1;
    if (ci >= 0) { It(rp, ci) = 1.0; It(rm, ci) = -1.0; }
    if (cj >= 0) { It(rp, cj) = -1.0; It(rm, cj) = 1.0; }
    bi(rp) = br.angle_limit;
    bi(rm) = br.angle_limit;
    labels[rp] = {RowKind::AnglePlus, e};
    labels[rm] = {RowKind::AngleMinus, e};
  }
  for (int k = 0; k < ng; ++k) {
    int ru = 2 * m + 2 * k, rl = ru + 1;
    Ip(ru, k) = 1.0;
    bi(ru) = gc.generators[k].p_max;
    Ip(rl, k) = -1.0;
    bi(rl) = -gc.generators[k].p_min;
    labels[ru] = {RowKind::GenUpper, k};
    labels[rl] = {RowKind::GenLower, k};
  }

  // Eliminate theta, then the slack generator column.
  const Eigen::MatrixXd Aprime = It * Mtheta + Ip;       // J x n_g
  const Eigen::VectorXd bprime = bi - It * theta0;

  FeasibilityPolytope poly;
  poly.n_buses = n;
  poly.n_branches = m;
  poly.n_gens = ng;
  poly.slack_gen = k0;
  poly.a_ref = a_ref;
  poly.b_ref = b_ref;
  poly.row_labels = std::move(labels);
  for (int k = 0; k < ng; ++k)
    if (k != k0) poly.reduced_gens.push_back(k);

  const int nr = ng - 1;
  Eigen::VectorXd a_rest(nr);
  for (int c = 0; c < nr; ++c) a_rest(c) = a_ref(poly.reduced_gens[c]);
  const Eigen::VectorXd col0 = Aprime.col(k0);

  poly.W.resize(J, nr);
  for (int c = 0; c < nr; ++c)
    poly.W.col(c) = Aprime.col(poly.reduced_gens[c]) - col0 * (a_rest(c) / a_ref(k0));
  poly.b = bprime - (b_ref / a_ref(k0)) * col0;

  // Angle recovery as an affine map of the reduced vector.
  poly.theta_map = Eigen::MatrixXd::Zero(n, nr);
  poly.theta_base = Eigen::VectorXd::Zero(n);
  {
    const Eigen::VectorXd mcol0 = Mtheta.col(k0);
    int r = 0;
    for (int i = 0; i < n; ++i) {
      if (i == s) continue;  // slack angle pinned to zero
      for (int c = 0; c < nr; ++c)
        poly.theta_map(i, c) = Mtheta(r, poly.reduced_gens[c]) - mcol0(r) * (a_rest(c) / a_ref(k0));
      poly.theta_base(i) = theta0(r) + mcol0(r) * (b_ref / a_ref(k0));
      ++r;
    }
  }

  CostFunction cost;
  Eigen::VectorXd c1(ng);
  for (int k = 0; k < ng; ++k) c1(k) = gc.generators[k].cost_linear;
  cost.c.resize(nr);
  for (int c = 0; c < nr; ++c)
    cost.c(c) = c1(poly.reduced_gens[c]) - (c1(k0) / a_ref(k0)) * a_rest(c);
  cost.ct = c1(k0) * (b_ref / a_ref(k0));

  return {std::move(poly), std::move(cost)};
}

bool FeasibilityPolytope::check_feasible(const Eigen::VectorXd& p) const {
  if (p.size() != W.cols())
    throw validation_error("check_feasible: expected dimension " + std::to_string(W.cols()) +
                           ", got " + std::to_string(p.size()));
  return ((W * p - b).array() <= kFeasTol).all();
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> FeasibilityPolytope::reconstruct_state(
    const Eigen::VectorXd& p) const {
  if (p.size() != W.cols())
    throw validation_error("reconstruct_state: expected dimension " + std::to_string(W.cols()) +
                           ", got " + std::to_string(p.size()));
  Eigen::VectorXd full(n_gens);
  double acc = 0.0;
  for (int c = 0; c < p.size(); ++c) {
    full(reduced_gens[c]) = p(c);
    acc += a_ref(reduced_gens[c]) * p(c);
  }
  full(slack_gen) = (b_ref - acc) / a_ref(slack_gen);
  Eigen::VectorXd theta = theta_map * p + theta_base;
  return {std::move(full), std::move(theta)};
}

std::string polytope_csv(const FeasibilityPolytope& poly) {
  std::ostringstream out;
  out << "row,kind,source,b";
  for (int c = 0; c < poly.dim(); ++c) out << ",w" << c + 1;
  out << "\n";
  for (int r = 0; r < poly.rows(); ++r) {
    out << r + 1 << ',' << row_kind_name(poly.row_labels[r].kind) << ','
        << poly.row_labels[r].source + 1 << ',' << detail::fmt_double(poly.b(r));
    for (int c = 0; c < poly.dim(); ++c) out << ',' << detail::fmt_double(poly.W(r, c));
    out << "\n";
  }
  return out.str();
}

std::string polytope_text_dump(const FeasibilityPolytope& poly) {
  std::ostringstream out;
  out << "polytope J=" << poly.rows() << " dim=" << poly.dim() << " n=" << poly.n_buses
      << " m=" << poly.n_branches << " ng=" << poly.n_gens << "\n";
  out << "a_ref";
  for (int k = 0; k < poly.a_ref.size(); ++k) out << ' ' << detail::fmt_double(poly.a_ref(k));
  out << "\nb_ref " << detail::fmt_double(poly.b_ref) << "\n";
  for (int r = 0; r < poly.rows(); ++r) {
    out << row_kind_name(poly.row_labels[r].kind) << ' ' << poly.row_labels[r].source + 1 << " |";
    for (int c = 0; c < poly.dim(); ++c) out << ' ' << detail::fmt_double(poly.W(r, c));
    out << " <= " << detail::fmt_double(poly.b(r)) << "\n";
  }
  return out.str();
}

}  // namespace ccopf
