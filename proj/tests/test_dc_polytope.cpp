#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ccopf/case_io.hpp"
#include "ccopf/dc_polytope.hpp"
#include "ccopf/errors.hpp"
#include "ccopf/rng.hpp"
#include "ccopf/scenario_opt.hpp"
#include "test_oracles.hpp"

using namespace ccopf;

namespace {

const std::string kToyPath = std::string(CCOPF_DATA_DIR) + "/toy3.grid";
const std::string kCase14Path = std::string(CCOPF_DATA_DIR) + "/case14.m";

GridCase toy_case() { return load_case(kToyPath); }

// Box around the generator ranges to draw classification probes from.
Eigen::VectorXd random_reduced_point(const GridCase& gc, const FeasibilityPolytope& poly,
                                     CounterRng& rng) {
  Eigen::VectorXd p(poly.dim());
  for (int c = 0; c < poly.dim(); ++c) {
    const Generator& g = gc.generators[poly.reduced_gens[c]];
    const double span = g.p_max - g.p_min;
    const double lo = g.p_min - 0.5 * span - 0.1;
    const double hi = g.p_max + 0.5 * span + 0.1;
    p(c) = lo + (hi - lo) * rng.next_uniform();
  }
  return p;
}

}  // namespace

TEST_SUITE("dc_polytope") {

TEST_CASE("admittance of the unit triangle") {
  Eigen::MatrixXd B = build_admittance(toy_case());
  Eigen::MatrixXd expect(3, 3);
  expect << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK((B - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("admittance of a single line with susceptance 5") {
  GridCase gc;
  gc.buses = {{1, 0.0}, {2, 1.0}};
  gc.branches = {{1, 2, 5.0, 0.5}};
  gc.generators = {{1, 0.0, 2.0, 1.0, 1.0, 0.0}};
  gc.slack_bus = 1;
  Eigen::MatrixXd B = build_admittance(gc);
  Eigen::MatrixXd expect(2, 2);
  expect << 5, -5, -5, 5;
  CHECK((B - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("admittance rows always sum to zero") {
  for (const std::string& path : {kToyPath, kCase14Path}) {
    Eigen::MatrixXd B = build_admittance(load_case(path));
    CHECK(B.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    CHECK((B - B.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("equality system of the toy: 4 rows over 5 variables") {
  EqualitySystem eq = build_equality_system(toy_case());
  CHECK(eq.A.rows() == 4);
  CHECK(eq.A.cols() == 5);
  // Balancing row first.
  Eigen::RowVectorXd balance(5);
  balance << 0, 0, 0, 1, 1;
  CHECK((eq.A.row(0) - balance).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(eq.b(0) == doctest::Approx(1.0));
  // Hand-built node rows [-B | G].
  Eigen::MatrixXd nodes(3, 5);
  nodes << -2, 1, 1, 1, 0,
            1, -2, 1, 0, 1,
            1, 1, -2, 0, 0;
  CHECK((eq.A.bottomRows(3) - nodes).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("equality system rank deficiency is exactly one") {
  for (const std::string& path : {kToyPath, kCase14Path}) {
    EqualitySystem eq = build_equality_system(load_case(path));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(eq.A);
    CHECK(lu.rank() == eq.A.rows() - 1);
  }
}

TEST_CASE("b_eq entries at pure-load nodes equal their demand") {
  GridCase gc = load_case(kCase14Path);
  EqualitySystem eq = build_equality_system(gc);
  for (std::size_t i = 0; i < gc.buses.size(); ++i) {
    if (gc.generator_at_bus(gc.buses[i].id) >= 0) continue;
    CHECK(eq.b(static_cast<int>(i) + 1) == doctest::Approx(gc.buses[i].demand));
  }
}

TEST_CASE("toy polytope matches the hand reduction") {
  // Independent derivation: grounded Laplacian [[2,-1],[-1,2]] inverts to
  // (1/3)[[2,1],[1,2]], so theta2 = (2 p2 - 1)/3 and theta3 = (p2 - 2)/3,
  // and the slack generator is 1 - p2. Substituting into the ten
  // inequalities gives the rows below.
  auto [poly, cost] = build_feasibility_polytope(toy_case());
  REQUIRE(poly.rows() == 10);  // 2m + 2 n_g = 6 + 4
  REQUIRE(poly.dim() == 1);

  const double expected_w[10] = {-2.0 / 3, 2.0 / 3, -1.0 / 3, 1.0 / 3, 1.0 / 3,
                                 -1.0 / 3, -1.0,    1.0,      1.0,     -1.0};
  const double expected_b[10] = {0.6 - 1.0 / 3, 0.6 + 1.0 / 3, 0.6 - 2.0 / 3, 0.6 + 2.0 / 3,
                                 0.6 - 1.0 / 3, 0.6 + 1.0 / 3, 1.0,           1.0,
                                 2.0,           0.0};
  for (int r = 0; r < 10; ++r) {
    CHECK(poly.W(r, 0) == doctest::Approx(expected_w[r]).epsilon(1e-12));
    CHECK(poly.b(r) == doctest::Approx(expected_b[r]).epsilon(1e-12));
  }

  // Transformed cost: c = c2 - c1 = 1, ct = c1 * total demand = 1.
  CHECK(cost.c(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cost.ct == doctest::Approx(1.0).epsilon(1e-12));

  // The balancing row reduces to plain power balance.
  CHECK((poly.a_ref - Eigen::VectorXd::Ones(2)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(poly.b_ref == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("row labels partition into the four kinds") {
  GridCase gc = load_case(kCase14Path);
  auto [poly, cost] = build_feasibility_polytope(gc);
  REQUIRE(poly.rows() == 2 * poly.n_branches + 2 * poly.n_gens);
  int counts[4] = {0, 0, 0, 0};
  for (const auto& lab : poly.row_labels) counts[static_cast<int>(lab.kind)]++;
  CHECK(counts[0] == poly.n_branches);
  CHECK(counts[1] == poly.n_branches);
  CHECK(counts[2] == poly.n_gens);
  CHECK(counts[3] == poly.n_gens);
}

TEST_CASE("membership agrees with the direct DC oracle") {
  for (const std::string& path : {kToyPath, kCase14Path}) {
    GridCase gc = load_case(path);
    auto [poly, cost] = build_feasibility_polytope(gc);
    CounterRng rng = CounterRng::substream(2024, {17});
    int feasible_seen = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd p = random_reduced_point(gc, poly, rng);
      bool mine = poly.check_feasible(p);
      bool direct = oracle::dc_state_feasible(gc, p);
      CHECK(mine == direct);
      feasible_seen += mine;
    }
    CHECK(feasible_seen > 0);  // the probe box straddles the polytope
  }
}

TEST_CASE("cost transform agrees with the original cost on feasible points") {
  GridCase gc = load_case(kCase14Path);
  auto [poly, cost] = build_feasibility_polytope(gc);
  CounterRng rng = CounterRng::substream(2024, {23});
  int done = 0;
  while (done < 100) {
    Eigen::VectorXd p = random_reduced_point(gc, poly, rng);
    if (!poly.check_feasible(p)) continue;
    auto [full, theta] = poly.reconstruct_state(p);
    double original = 0.0;
    for (int k = 0; k < poly.n_gens; ++k) original += gc.generators[k].cost_linear * full(k);
    CHECK(cost.value(p) == doctest::Approx(original).epsilon(1e-8));
    ++done;
  }
}

TEST_CASE("the vertex-enumeration oracle locates the toy interval") {
  auto [poly, cost] = build_feasibility_polytope(toy_case());
  LpProblem lp;
  lp.objective = Eigen::VectorXd::Ones(1);
  lp.A = poly.W;
  lp.rhs = poly.b;
  lp.lower = Eigen::VectorXd::Constant(1, -std::numeric_limits<double>::infinity());
  lp.upper = Eigen::VectorXd::Constant(1, std::numeric_limits<double>::infinity());
  oracle::LpReference lo = oracle::enumerate_lp(lp);
  lp.objective = -Eigen::VectorXd::Ones(1);
  oracle::LpReference hi = oracle::enumerate_lp(lp);
  REQUIRE(lo.status == LpStatus::Optimal);
  REQUIRE(hi.status == LpStatus::Optimal);
  CHECK(lo.objective == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(-hi.objective == doctest::Approx(0.8).epsilon(1e-9));
  // midpoint of the enumerated vertices is interior
  Eigen::VectorXd mid(1);
  mid << 0.5 * (lo.objective - hi.objective);
  CHECK(poly.check_feasible(mid));
}

TEST_CASE("check_feasible honors the boundary tolerance") {
  auto [poly, cost] = build_feasibility_polytope(toy_case());
  Eigen::VectorXd p(1);
  p << 0.8;  // boundary of the binding angle row
  CHECK(poly.check_feasible(p));
  p << 0.8 + 2e-9 / (1.0 / 3.0);  // past b + 1e-9 on that row
  CHECK(!poly.check_feasible(p));
  p << 3.0;  // violates the gen-2 upper bound by 1 MW
  CHECK(!poly.check_feasible(p));
  Eigen::VectorXd wrong(2);
  wrong << 0.0, 0.0;
  CHECK_THROWS_AS(poly.check_feasible(wrong), Error);
}

TEST_CASE("reconstruct_state balances and satisfies the node equations") {
  for (const std::string& path : {kToyPath, kCase14Path}) {
    GridCase gc = load_case(path);
    auto [poly, cost] = build_feasibility_polytope(gc);
    Eigen::MatrixXd B = build_admittance(gc);
    const int s = gc.bus_index(gc.slack_bus);
    CounterRng rng = CounterRng::substream(99, {5});
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd p = random_reduced_point(gc, poly, rng);
      auto [full, theta] = poly.reconstruct_state(p);
      CHECK(std::abs(full.sum() - gc.total_demand()) < 1e-9);
      CHECK(theta(s) == doctest::Approx(0.0));
      // p_inj = B theta in per-unit
      Eigen::VectorXd inj = Eigen::VectorXd::Zero(poly.n_buses);
      for (int k = 0; k < poly.n_gens; ++k)
        inj(gc.bus_index(gc.generators[k].bus)) += full(k) / gc.base_mva;
      for (int i = 0; i < poly.n_buses; ++i) inj(i) -= gc.buses[i].demand / gc.base_mva;
      CHECK((B * theta - inj).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("toy slack reconstruction follows the balance identity") {
  auto [poly, cost] = build_feasibility_polytope(toy_case());
  Eigen::VectorXd p(1);
  p << 0.4;
  auto [full, theta] = poly.reconstruct_state(p);
  CHECK(full(0) == doctest::Approx(0.6));  // total demand 1 minus 0.4
  p << 0.0;
  auto [full0, theta0] = poly.reconstruct_state(p);
  CHECK(full0(0) == doctest::Approx(1.0));
}

TEST_CASE("construction is deterministic to the bit") {
  GridCase gc = load_case(kCase14Path);
  auto [p1, c1] = build_feasibility_polytope(gc);
  auto [p2, c2] = build_feasibility_polytope(gc);
  CHECK((p1.W.array() == p2.W.array()).all());
  CHECK((p1.b.array() == p2.b.array()).all());
  CHECK(polytope_text_dump(p1) == polytope_text_dump(p2));
}

TEST_CASE("two-bus line reduces to a box plus the angle corridor") {
  GridCase gc;
  gc.name = "line2";
  gc.buses = {{1, 5.0}, {2, 0.0}};
  gc.branches = {{1, 2, 2.0, 1.0}};
  gc.generators = {{1, 0.0, 10.0, 1.0, 1.0, 0.0}, {2, 0.0, 4.0, 1.0, 2.0, 0.0}};
  gc.slack_bus = 1;
  REQUIRE(validate_case(gc).empty());
  auto [poly, cost] = build_feasibility_polytope(gc);
  CHECK(poly.rows() == 2 * 1 + 2 * 2);
  Eigen::VectorXd p(1);
  p << 1.5;  // slack covers the remaining 3.5 MW
  CHECK(poly.check_feasible(p));
  auto [full, theta] = poly.reconstruct_state(p);
  CHECK(full(0) == doctest::Approx(3.5));
  // theta2 = p2 / susceptance; the 1 rad corridor caps p2 at 2 on this line
  CHECK(theta(1) == doctest::Approx(0.75));
  p << 3.0;  // inside the generator box but past the angle corridor
  CHECK(!poly.check_feasible(p));
}

TEST_CASE("single-generator case yields a zero-dimensional reduced space") {
  GridCase gc;
  gc.name = "solo";
  gc.buses = {{1, 5.0}};
  gc.branches = {};
  gc.generators = {{1, 0.0, 10.0, 1.0, 3.0, 0.0}};
  gc.slack_bus = 1;
  REQUIRE(validate_case(gc).empty());
  auto [poly, cost] = build_feasibility_polytope(gc);
  CHECK(poly.rows() == 2);
  CHECK(poly.dim() == 0);
  Eigen::VectorXd empty(0);
  CHECK(poly.check_feasible(empty));
  auto [full, theta] = poly.reconstruct_state(empty);
  CHECK(full(0) == doctest::Approx(5.0));
  DcopfResult res = solve_deterministic_dcopf(gc);
  REQUIRE(res.solution.status == LpStatus::Optimal);
  CHECK(res.solution.objective == doctest::Approx(15.0));  // 3 $/MWh * 5 MW
}

TEST_CASE("disconnected graph raises the structured singularity error") {
  GridCase gc;
  gc.buses = {{1, 0.0}, {2, 0.5}, {3, 0.0}, {4, 0.5}};
  gc.branches = {{1, 2, 1.0, 0.5}, {3, 4, 1.0, 0.5}};
  gc.generators = {{1, 0.0, 2.0, 1.0, 1.0, 0.0}, {3, 0.0, 2.0, 1.0, 1.0, 0.0}};
  gc.slack_bus = 1;
  try {
    build_feasibility_polytope(gc);
    FAIL("expected a numerical error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
    CHECK(std::string(e.what()).find("singular") != std::string::npos);
  }
}

TEST_CASE("polytope csv carries one labeled line per row") {
  auto [poly, cost] = build_feasibility_polytope(toy_case());
  std::string csv = polytope_csv(poly);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == poly.rows() + 1);
  CHECK(csv.find("angle+") != std::string::npos);
  CHECK(csv.find("gen_lower") != std::string::npos);
}

}  // TEST_SUITE
