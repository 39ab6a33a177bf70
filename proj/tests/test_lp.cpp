#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "ccopf/errors.hpp"
#include "ccopf/lp.hpp"
#include "ccopf/rng.hpp"
#include "test_oracles.hpp"

using namespace ccopf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LpProblem make_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  double lo = 0.0, double hi = kInf) {
  LpProblem lp;
  lp.objective = c;
  lp.A = A;
  lp.rhs = b;
  lp.lower = Eigen::VectorXd::Constant(c.size(), lo);
  lp.upper = Eigen::VectorXd::Constant(c.size(), hi);
  return lp;
}

// Random instances with small integer-ish data keep the oracle comparisons
// away from ties at the 1e-6 scale.
LpProblem random_lp(CounterRng& rng) {
  const int n = 2 + static_cast<int>(rng.next_below(3));  // 2..4 vars
  const int m = 2 + static_cast<int>(rng.next_below(5));  // 2..6 rows
  LpProblem lp;
  lp.objective.resize(n);
  for (int j = 0; j < n; ++j)
    lp.objective(j) = std::round((rng.next_uniform() * 2.0 - 1.0) * 10.0) / 2.0;
  lp.A.resize(m, n);
  lp.rhs.resize(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j)
      lp.A(i, j) = std::round((rng.next_uniform() * 2.0 - 1.0) * 8.0) / 2.0;
    lp.rhs(i) = std::round((rng.next_uniform() * 2.0 - 0.5) * 10.0) / 2.0;
  }
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, kInf);
  if (rng.next_below(3) == 0) {
    // Mix in finite boxes and a free variable now and then.
    for (int j = 0; j < n; ++j) lp.upper(j) = 5.0 + rng.next_below(10);
    if (rng.next_below(2) == 0) lp.lower(0) = -kInf;
  }
  return lp;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("textbook optimum") {
  Eigen::VectorXd c(2);
  c << -1, -1;
  Eigen::MatrixXd A(1, 2);
  A << 1, 1;
  Eigen::VectorXd b(1);
  b << 1;
  LpSolution sol = solve_lp(make_lp(c, A, b));
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(sol.x.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible detection") {
  Eigen::VectorXd c(1);
  c << 1;
  Eigen::MatrixXd A(1, 1);
  A << 1;
  Eigen::VectorXd b(1);
  b << -1;  // x <= -1 against x >= 0
  LpSolution sol = solve_lp(make_lp(c, A, b));
  CHECK(sol.status == LpStatus::Infeasible);
  CHECK(sol.most_violated_row == 0);
}

TEST_CASE("unbounded detection") {
  Eigen::VectorXd c(2);
  c << -1, 0;
  Eigen::MatrixXd A(1, 2);
  A << 0, 1;
  Eigen::VectorXd b(1);
  b << 1;
  LpSolution sol = solve_lp(make_lp(c, A, b));
  CHECK(sol.status == LpStatus::Unbounded);
}

TEST_CASE("degenerate cycling example terminates") {
  // Beale's classic cycling instance (as <= rows); Bland fallback must exit.
  Eigen::VectorXd c(4);
  c << -0.75, 150, -0.02, 6;
  Eigen::MatrixXd A(3, 4);
  A << 0.25, -60, -0.04, 9,
       0.5, -90, -0.02, 3,
       0, 0, 1, 0;
  Eigen::VectorXd b(3);
  b << 0, 0, 1;
  LpSolution sol = solve_lp(make_lp(c, A, b));
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("objective equals c.x plus constant") {
  Eigen::VectorXd c(2);
  c << 2, 3;
  Eigen::MatrixXd A(2, 2);
  A << -1, 0, 0, -1;
  Eigen::VectorXd b(2);
  b << -1, -2;
  LpProblem lp = make_lp(c, A, b);
  lp.objective_constant = 10.0;
  LpSolution sol = solve_lp(lp);
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2 * 1 + 3 * 2 + 10).epsilon(1e-9));
  CHECK(std::abs(sol.objective - (lp.objective.dot(sol.x) + lp.objective_constant)) < 1e-9);
}

TEST_CASE("variable bound handling: shifted, mirrored, split") {
  // min x + y + z with x in [-3,-1], y <= -2 (no lower), z free and pinned
  // by a row.
  Eigen::VectorXd c(3);
  c << 1, 1, 1;
  Eigen::MatrixXd A(1, 3);
  A << 0, 0, -1;
  Eigen::VectorXd b(1);
  b << 5;  // -z <= 5
  LpProblem lp = make_lp(c, A, b);
  lp.lower << -3, -kInf, -kInf;
  lp.upper << -1, -2, kInf;
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Unbounded);  // y runs to -inf
  lp.lower(1) = -7;
  sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x(0) == doctest::Approx(-3));
  CHECK(sol.x(1) == doctest::Approx(-7));
  CHECK(sol.x(2) == doctest::Approx(-5));
}

TEST_CASE("200 random LPs match brute-force vertex enumeration") {
  CounterRng rng = CounterRng::substream(4242, {1});
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (int t = 0; t < 200; ++t) {
    LpProblem lp = random_lp(rng);
    oracle::LpReference ref = oracle::enumerate_lp(lp);
    LpSolution sol = solve_lp(lp);
    CHECK(sol.status == ref.status);
    if (ref.status == LpStatus::Optimal && sol.status == LpStatus::Optimal) {
      CHECK(sol.objective == doctest::Approx(ref.objective).epsilon(1e-6));
      // the returned point itself satisfies rows and bounds to 1e-7
      CHECK(((lp.A * sol.x - lp.rhs).array() <= 1e-7).all());
      for (int j = 0; j < lp.num_vars(); ++j) {
        CHECK(sol.x(j) >= lp.lower(j) - 1e-7);
        CHECK(sol.x(j) <= lp.upper(j) + 1e-7);
      }
      ++optimal;
    }
    infeasible += ref.status == LpStatus::Infeasible;
    unbounded += ref.status == LpStatus::Unbounded;
  }
  // The generator really produces all three outcomes.
  CHECK(optimal > 50);
  CHECK(infeasible > 5);
  CHECK(unbounded > 5);
}

TEST_CASE("duals certify optimality on nonnegative-variable rows") {
  CounterRng rng = CounterRng::substream(777, {2});
  int checked = 0;
  while (checked < 40) {
    LpProblem lp = random_lp(rng);
    lp.lower.setZero();
    lp.upper.setConstant(kInf);
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) continue;
    // Weak/strong duality for min c.x, Ax <= b, x >= 0 with prices y <= 0:
    // c - A^T y >= 0 and c.x = y.b.
    CHECK((sol.row_duals.array() <= 1e-9).all());
    Eigen::VectorXd reduced = lp.objective - lp.A.transpose() * sol.row_duals;
    CHECK(reduced.minCoeff() > -1e-7);
    CHECK(std::abs(sol.objective - sol.row_duals.dot(lp.rhs)) < 1e-7);
    ++checked;
  }
}

TEST_CASE("medium random LPs carry a full optimality certificate") {
  // No enumeration oracle at this size; instead every optimal exit must
  // certify itself: primal feasibility, dual feasibility and a zero gap.
  CounterRng rng = CounterRng::substream(909, {3});
  int optimal = 0;
  for (int t = 0; t < 50; ++t) {
    const int n = 10 + static_cast<int>(rng.next_below(16));
    const int m = n + static_cast<int>(rng.next_below(2 * n));
    LpProblem lp;
    lp.objective.resize(n);
    for (int j = 0; j < n; ++j) lp.objective(j) = rng.next_uniform() * 2.0 - 1.0;
    lp.A.resize(m, n);
    lp.rhs.resize(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) lp.A(i, j) = rng.next_uniform() * 2.0 - 1.0;
      lp.rhs(i) = rng.next_uniform() * 5.0;  // origin feasible
    }
    lp.lower = Eigen::VectorXd::Zero(n);
    lp.upper = Eigen::VectorXd::Constant(n, kInf);
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) continue;
    ++optimal;
    CHECK(((lp.A * sol.x - lp.rhs).array() <= 1e-7).all());
    CHECK((sol.x.array() >= -1e-9).all());
    CHECK((sol.row_duals.array() <= 1e-9).all());
    Eigen::VectorXd reduced = lp.objective - lp.A.transpose() * sol.row_duals;
    CHECK(reduced.minCoeff() > -1e-7);
    CHECK(std::abs(sol.objective - sol.row_duals.dot(lp.rhs)) < 1e-6 * (1.0 + std::abs(sol.objective)));
  }
  CHECK(optimal > 20);
}

TEST_CASE("iteration cap throws a numerical error") {
  // needs one pivot per variable, so a cap of one must trip
  Eigen::VectorXd c(2);
  c << -1, -1;
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 1;
  Eigen::VectorXd b(2);
  b << 1, 1;
  SimplexOptions opt;
  opt.max_iterations = 1;
  CHECK_THROWS_AS(solve_lp(make_lp(c, A, b), opt), Error);
}

TEST_CASE("validate refuses NaN coefficients") {
  Eigen::VectorXd c(1);
  c << std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd A(1, 1);
  A << 1;
  Eigen::VectorXd b(1);
  b << 1;
  CHECK_THROWS_AS(solve_lp(make_lp(c, A, b)), Error);
}

TEST_CASE("export emits a readable LP document") {
  Eigen::VectorXd c(2);
  c << 1, -2;
  Eigen::MatrixXd A(1, 2);
  A << 3, 4;
  Eigen::VectorXd b(1);
  b << 7;
  LpProblem lp = make_lp(c, A, b);
  lp.var_labels = {"p2", "p3"};
  std::string text = lp_export_text(lp);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("p2") != std::string::npos);
  CHECK(text.find("<= 7") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}

}  // TEST_SUITE
