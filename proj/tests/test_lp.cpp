#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "capmkt/lp.hpp"

using namespace capmkt;

TEST(Lp, SingleLowerBoundRow) {
  LinearProgram lp;
  int x = lp.add_variable("x", 1.0, -kInf, kInf);
  lp.add_row("floor", {{x, 1.0}}, RowSense::Ge, 3.0);
  auto sol = solve(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.x[0], 3.0, 1e-12);
  EXPECT_NEAR(sol.duals[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.objective, 3.0, 1e-12);
  EXPECT_TRUE(check_kkt(lp, sol).passes(1e-9));
}

// min 2x + 3y, x + y >= 10, 0 <= x <= 6, 0 <= y <= 8.
// x is cheaper so it goes to its cap; y covers the remaining 4 and prices the row at 3.
TEST(Lp, TwoVariableCoverHandSolution) {
  LinearProgram lp;
  int x = lp.add_variable("x", 2.0, 0.0, 6.0);
  int y = lp.add_variable("y", 3.0, 0.0, 8.0);
  lp.add_row("cover", {{x, 1.0}, {y, 1.0}}, RowSense::Ge, 10.0);
  auto sol = solve(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.x[x], 6.0, 1e-12);
  EXPECT_NEAR(sol.x[y], 4.0, 1e-12);
  EXPECT_NEAR(sol.objective, 24.0, 1e-12);
  EXPECT_NEAR(sol.duals[0], 3.0, 1e-12);
  EXPECT_NEAR(sol.reduced_costs[x], -1.0, 1e-12);
  EXPECT_NEAR(sol.reduced_costs[y], 0.0, 1e-12);
}

// Two sources (20, 30 MW), two sinks (25 each).
// Unit costs: s1->d1 1, s1->d2 3, s2->d1 2, s2->d2 1.
// By hand: s1->d1 20, s2->d1 5, s2->d2 25, total 55.
TEST(Lp, TransportHandSolution) {
  LinearProgram lp;
  int a = lp.add_variable("s1_d1", 1.0, 0.0, kInf);
  int b = lp.add_variable("s1_d2", 3.0, 0.0, kInf);
  int c = lp.add_variable("s2_d1", 2.0, 0.0, kInf);
  int d = lp.add_variable("s2_d2", 1.0, 0.0, kInf);
  lp.add_row("supply1", {{a, 1}, {b, 1}}, RowSense::Le, 20);
  lp.add_row("supply2", {{c, 1}, {d, 1}}, RowSense::Le, 30);
  lp.add_row("demand1", {{a, 1}, {c, 1}}, RowSense::Eq, 25);
  lp.add_row("demand2", {{b, 1}, {d, 1}}, RowSense::Eq, 25);
  auto sol = solve(lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, 55.0, 1e-9);
  EXPECT_NEAR(sol.x[a], 20.0, 1e-9);
  EXPECT_NEAR(sol.x[b], 0.0, 1e-9);
  EXPECT_NEAR(sol.x[c], 5.0, 1e-9);
  EXPECT_NEAR(sol.x[d], 25.0, 1e-9);
  // supply1 is scarce: one more MW there saves 2 - 1 = 1
  EXPECT_NEAR(sol.duals[0], -1.0, 1e-9);
  EXPECT_NEAR(sol.duals[1], 0.0, 1e-9);
  EXPECT_NEAR(sol.duals[2], 2.0, 1e-9);
  EXPECT_NEAR(sol.duals[3], 1.0, 1e-9);
  EXPECT_TRUE(check_kkt(lp, sol).passes(1e-9));
}

TEST(Lp, ReportsInfeasible) {
  LinearProgram lp;
  int x = lp.add_variable("x", 1.0, 0.0, kInf);
  lp.add_row("lo", {{x, 1.0}}, RowSense::Ge, 3.0);
  lp.add_row("hi", {{x, 1.0}}, RowSense::Le, 2.0);
  EXPECT_EQ(solve(lp).status, LpStatus::Infeasible);
}

TEST(Lp, ReportsUnbounded) {
  LinearProgram lp;
  int x = lp.add_variable("x", -1.0, 0.0, kInf);
  int y = lp.add_variable("y", 0.0, 0.0, kInf);
  lp.add_row("r", {{x, 1.0}, {y, -1.0}}, RowSense::Le, 1.0);
  EXPECT_EQ(solve(lp).status, LpStatus::Unbounded);
}

// Beale's example cycles under textbook Dantzig pricing.
TEST(Lp, DegenerateCyclingExample) {
  LinearProgram lp;
  int x4 = lp.add_variable("x4", -0.75, 0.0, kInf);
  int x5 = lp.add_variable("x5", 20.0, 0.0, kInf);
  int x6 = lp.add_variable("x6", -0.5, 0.0, kInf);
  int x7 = lp.add_variable("x7", 6.0, 0.0, kInf);
  lp.add_row("r1", {{x4, 0.25}, {x5, -8}, {x6, -1}, {x7, 9}}, RowSense::Le, 0.0);
  lp.add_row("r2", {{x4, 0.5}, {x5, -12}, {x6, -0.5}, {x7, 3}}, RowSense::Le, 0.0);
  lp.add_row("r3", {{x6, 1.0}}, RowSense::Le, 1.0);
  for (int threshold : {0, 50}) {
    LpOptions opt;
    opt.bland_after_degenerate = threshold;
    auto sol = solve(lp, opt);
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.objective, -1.25, 1e-9);  // x4 = x6 = 1
    EXPECT_TRUE(check_kkt(lp, sol).passes(1e-9));
  }
}

TEST(Lp, PerturbedPrimalFailsKkt) {
  LinearProgram lp;
  int x = lp.add_variable("x", 2.0, 0.0, 6.0);
  int y = lp.add_variable("y", 3.0, 0.0, 8.0);
  lp.add_row("cover", {{x, 1.0}, {y, 1.0}}, RowSense::Ge, 10.0);
  auto sol = solve(lp);
  for (int j : {x, y}) {
    LpSolution bad = sol;
    bad.x[static_cast<std::size_t>(j)] += 1e-2;
    auto rep = check_kkt(lp, bad);
    EXPECT_GT(std::max(rep.primal_feasibility, rep.complementarity), 1e-3);
  }
}

// Random bounded problems built around a known feasible point, so each is
// feasible and bounded. Optimality is certified by strong duality and the
// independent KKT check.
TEST(Lp, RandomStrongDuality) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 25, m = 1 + trial % 17;
    LinearProgram lp;
    std::vector<double> x0(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      double lo = -5.0 + 2.0 * u(rng), hi = lo + 1.0 + 5.0 * std::abs(u(rng));
      if (trial % 5 == 0 && j % 3 == 0) hi = lo;  // some fixed columns
      x0[static_cast<std::size_t>(j)] = lo + (hi - lo) * 0.5 * (1 + u(rng));
      lp.add_variable("x" + std::to_string(j), 10 * u(rng), lo, hi);
    }
    for (int i = 0; i < m; ++i) {
      std::vector<LpTerm> terms;
      double act = 0.0;
      for (int j = 0; j < n; ++j) {
        if (std::abs(u(rng)) < 0.4) continue;
        double a = 3 * u(rng);
        terms.push_back({j, a});
        act += a * x0[static_cast<std::size_t>(j)];
      }
      RowSense s = static_cast<RowSense>(pick(rng));
      double rhs = s == RowSense::Le ? act + std::abs(u(rng)) : s == RowSense::Ge ? act - std::abs(u(rng)) : act;
      lp.add_row("r" + std::to_string(i), terms, s, rhs);
    }
    auto sol = solve(lp);
    ASSERT_TRUE(sol.optimal()) << "trial " << trial << ": " << to_string(sol.status);
    EXPECT_LE(std::abs(sol.objective - sol.dual_objective), 1e-6 * (1 + std::abs(sol.objective)));
    auto rep = check_kkt(lp, sol);
    EXPECT_TRUE(rep.passes(1e-6)) << "trial " << trial << " residual " << rep.max();
  }
}

TEST(Lp, Deterministic) {
  LinearProgram lp;
  int a = lp.add_variable("a", 1.0, 0.0, 10.0);
  int b = lp.add_variable("b", 1.0, 0.0, 10.0);
  lp.add_row("r", {{a, 1.0}, {b, 1.0}}, RowSense::Ge, 5.0);
  auto s1 = solve(lp), s2 = solve(lp);
  EXPECT_EQ(s1.x, s2.x);
  EXPECT_EQ(s1.duals, s2.duals);
}

TEST(Lp, WritesLpFormat) {
  LinearProgram lp;
  int x = lp.add_variable("p[g1,3]", 2.5, 0.0, 6.0);
  int t = lp.add_variable("theta", 0.0, -kInf, kInf);
  lp.add_row("bal", {{x, 1.0}, {t, -1.0}}, RowSense::Eq, 4.0);
  std::ostringstream os;
  write_lp_format(os, lp);
  const std::string text = os.str();
  EXPECT_NE(text.find("Minimize\n obj: + 2.5 p[g1_3]"), std::string::npos) << text;
  EXPECT_NE(text.find(" bal: + 1 p[g1_3] - 1 theta = 4"), std::string::npos) << text;
  EXPECT_NE(text.find(" theta free"), std::string::npos);
  EXPECT_NE(text.find("0 <= p[g1_3] <= 6"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
}

TEST(Lp, RejectsBadBounds) {
  LinearProgram lp;
  lp.add_variable("x", 1.0, 2.0, 1.0);
  EXPECT_THROW(solve(lp), ValidationError);
}
