#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gcs/conic.hpp"

namespace gcs {
namespace {

TEST(LinExprTest, SubstituteAndEvaluate) {
  // 2*l0 - l1 + 3 with l0 -> x2 + 1, l1 -> 4*x0.
  LinExpr local = 2.0 * LinExpr::Var(0) - LinExpr::Var(1) + 3.0;
  const LinExpr args[] = {LinExpr::Var(2) + 1.0, 4.0 * LinExpr::Var(0)};
  const LinExpr e = local.Substitute(args).Simplified();
  Eigen::Vector3d x(1.0, 7.0, 2.0);
  EXPECT_DOUBLE_EQ(e.Evaluate(x), 2.0 * 3.0 - 4.0 + 3.0);
  EXPECT_EQ(e.terms().size(), 2u);
}

TEST(ConeViolationTest, Cones) {
  EXPECT_EQ(ConeViolation(ConeType::kNonnegative, Eigen::Vector2d(1, 0)), 0.0);
  EXPECT_DOUBLE_EQ(ConeViolation(ConeType::kNonnegative, Eigen::Vector2d(1, -2)), 2.0);
  EXPECT_EQ(ConeViolation(ConeType::kSecondOrder, Eigen::Vector3d(5, 3, 4)), 0.0);
  EXPECT_NEAR(ConeViolation(ConeType::kSecondOrder, Eigen::Vector3d(4, 3, 4)), 1.0, 1e-15);
  // ||w||^2 <= a b.
  EXPECT_EQ(ConeViolation(ConeType::kRotatedSecondOrder, Eigen::Vector3d(2, 2, 2)), 0.0);
  EXPECT_GT(ConeViolation(ConeType::kRotatedSecondOrder, Eigen::Vector3d(1, 2, 2)), 0.0);
  EXPECT_GT(ConeViolation(ConeType::kRotatedSecondOrder, Eigen::Vector3d(-1, -4, 0)), 0.0);
}

TEST(ConicSolveTest, EqualityAndSign) {
  ConicProgram prog;
  const int y = prog.AddVariables(1);
  prog.AddToObjective(LinExpr::Var(y));
  prog.AddConstraint(ConeType::kNonnegative, {LinExpr::Var(y)});
  prog.AddConstraint(ConeType::kZero, {LinExpr::Var(y) - 1.0});
  const auto sol = Solve(prog);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 1.0, 1e-8);
}

TEST(ConicSolveTest, SecondOrderCone) {
  ConicProgram prog;
  const int t = prog.AddVariables(1);
  prog.AddToObjective(LinExpr::Var(t));
  prog.AddConstraint(ConeType::kSecondOrder, {LinExpr::Var(t), 3.0, 4.0});
  const auto sol = Solve(prog);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 5.0, 1e-7);
}

TEST(ConicSolveTest, RotatedCone) {
  // min t  s.t.  x^2 <= t y,  y = 2,  x = 2  ->  t = 2.
  ConicProgram prog;
  const int v = prog.AddVariables(3);
  const LinExpr t = LinExpr::Var(v), y = LinExpr::Var(v + 1), x = LinExpr::Var(v + 2);
  prog.AddToObjective(t);
  prog.AddConstraint(ConeType::kRotatedSecondOrder, {t, y, x});
  prog.AddConstraint(ConeType::kZero, {y - 2.0, x - 2.0});
  const auto sol = Solve(prog);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 2.0, 1e-7);
}

TEST(ConicSolveTest, InfeasibleLp) {
  ConicProgram prog;
  const int x = prog.AddVariables(1);
  prog.AddToObjective(LinExpr::Var(x));
  prog.AddConstraint(ConeType::kNonnegative, {LinExpr::Var(x) - 2.0, 1.0 - LinExpr::Var(x)});
  EXPECT_EQ(Solve(prog).status, SolveStatus::kInfeasible);
}

TEST(ConicSolveTest, InconsistentEqualities) {
  ConicProgram prog;
  const int x = prog.AddVariables(2);
  const LinExpr a = LinExpr::Var(x), b = LinExpr::Var(x + 1);
  prog.AddToObjective(a + b);
  prog.AddConstraint(ConeType::kNonnegative, {a, b});
  prog.AddConstraint(ConeType::kZero, {a + b - 1.0, 2.0 * a + 2.0 * b - 3.0});
  EXPECT_EQ(Solve(prog).status, SolveStatus::kInfeasible);
}

TEST(ConicSolveTest, UnboundedLp) {
  ConicProgram prog;
  const int x = prog.AddVariables(1);
  prog.AddToObjective(-1.0 * LinExpr::Var(x));
  prog.AddConstraint(ConeType::kNonnegative, {LinExpr::Var(x)});
  EXPECT_EQ(Solve(prog).status, SolveStatus::kUnbounded);
}

TEST(ConicSolveTest, DependentEqualityRows) {
  // Redundant copies of the same equality must not break the factorization.
  ConicProgram prog;
  const int x = prog.AddVariables(2);
  const LinExpr a = LinExpr::Var(x), b = LinExpr::Var(x + 1);
  prog.AddToObjective(a + 2.0 * b);
  prog.AddConstraint(ConeType::kNonnegative, {a, b});
  prog.AddConstraint(ConeType::kZero, {a + b - 1.0, 3.0 * a + 3.0 * b - 3.0, a + b - 1.0});
  const auto sol = Solve(prog);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 1.0, 1e-7);
  EXPECT_NEAR(sol.primal[0], 1.0, 1e-6);
}

// Projection of a random point onto a box in the 2-norm: the closed-form clamp
// is the oracle. Also checks weak duality and determinism.
TEST(ConicSolveTest, BoxProjectionMatchesClamp) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a[i] = u(rng);
    ConicProgram prog;
    const int t = prog.AddVariables(1);
    const int x = prog.AddVariables(n);
    prog.AddToObjective(LinExpr::Var(t));
    LinExprVec soc{LinExpr::Var(t)};
    LinExprVec box;
    for (int i = 0; i < n; ++i) {
      soc.push_back(LinExpr::Var(x + i) - a[i]);
      box.push_back(LinExpr::Var(x + i) + 1.0);
      box.push_back(1.0 - LinExpr::Var(x + i));
    }
    prog.AddConstraint(ConeType::kSecondOrder, soc);
    prog.AddConstraint(ConeType::kNonnegative, box);
    const auto sol = Solve(prog);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    const double expected = (a - a.cwiseMax(-1.0).cwiseMin(1.0)).norm();
    EXPECT_NEAR(sol.objective, expected, 1e-7);
    EXPECT_LE(sol.dual_objective, sol.objective + 1e-8);
    const auto again = Solve(prog);
    EXPECT_NEAR(again.objective, sol.objective, 1e-9);
  }
}

TEST(ConicSolveTest, DualsSatisfyStationarity) {
  // min x0 + x1  s.t.  x0 + x1 >= 1 (nonneg row),  x >= 0.
  ConicProgram prog;
  const int x = prog.AddVariables(2);
  const LinExpr a = LinExpr::Var(x), b = LinExpr::Var(x + 1);
  prog.AddToObjective(a + 2.0 * b);
  const int cover = prog.AddConstraint(ConeType::kNonnegative, {a + b - 1.0});
  prog.AddConstraint(ConeType::kNonnegative, {a, b});
  const auto sol = Solve(prog);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.duals[cover][0], 1.0, 1e-6);
  EXPECT_NEAR(sol.dual_objective, 1.0, 1e-7);
}

TEST(ConicProgramTest, RejectsUnknownVariable) {
  ConicProgram prog;
  prog.AddVariables(1);
  EXPECT_THROW(prog.AddConstraint(ConeType::kZero, {LinExpr::Var(3)}), std::out_of_range);
  EXPECT_THROW(prog.AddConstraint(ConeType::kZero, {}), std::invalid_argument);
}

TEST(ConicProgramTest, DumpListsRows) {
  ConicProgram prog;
  const int x = prog.AddVariables(1);
  prog.AddToObjective(LinExpr::Var(x));
  prog.AddConstraint(ConeType::kNonnegative, {LinExpr::Var(x) - 1.0}, RowTag::kBound, 4);
  const std::string dump = prog.Dump();
  EXPECT_NE(dump.find("nonneg [bound 4]"), std::string::npos);
}

}  // namespace
}  // namespace gcs
