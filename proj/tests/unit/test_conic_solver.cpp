#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "conic_instances.hpp"
#include "jsrcert/conic_solver.hpp"

namespace jsrcert::conic {
namespace {

TEST(ConicAnalytic, TwelveInstances) {
  const auto instances = testing::analytic_conic_instances();
  ASSERT_EQ(instances.size(), 12u);
  for (const auto& inst : instances) {
    const ConicSolution sol = inst.run();
    EXPECT_EQ(sol.status, inst.expected_status) << inst.name << ": " << to_string(sol.status);
    EXPECT_NEAR(testing::instance_value(inst, sol), inst.expected_value, 1e-7) << inst.name;
  }
}

TEST(ConicSolve, InfeasibleNegativeDiagonal) {
  ConicProblem p;
  const int x = p.add_psd_block(2);
  p.add_equality(LinearFunctional().add(x, 0, 0, 1.0), -1.0);
  p.set_objective(LinearFunctional().add(x, 1, 1, 1.0));
  EXPECT_EQ(solve(p).status, SolveStatus::kInfeasible);
}

TEST(ConicSolve, UnboundedRay) {
  ConicProblem p;
  const int v = p.add_nonneg_block(2);
  p.add_equality(LinearFunctional().add(v, 0, 1.0).add(v, 1, -1.0), 1.0);
  p.set_objective(LinearFunctional().add(v, 0, 1.0));
  EXPECT_EQ(solve(p).status, SolveStatus::kUnbounded);
}

TEST(ConicSolve, OptimalSolutionsPassValidator) {
  for (const auto& inst : testing::analytic_conic_instances()) {
    const ConicSolution sol = inst.run();
    if (sol.status != SolveStatus::kOptimal || inst.is_margin) continue;
    EXPECT_LE(sol.max_equality_residual, 1e-8) << inst.name;
    EXPECT_GE(sol.min_block_eigenvalue, -1e-9) << inst.name;
  }
}

TEST(ConicSolve, DependentRowsAreDropped) {
  ConicProblem p;
  const int v = p.add_nonneg_block(2);
  p.add_equality(LinearFunctional().add(v, 0, 1.0).add(v, 1, 1.0), 3.0);
  p.add_equality(LinearFunctional().add(v, 0, 2.0).add(v, 1, 2.0), 6.0);
  p.set_objective(LinearFunctional().add(v, 0, 1.0));
  const ConicSolution sol = solve(p);
  EXPECT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_EQ(sol.dropped_rows, 1);
  EXPECT_NEAR(sol.objective_value, 3.0, 1e-7);
}

TEST(ConicSolve, InconsistentDependentRowsAreInfeasible) {
  ConicProblem p;
  const int v = p.add_nonneg_block(2);
  p.add_equality(LinearFunctional().add(v, 0, 1.0).add(v, 1, 1.0), 3.0);
  p.add_equality(LinearFunctional().add(v, 0, 2.0).add(v, 1, 2.0), 5.0);
  p.set_objective(LinearFunctional().add(v, 0, 1.0));
  EXPECT_EQ(solve(p).status, SolveStatus::kInfeasible);
}

TEST(ConicProblemTest, TermValidation) {
  ConicProblem p;
  const int x = p.add_psd_block(2);
  const int v = p.add_nonneg_block(3);
  EXPECT_THROW(p.add_equality(LinearFunctional().add(x, 2, 0, 1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(p.add_equality(LinearFunctional().add(v, 3, 1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(p.add_equality(LinearFunctional().add(v, 1, 1, 1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(p.add_equality(LinearFunctional().add(7, 0, 1.0), 0.0), std::invalid_argument);
  EXPECT_NO_THROW(p.add_equality(LinearFunctional().add(x, 1, 0, 1.0), 0.0));
  EXPECT_FALSE(p.dump().empty());
}

TEST(ConicProblemTest, Envelope) {
  ConicProblem big;
  big.add_psd_block(kMaxPsdBlockSize + 1);
  EXPECT_THROW(big.check_envelope(), std::invalid_argument);
  EXPECT_THROW(solve(big), std::invalid_argument);
  ConicProblem rows;
  const int v = rows.add_nonneg_block(1);
  for (int i = 0; i <= kMaxEqualities; ++i) rows.add_equality(LinearFunctional().add(v, 0, 1.0), 1.0);
  EXPECT_THROW(rows.check_envelope(), std::invalid_argument);
}

TEST(ConicMargin, SingleBlockFixedToIdentity) {
  ConicProblem p;
  const int q = p.add_psd_block(2);
  p.add_equality(LinearFunctional().add(q, 0, 0, 1.0), 1.0);
  p.add_equality(LinearFunctional().add(q, 0, 1, 1.0), 0.0);
  p.add_equality(LinearFunctional().add(q, 1, 1, 1.0), 1.0);
  const int blocks[] = {q};
  const ConicSolution sol = feasibility_with_margin(p, blocks);
  ASSERT_TRUE(sol.margin);
  EXPECT_NEAR(*sol.margin, 1.0, 1e-8);
  EXPECT_EQ(sol.status, SolveStatus::kOptimal);
  // Returned values are the original block, not the shifted one.
  EXPECT_NEAR(sol.block_values[0](0, 0), 1.0, 1e-8);
}

TEST(ConicMargin, CqlfForExpansionIsNonPositive) {
  const ConicSolution sol = testing::cqlf_margin({2.0 * Matrix::Identity(2, 2)}, 1.0);
  ASSERT_TRUE(sol.margin);
  EXPECT_LE(*sol.margin, 0.0);
  EXPECT_EQ(sol.status, SolveStatus::kMarginBelowTolerance);
}

TEST(ConicValidate, IndependentResiduals) {
  ConicProblem p;
  const int x = p.add_psd_block(2);
  const int v = p.add_nonneg_block(1);
  p.add_equality(LinearFunctional().add(x, 0, 1, 2.0).add(v, 0, 1.0), 1.0);
  Matrix xv(2, 2);
  xv << 1.0, 0.25, 0.25, 1.0;
  Matrix vv(1, 1);
  vv << 0.5;
  const std::vector<Matrix> vals{xv, vv};
  const Validation ok = validate_solution(p, vals);
  EXPECT_TRUE(ok.shapes_ok);
  EXPECT_NEAR(ok.max_equality_residual, 0.0, 1e-15);
  EXPECT_NEAR(ok.min_block_eigenvalue, 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(evaluate(p.equalities()[0].lhs, vals), 1.0);
  Matrix bad = xv;
  bad(0, 1) = bad(1, 0) = 2.0;
  const std::vector<Matrix> badv{bad, vv};
  const Validation b = validate_solution(p, badv);
  EXPECT_GT(b.max_equality_residual, 1.0);
  EXPECT_LT(b.min_block_eigenvalue, 0.0);
  const std::vector<Matrix> wrong{xv};
  EXPECT_FALSE(validate_solution(p, wrong).shapes_ok);
}

TEST(ConicSolve, Deterministic) {
  for (const auto& inst : testing::analytic_conic_instances()) {
    const ConicSolution a = inst.run();
    const ConicSolution b = inst.run();
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.objective_value, b.objective_value);
    ASSERT_EQ(a.block_values.size(), b.block_values.size());
    for (std::size_t i = 0; i < a.block_values.size(); ++i) EXPECT_EQ(a.block_values[i], b.block_values[i]);
  }
}

// Random small SDPs: X in S^n_+, v >= 0, m random equalities with a right-hand
// side that is feasible by construction (or infeasible when forced).
ConicProblem random_problem(std::mt19937_64& rng, bool make_infeasible, const std::vector<double>& row_scale) {
  std::normal_distribution<double> normal;
  ConicProblem p;
  const int n = 3;
  const int x = p.add_psd_block(n);
  const int v = p.add_nonneg_block(2);
  Matrix x0 = Matrix::Identity(n, n);
  std::vector<LinearFunctional> rows;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < row_scale.size(); ++i) {
    LinearFunctional f;
    double b = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c) {
        const double a = normal(rng);
        f.add(x, r, c, a * row_scale[i]);
        b += a * x0(r, c);
      }
    const double a0 = normal(rng), a1 = normal(rng);
    f.add(v, 0, a0 * row_scale[i]).add(v, 1, a1 * row_scale[i]);
    b += a0 + a1;
    p.add_equality(f, b * row_scale[i]);
  }
  if (make_infeasible) {
    // trace(X) + v_0 + v_1 = -1 cannot hold on the cone.
    LinearFunctional f;
    for (int r = 0; r < n; ++r) f.add(x, r, r, 1.0);
    f.add(v, 0, 1.0).add(v, 1, 1.0);
    p.add_equality(f, -1.0);
  }
  LinearFunctional obj;
  for (int r = 0; r < n; ++r) obj.add(x, r, r, -1.0);  // bounded: -trace(X)
  obj.add(v, 0, -1.0).add(v, 1, -1.0);
  p.set_objective(obj);
  return p;
}

TEST(ConicProperties, DiagonalRescalingKeepsClassification) {
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const bool infeas = trial % 4 == 0;
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 4);
    std::vector<double> ones(m, 1.0), scales(m);
    std::mt19937_64 srng(trial);
    for (double& s : scales) s = scale(srng);
    std::mt19937_64 r1(1000 + trial), r2(1000 + trial);
    const ConicSolution a = solve(random_problem(r1, infeas, ones));
    const ConicSolution b = solve(random_problem(r2, infeas, scales));
    const bool a_opt = a.status == SolveStatus::kOptimal, b_opt = b.status == SolveStatus::kOptimal;
    const bool a_inf = a.status == SolveStatus::kInfeasible, b_inf = b.status == SolveStatus::kInfeasible;
    EXPECT_EQ(a_opt, b_opt) << trial << " " << to_string(a.status) << " vs " << to_string(b.status);
    EXPECT_EQ(a_inf, b_inf) << trial;
    EXPECT_EQ(a_inf, infeas) << trial;
    if (a_opt && b_opt) {
      EXPECT_NEAR(a.objective_value, b.objective_value, 1e-6 * (1.0 + std::abs(a.objective_value)));
    }
    optimal += a_opt;
    infeasible += a_inf;
  }
  EXPECT_EQ(optimal, 75);
  EXPECT_EQ(infeasible, 25);
}

TEST(ConicProperties, OptimalSolutionsValidate) {
  std::vector<double> ones(4, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(5000 + trial);
    const ConicProblem p = random_problem(rng, false, ones);
    const ConicSolution sol = solve(p);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal);
    const Validation v = validate_solution(p, sol.block_values);
    EXPECT_LE(v.max_equality_residual, 1e-8 * std::max(1.0, v.rhs_norm));
    EXPECT_GE(v.min_block_eigenvalue, -1e-9);
    ASSERT_TRUE(sol.dual_bound);
    EXPECT_GE(*sol.dual_bound, sol.objective_value - 1e-6);
  }
}

}  // namespace
}  // namespace jsrcert::conic
