#pragma once

// Analytic conic instances with known optima, shared by the unit tests and
// the acceptance binary.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "jsrcert/conic_solver.hpp"

namespace jsrcert::testing {

struct ConicInstance {
  std::string name;
  conic::SolveStatus expected_status;
  double expected_value;  // objective, or lambda* for margin instances
  bool is_margin;
  std::function<conic::ConicSolution()> run;
};

// Q >= 0, B_i = gamma^2 Q - A_i^T Q A_i, trace(Q) = n, margin on Q and B_i.
inline conic::ConicSolution cqlf_margin(const std::vector<Matrix>& as, double gamma) {
  using namespace conic;
  const int n = static_cast<int>(as.front().rows());
  ConicProblem p;
  const int q = p.add_psd_block(n);
  std::vector<int> margin{q};
  for (const Matrix& a : as) {
    const int b = p.add_psd_block(n);
    margin.push_back(b);
    for (int r = 0; r < n; ++r) {
      for (int c = r; c < n; ++c) {
        LinearFunctional f;
        f.add(b, r, c, 1.0);
        f.add(q, r, c, -gamma * gamma);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) f.add(q, k, l, a(k, r) * a(l, c));
        p.add_equality(std::move(f), 0.0);
      }
    }
  }
  LinearFunctional tr;
  for (int i = 0; i < n; ++i) tr.add(q, i, i, 1.0);
  p.add_equality(std::move(tr), n);
  return feasibility_with_margin(p, margin);
}

// Q - A^T Q A = I with Q symmetric; maximize the given entry weights.
inline conic::ConicSolution lyapunov(const Matrix& a, const Matrix& weight) {
  using namespace conic;
  const int n = static_cast<int>(a.rows());
  ConicProblem p;
  const int q = p.add_psd_block(n);
  for (int r = 0; r < n; ++r) {
    for (int c = r; c < n; ++c) {
      LinearFunctional f;
      f.add(q, r, c, 1.0);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) f.add(q, k, l, -a(k, r) * a(l, c));
      p.add_equality(std::move(f), r == c ? 1.0 : 0.0);
    }
  }
  LinearFunctional obj;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (weight(r, c) != 0.0) obj.add(q, r, c, weight(r, c));
  p.set_objective(std::move(obj));
  return solve(p);
}

inline std::vector<ConicInstance> analytic_conic_instances() {
  using namespace conic;
  using S = SolveStatus;
  std::vector<ConicInstance> out;

  out.push_back({"identity margin 3x3", S::kOptimal, 1.0, true, [] {
                   ConicProblem p;
                   const int x = p.add_psd_block(3);
                   for (int r = 0; r < 3; ++r)
                     for (int c = r; c < 3; ++c) p.add_equality(LinearFunctional().add(x, r, c, 1.0), r == c);
                   const int blocks[] = {x};
                   return feasibility_with_margin(p, blocks);
                 }});

  out.push_back({"LP single slack", S::kOptimal, 3.0, false, [] {
                   ConicProblem p;
                   const int v = p.add_nonneg_block(2);  // (x, s)
                   p.add_equality(LinearFunctional().add(v, 0, 1.0).add(v, 1, 1.0), 3.0);
                   p.set_objective(LinearFunctional().add(v, 0, 1.0));
                   return solve(p);
                 }});

  out.push_back({"LP corner", S::kOptimal, 5.0, false, [] {
                   ConicProblem p;
                   const int v = p.add_nonneg_block(4);  // (x, y, s1, s2)
                   p.add_equality(LinearFunctional().add(v, 0, 1.0).add(v, 1, 1.0).add(v, 2, 1.0), 4.0);
                   p.add_equality(LinearFunctional().add(v, 0, 1.0).add(v, 1, 3.0).add(v, 3, 1.0), 6.0);
                   p.set_objective(LinearFunctional().add(v, 0, 1.0).add(v, 1, 2.0));
                   return solve(p);
                 }});

  out.push_back({"2x2 off-diagonal", S::kOptimal, 1.0, false, [] {
                   ConicProblem p;
                   const int x = p.add_psd_block(2);
                   p.add_equality(LinearFunctional().add(x, 0, 0, 1.0), 1.0);
                   p.add_equality(LinearFunctional().add(x, 1, 1, 1.0), 1.0);
                   p.set_objective(LinearFunctional().add(x, 0, 1, 1.0));
                   return solve(p);
                 }});

  out.push_back({"elliptope max off-diagonal sum", S::kOptimal, 6.0, false, [] {
                   ConicProblem p;
                   const int x = p.add_psd_block(3);
                   LinearFunctional obj;
                   for (int i = 0; i < 3; ++i) {
                     p.add_equality(LinearFunctional().add(x, i, i, 1.0), 1.0);
                     for (int j = 0; j < 3; ++j)
                       if (i != j) obj.add(x, i, j, 1.0);
                   }
                   p.set_objective(std::move(obj));
                   return solve(p);
                 }});

  out.push_back({"elliptope min total sum", S::kOptimal, 0.0, false, [] {
                   ConicProblem p;
                   const int x = p.add_psd_block(3);
                   LinearFunctional obj;
                   for (int i = 0; i < 3; ++i) {
                     p.add_equality(LinearFunctional().add(x, i, i, 1.0), 1.0);
                     for (int j = 0; j < 3; ++j) obj.add(x, i, j, -1.0);
                   }
                   p.set_objective(std::move(obj));
                   return solve(p);
                 }});

  out.push_back({"free and nonnegative", S::kOptimal, 2.0, false, [] {
                   ConicProblem p;
                   const int f = p.add_free_block(1);
                   const int v = p.add_nonneg_block(1);
                   p.add_equality(LinearFunctional().add(f, 0, 1.0).add(v, 0, 1.0), 2.0);
                   p.set_objective(LinearFunctional().add(f, 0, 1.0).add(v, 0, -3.0));
                   return solve(p);
                 }});

  out.push_back({"Lyapunov diagonal", S::kOptimal, 1.0 / 0.75 + 1.0 / 0.36, false, [] {
                   Matrix a = Matrix::Zero(2, 2);
                   a(0, 0) = 0.5;
                   a(1, 1) = -0.8;
                   return lyapunov(a, Matrix::Identity(2, 2));
                 }});

  out.push_back({"Lyapunov scaled rotation", S::kOptimal, 1.0 / (1.0 - 0.36), false, [] {
                   Matrix a(2, 2);
                   a << std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4);
                   Matrix w = Matrix::Zero(2, 2);
                   w(0, 0) = 1.0;
                   return lyapunov(0.6 * a, w);
                 }});

  out.push_back({"infeasible expansion 2I", S::kMarginBelowTolerance, -3.0, true, [] {
                   return cqlf_margin({2.0 * Matrix::Identity(2, 2)}, 1.0);
                 }});

  out.push_back({"contraction pair CQLF", S::kOptimal, 1.0 - 0.81, true, [] {
                   Matrix r(2, 2);
                   r << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
                   return cqlf_margin({0.5 * Matrix::Identity(2, 2), 0.9 * r}, 1.0);
                 }});

  out.push_back({"empty constraints, trace normalized", S::kOptimal, 1.0, true, [] {
                   ConicProblem p;
                   const int q = p.add_psd_block(2);
                   MarginOptions opt;
                   opt.normalize_trace = true;
                   const int blocks[] = {q};
                   return feasibility_with_margin(p, blocks, opt);
                 }});
  return out;
}

inline double instance_value(const ConicInstance& inst, const conic::ConicSolution& sol) {
  if (inst.is_margin) return sol.margin.value_or(NAN);
  return sol.objective_value;
}

}  // namespace jsrcert::testing
