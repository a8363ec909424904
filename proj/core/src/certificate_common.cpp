#include "jsrcert/certificate_common.hpp"

#include <random>

namespace jsrcert {

std::string to_string(Feasibility f) {
  switch (f) {
    case Feasibility::kFeasible: return "feasible";
    case Feasibility::kInfeasible: return "infeasible";
    case Feasibility::kUndetermined: return "undetermined";
  }
  return "unknown";
}

Feasibility classify_margin(const conic::ConicSolution& sol, double threshold) {
  using conic::SolveStatus;
  switch (sol.status) {
    case SolveStatus::kOptimal:
    case SolveStatus::kMarginBelowTolerance:
      break;
    case SolveStatus::kInfeasible:
      return Feasibility::kInfeasible;
    case SolveStatus::kUnbounded:
      // Margin unbounded above: strictly feasible.
      return Feasibility::kFeasible;
    default:
      return Feasibility::kUndetermined;
  }
  if (!sol.margin) return Feasibility::kUndetermined;
  if (*sol.margin > threshold) return Feasibility::kFeasible;
  if (*sol.margin < -threshold) return Feasibility::kInfeasible;
  return Feasibility::kUndetermined;
}

std::vector<Vector> sample_unit_vectors(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = g(rng);
    const double nrm = v.norm();
    if (nrm < 1e-12) continue;
    out.push_back(v / nrm);
  }
  return out;
}

double min_eigenvalue(const Matrix& a) {
  const Matrix s = 0.5 * (a + a.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace jsrcert
