#pragma once

// Pieces shared by the certificate searches.

#include <cstdint>
#include <string>
#include <vector>

#include "jsrcert/conic_solver.hpp"

namespace jsrcert {

/// Strict feasibility is claimed only when the margin exceeds this value, and
/// infeasibility only when it is below its negative.
inline constexpr double kMarginThreshold = 1e-8;

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr int kDefaultSamples = 1000;

enum class Feasibility { kFeasible, kInfeasible, kUndetermined };

std::string to_string(Feasibility f);

/// Maps a margin solve onto the three outcomes. A margin inside
/// [-threshold, threshold] or a solver that did not converge is undetermined.
Feasibility classify_margin(const conic::ConicSolution& sol, double threshold = kMarginThreshold);

/// `count` points drawn uniformly from the unit sphere in R^n.
std::vector<Vector> sample_unit_vectors(int n, int count, std::uint64_t seed);

/// Smallest eigenvalue of the symmetric part of `a`.
double min_eigenvalue(const Matrix& a);

}  // namespace jsrcert
