#pragma once

// Generators for the parametric 2x2 pairs whose stability certificates need
// unbounded complexity, plus the scaled variant used in the degree table.

#include <optional>
#include <string>

#include "jsrcert/linalg.hpp"

namespace jsrcert {

/// The critical parameter of the Blondel et al. pair, rounded to the
/// nearest double. The exact constant lies within half an ulp of this value,
/// so any double strictly below it is strictly below the true constant.
inline constexpr double kAlphaStar = 0.749326546330367557943961948091344672091;

enum class Family { kKozyakin, kBlondelEtAl, kLagariasWang, kLagariasWangExperiment };
enum class Branch { kStable, kUnstable };

struct FamilySpec {
  Family family = Family::kLagariasWangExperiment;
  int k = 2;
  std::optional<double> alpha;
  Branch branch = Branch::kStable;
  bool scaled = false;
};

/// t = sin(2 pi / (2k + 1)) for the stable branch, sin(2 pi / 2k) for the
/// unstable one. The stable branch is additionally scaled by (1 - 1/k).
MatrixSet kozyakin(int k, Branch branch);

/// {[[1,1],[0,1]], alpha [[1,0],[1,1]]}, 0 < alpha < kAlphaStar.
MatrixSet blondel_et_al(double alpha);

/// {alpha^k [[0,0],[1,0]], alpha^{-1} R}, R the rotation-like matrix with
/// angle pi/2k. Requires 1 < alpha < 1/cos(pi/2k); `scaled` multiplies both
/// by (1 - 1/k).
MatrixSet lagarias_wang(int k, double alpha, bool scaled);

/// Midpoint of the admissible alpha interval, (1 + 1/cos(pi/2k)) / 2.
double lagarias_wang_midpoint(int k);

/// lagarias_wang at the midpoint alpha, scaled by (1 - 1/(1000 k)); k >= 2.
MatrixSet lagarias_wang_experiment(int k);

/// Scale factor (1 - 1/(1000 k)) applied by lagarias_wang_experiment.
double lagarias_wang_experiment_scale(int k);

MatrixSet make_family(const FamilySpec& spec);

std::optional<Family> parse_family(const std::string& name);
std::string family_name(Family f);

}  // namespace jsrcert
