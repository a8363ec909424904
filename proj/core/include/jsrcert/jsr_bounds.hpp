#pragma once

// Joint spectral radius bounds by product enumeration.
//
// For words of length t, rho(P)^{1/t} is a lower bound and the maximum of
// |P|^{1/t} over all words of that length is an upper bound (spectral norm).
// Enumeration is depth-first in lexicographic word order, so witnesses are
// reproducible.

#include <cstdint>

#include "jsrcert/linalg.hpp"

namespace jsrcert {

/// Relative tolerance under which two rho(P)^{1/t} values count as tied.
/// Ties go to the shorter word, then to the lexicographically smaller one.
inline constexpr double kWitnessTieTolerance = 1e-12;

inline constexpr std::int64_t kDefaultProductBudget = std::int64_t{1} << 24;

struct LowerBound {
  double value = 0.0;
  ProductWord witness;
  bool truncated = false;  // budget ran out before all words were visited
};

struct UpperBound {
  double value = 0.0;
  int best_length = 0;     // t attaining the minimum over rho_t
  int completed_depth = 0; // lengths 1..completed_depth fully enumerated
  bool truncated = false;
};

/// max over words of length <= max_len of rho(P)^{1/t}.
LowerBound rho_lower(const MatrixSet& set, int max_len,
                     std::int64_t budget = kDefaultProductBudget);

/// min over t <= max_len of max over words of length t of |P|^{1/t}.
/// When the budget runs out the minimum over completed lengths is returned.
UpperBound rho_upper(const MatrixSet& set, int max_len,
                     std::int64_t budget = kDefaultProductBudget);

struct JsrBracket {
  double lower = 0.0;
  double upper = 0.0;
  ProductWord lower_witness;
  int depth = 0;                 // deepest word length explored
  std::int64_t pruned_count = 0; // words not extended because of the bound
  std::int64_t products = 0;     // products evaluated
  bool converged = false;        // upper - lower <= delta

  double gap() const { return upper - lower; }
};

/// Both exhaustive bounds at once, sharing one enumeration.
JsrBracket exhaustive_bracket(const MatrixSet& set, int max_len,
                              std::int64_t budget = kDefaultProductBudget);

struct GripenbergOptions {
  double delta = 1e-2;
  std::int64_t budget = 1'000'000;
  int max_depth = 64;
};

/// Branch and bound refinement. Each word carries the bound
///   e(w) = min over splits w = u v of max(e(u), |v|^{1/|v|}),
/// and is not extended once e(w) <= lower + delta. The depth cap is deepened
/// one level at a time; the returned bracket is the one from the last depth
/// completed within the budget.
JsrBracket gripenberg(const MatrixSet& set, const GripenbergOptions& options = {});

struct OptimalProductReport {
  ProductWord witness;
  double value = 0.0;
  double upper = 0.0;
  bool certified_tight = false;  // value >= upper - tol
};

inline constexpr double kDefaultTightTolerance = 1e-6;

OptimalProductReport optimal_product_search(const MatrixSet& set, int max_len,
                                            double tol = kDefaultTightTolerance);

}  // namespace jsrcert
