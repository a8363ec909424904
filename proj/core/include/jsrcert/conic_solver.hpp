#pragma once

// Small dense conic programs:
//
//   maximize    <c, x>
//   subject to  <a_i, x> = b_i,   i = 1..m
//               x = (X_1, ..., X_p, v_1, ..., v_q, f_1, ..., f_r)
//
// with X_j symmetric PSD blocks, v_j nonnegative vectors and f_j free
// vectors. Solved by an infeasible primal-dual path-following method (HKM
// direction, Mehrotra predictor-corrector). Every solution handed back is
// re-checked by validate_solution(), which only looks at the problem data and
// the returned block values.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jsrcert/linalg.hpp"

namespace jsrcert::conic {

inline constexpr int kMaxPsdBlockSize = 30;
inline constexpr int kMaxEqualities = 600;

enum class BlockKind { kPsd, kNonneg, kFree };

struct Block {
  BlockKind kind = BlockKind::kPsd;
  int size = 0;
};

/// Coefficient on one scalar decision variable. For PSD blocks (row, col)
/// names the symmetric entry X(row, col) = X(col, row); order does not
/// matter. Vector blocks use col = 0.
struct Term {
  int block = 0;
  int row = 0;
  int col = 0;
  double coef = 0.0;
};

class LinearFunctional {
 public:
  LinearFunctional& add(int block, int row, int col, double coef);
  LinearFunctional& add(int block, int index, double coef) { return add(block, index, 0, coef); }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<Term> terms_;
};

struct Equality {
  LinearFunctional lhs;
  double rhs = 0.0;
};

class ConicProblem {
 public:
  int add_psd_block(int size);
  int add_nonneg_block(int size);
  int add_free_block(int size);

  /// Throws std::invalid_argument if a term references an undeclared entry.
  void add_equality(LinearFunctional lhs, double rhs);
  void set_objective(LinearFunctional objective);

  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Equality>& equalities() const { return equalities_; }
  const LinearFunctional& objective() const { return objective_; }

  /// Throws std::invalid_argument when the problem exceeds the size envelope.
  void check_envelope() const;

  /// Human-readable listing of blocks, equality triplets and right-hand
  /// sides. Debugging aid only.
  std::string dump() const;

 private:
  void check_term(const Term& t) const;

  std::vector<Block> blocks_;
  std::vector<Equality> equalities_;
  LinearFunctional objective_;
};

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kMarginBelowTolerance,
  kIterationLimit,
  kNumericalBreakdown,
};

std::string to_string(SolveStatus s);

struct ConicSolution {
  SolveStatus status = SolveStatus::kIterationLimit;
  /// One value per block: s x s for PSD blocks, s x 1 for vector blocks.
  std::vector<Matrix> block_values;
  double objective_value = 0.0;
  /// Upper bound on the optimal value from the dual iterate, when the dual
  /// residual is below tolerance.
  std::optional<double> dual_bound;
  double duality_gap = 0.0;
  double max_equality_residual = 0.0;
  double min_block_eigenvalue = 0.0;
  int iterations = 0;
  int dropped_rows = 0;
  /// Set by feasibility_with_margin: the optimal lambda.
  std::optional<double> margin;
};

struct SolverOptions {
  int iter_limit = 200;
  /// Relative infeasibility / gap accepted as optimal.
  double tolerance = 1e-8;
  /// The solver keeps iterating toward this accuracy while it makes progress.
  double target_tolerance = 1e-11;
};

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});

struct MarginOptions {
  /// lambda* must exceed this for the strict system to count as feasible.
  double threshold = 1e-8;
  /// Add sum of trace(B) = sum of sizes over the margin blocks.
  bool normalize_trace = false;
  SolverOptions solver;
};

/// Replaces each listed PSD block B by B - lambda I >= 0 and maximizes the
/// free scalar lambda; the original objective is ignored. Returned block
/// values are the original B (not the shifted ones). Status is kOptimal when
/// lambda* > threshold and kMarginBelowTolerance when the solve converged
/// with a smaller lambda*.
ConicSolution feasibility_with_margin(const ConicProblem& problem,
                                      std::span<const int> margin_blocks,
                                      const MarginOptions& options = {});

struct Validation {
  /// max |<a_i, x> - b_i| / max(1, |a_i|); rhs_norm uses the same row scaling.
  double max_equality_residual = 0.0;
  double rhs_norm = 0.0;
  double min_block_eigenvalue = 0.0;  // over PSD blocks and nonneg entries
  bool shapes_ok = true;
};

/// Independent residual and cone check for candidate block values.
Validation validate_solution(const ConicProblem& problem, std::span<const Matrix> values);

/// Value of a functional at the given block values.
double evaluate(const LinearFunctional& f, std::span<const Matrix> values);

}  // namespace jsrcert::conic
