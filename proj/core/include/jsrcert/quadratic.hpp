#pragma once

// Quadratic and piecewise-quadratic Lyapunov functions.
//
// Piecewise certificates use De Bruijn graphs of order l: one piece Q_w per
// word w of length l, linked by shift(i, w) = (i, w_1, ..., w_{l-1}).
//   max:  A_i^T Q_w A_i <= gamma^2 Q_shift(i,w)   certifies V = max_w x^T Q_w x
//   min:  A_i^T Q_shift(i,w) A_i <= gamma^2 Q_w   certifies V = min_w x^T Q_w x
// Pieces are quadratic, so gamma enters squared.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jsrcert/certificate_common.hpp"
#include "jsrcert/linalg.hpp"

namespace jsrcert {

enum class QuadKind { kCqlf, kMaxOfQuadratics, kMinOfQuadratics };

std::string to_string(QuadKind k);
std::optional<QuadKind> parse_quad_kind(const std::string& s);  // cqlf | maxq | minq

struct PiecewiseQuadraticCertificate {
  QuadKind kind = QuadKind::kCqlf;
  int order = 0;  // l; 0 for CQLF
  double gamma = 1.0;
  int symbols = 1;  // m, the alphabet size the pieces are indexed over
  std::vector<Matrix> pieces;  // m^l pieces, words in lexicographic order
  double margin = 0.0;
  /// Smallest eigenvalue of each LMI as re-evaluated from the pieces: the
  /// pieces first, then one entry per (i, w) edge.
  std::vector<double> lmi_margins;
};

struct QuadOptions {
  conic::SolverOptions solver;
  std::uint64_t seed = kDefaultSeed;
  int samples = kDefaultSamples;
  /// Constrain all pieces to be equal (reduces to a CQLF search).
  bool tie_pieces = false;
};

struct QuadResult {
  Feasibility status = Feasibility::kUndetermined;
  std::optional<PiecewiseQuadraticCertificate> certificate;
  std::optional<double> margin;
  std::string note;
};

/// Q >= lambda I, gamma^2 Q - A_i^T Q A_i >= lambda I, trace(Q) = n.
QuadResult cqlf(const MatrixSet& set, double gamma, const QuadOptions& options = {});

/// Normalization sum_w trace(Q_w) = n m^l. Throws std::invalid_argument when
/// the problem exceeds the solver envelope.
QuadResult max_of_quadratics(const MatrixSet& set, int order, double gamma,
                             const QuadOptions& options = {});
QuadResult min_of_quadratics(const MatrixSet& set, int order, double gamma,
                             const QuadOptions& options = {});

QuadResult quadratic_certificate(const MatrixSet& set, QuadKind kind, int order, double gamma,
                                 const QuadOptions& options = {});

/// Word index of shift(i, w) for the lexicographic numbering of length-l
/// words; `i` and the result are 0-based.
int debruijn_shift(int i, int w, int m, int order);

struct QuadCheck {
  bool valid = false;
  double min_piece_eigenvalue = 0.0;
  double min_lmi_eigenvalue = 0.0;
  double worst_sample = 0.0;  // min over samples of (gamma^2 V(x) - V(A x)) / scale
  std::string reason;
};

/// Re-checks every LMI by eigenvalues and V(A_i x) <= gamma^2 V(x) at random
/// unit vectors with V evaluated literally. No solver calls.
QuadCheck validate_quadratic_certificate(const PiecewiseQuadraticCertificate& cert,
                                         const MatrixSet& set,
                                         std::uint64_t seed = kDefaultSeed,
                                         int samples = kDefaultSamples);

struct OrderStatus {
  int order = 0;
  int pieces = 0;
  Feasibility status = Feasibility::kUndetermined;
  std::optional<double> margin;
  std::string note;
};

struct PiecesReport {
  QuadKind kind = QuadKind::kMaxOfQuadratics;
  std::vector<OrderStatus> per_order;
  std::optional<int> min_order;
  std::optional<int> min_pieces;
};

/// Status for l = 1..l_max; stops after the first feasible order unless
/// `stop_at_first` is false. Orders beyond the solver envelope are reported
/// undetermined.
PiecesReport sweep_pieces(const MatrixSet& set, QuadKind kind, int l_max, double gamma,
                          bool stop_at_first = true, const QuadOptions& options = {});

}  // namespace jsrcert
