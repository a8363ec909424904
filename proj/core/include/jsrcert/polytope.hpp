#pragma once

// Polytopic Lyapunov functions V(x) = max_i |c_i^T x| in the plane.
//
// A facet set {c_i} certifies rate gamma for A when every A^T c_i is a
// combination sum_j l_j c_j with sum_j |l_j| <= gamma, which gives
// V(A x) <= gamma V(x).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jsrcert/certificate_common.hpp"
#include "jsrcert/linalg.hpp"

namespace jsrcert {

/// Slack allowed on sum |l_j| <= gamma.
double facet_tolerance(double gamma);

struct FacetMultipliers {
  /// Row i holds the multipliers expressing A^T c_i over the facets.
  Matrix lambda;
  /// max_i sum_j |lambda(i, j)|.
  double worst_ratio = 0.0;
};

/// Minimizes sum |l_j| per facet (exactly, by enumerating the at most
/// two-element supports of the basic solutions) and succeeds iff every
/// optimum is <= gamma + facet_tolerance(gamma). Rows of `facets` are the
/// c_i. Throws std::invalid_argument unless n = 2 and the facets span R^2.
std::optional<FacetMultipliers> facet_decrease_lp(const Matrix& facets, const Matrix& a,
                                                  double gamma);

/// Same optimum for one facet, without the gamma test.
FacetMultipliers facet_decrease_values(const Matrix& facets, const Matrix& a);

struct PolytopeCertificate {
  Matrix facets;  // d x 2, one row per +-pair
  double gamma = 1.0;
  std::vector<Matrix> multipliers;  // one d x d matrix per A_i
};

enum class PolytopeInit { kEigen, kSquare };

std::optional<PolytopeInit> parse_polytope_init(const std::string& s);  // eig | square
std::string to_string(PolytopeInit init);

struct PolytopeResult {
  std::optional<PolytopeCertificate> certificate;
  /// Hull vertex count (both members of each +-pair) after each iteration,
  /// starting with the initial set.
  std::vector<int> vertex_trajectory;
  int vertex_count = 0;
  int facet_count = 0;
  bool degenerate_fixpoint = false;  // a rank-1 invariant segment was reached first
  std::string failure;
};

/// Invariant-polytope iteration: map hull vertices by A_i / gamma, keep the
/// images outside the symmetric hull (tolerance 1e-9 relative to the hull's
/// max-norm), stop when nothing is added. A rank-1 fixpoint is widened by the
/// orthogonal direction and the iteration continues. Requires n = 2,
/// max_vertices >= 4 and gamma > rho_lower(S, 6); otherwise a failure is
/// reported.
PolytopeResult invariant_polytope_iterate(const MatrixSet& set, double gamma, int max_vertices,
                                          PolytopeInit init = PolytopeInit::kEigen);

struct PolytopeCheck {
  bool valid = false;
  double worst_ratio = 0.0;   // max over matrices and facets of sum |l|
  double worst_sample = 0.0;  // min over samples of (gamma V(x) - V(A x)) / scale
  std::string reason;
};

/// Checks the stored multipliers reproduce A^T c_i with sum |l| <= gamma,
/// and V(A_i x) <= gamma V(x) at random unit vectors. No solver calls.
PolytopeCheck validate_polytope_certificate(const PolytopeCertificate& cert,
                                            const MatrixSet& set,
                                            std::uint64_t seed = kDefaultSeed,
                                            int samples = kDefaultSamples);

double polytope_norm(const Matrix& facets, const Vector& x);

}  // namespace jsrcert
