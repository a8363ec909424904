#pragma once

// Sum-of-squares Lyapunov functions.
//
// A form p of even degree d is SOS when p(x) = z(x)^T G z(x) for some G >= 0,
// where z(x) lists the degree-d/2 monomials in graded-lex order. A set S has
// an SOS Lyapunov function at rate gamma when p and every
// gamma^d p(x) - p(A_i x) are SOS with a strictly positive definite Gram
// matrix; this implies rho(S) <= gamma.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jsrcert/certificate_common.hpp"
#include "jsrcert/conic_solver.hpp"
#include "jsrcert/linalg.hpp"
#include "jsrcert/polynomial.hpp"

namespace jsrcert {

struct GramCertificate {
  std::vector<Exponent> basis;
  Matrix gram;
  double margin = 0.0;
};

/// Coefficients of z(x)^T G z(x) over monomial_basis(n, 2 * half_degree).
Vector gram_to_coeffs(int n, int half_degree, const Matrix& gram);

struct GramProblem {
  conic::ConicProblem problem;
  std::vector<int> blocks;         // one PSD block per target
  std::vector<int> margin_blocks;  // blocks flagged for the margin pattern
  std::vector<Exponent> basis;     // degree d/2 monomials
};

/// One Gram block per target with coefficient matching equalities. Throws
/// std::invalid_argument for odd or mismatched degrees, or an empty list.
GramProblem gram_problem(const std::vector<HomogeneousPolynomial>& targets,
                         const std::vector<bool>& margins);

struct SosLyapunovCertificate {
  HomogeneousPolynomial p{1, 0};
  GramCertificate gram_p;
  std::vector<GramCertificate> gram_decrease;  // one per matrix
  double gamma = 1.0;
  int degree() const { return p.degree(); }
};

struct SosOptions {
  conic::SolverOptions solver;
  std::uint64_t seed = kDefaultSeed;
  int samples = kDefaultSamples;
};

struct SosResult {
  Feasibility status = Feasibility::kUndetermined;
  std::optional<SosLyapunovCertificate> certificate;
  std::optional<double> margin;
  conic::SolveStatus solver_status = conic::SolveStatus::kIterationLimit;
  int iterations = 0;
  std::string note;
};

/// Searches for p of degree d with trace(G_p) = 1, margins on every Gram
/// block. A feasible answer always carries a certificate that passed
/// validate_sos_certificate(); if validation fails the answer is downgraded to
/// undetermined.
SosResult sos_lyapunov_feasible(const MatrixSet& set, int degree, double gamma,
                                const SosOptions& options = {});

struct SosCheck {
  bool valid = false;
  double reconstruction_residual = 0.0;  // relative to 1 + max |target coefficient|
  double min_margin = 0.0;               // smallest Gram eigenvalue
  double worst_sample = 0.0;             // min over samples of the decrease, relative
  std::string reason;
};

/// Independent check against `set`: Gram reconstructions, Gram eigenvalues
/// against the stored margins, and the decrease gamma^d p(x) - p(A_i x) >= 0
/// at `samples` random unit vectors. Makes no solver calls.
SosCheck validate_sos_certificate(const SosLyapunovCertificate& cert, const MatrixSet& set,
                                  std::uint64_t seed = kDefaultSeed,
                                  int samples = kDefaultSamples);

struct DegreeStatus {
  int degree = 0;
  Feasibility status = Feasibility::kUndetermined;
  std::optional<double> margin;
};

struct MinDegreeReport {
  std::optional<int> min_degree;
  std::vector<DegreeStatus> per_degree;  // d = 2, 4, ... until the first feasible
  std::optional<SosLyapunovCertificate> certificate;
  bool any_undetermined() const;
  /// "2:infeasible;4:infeasible;6:feasible"
  std::string status_string() const;
};

MinDegreeReport min_sos_degree(const MatrixSet& set, int d_max, double gamma = 1.0,
                               const SosOptions& options = {});

struct SosUpperBound {
  double value = 0.0;
  double initial_lower = 0.0;
  double initial_upper = 0.0;
  int probes = 0;
  int undetermined_probes = 0;
  SosLyapunovCertificate certificate;
};

/// Bisection on gamma over [rho_lower(S,4), rho_upper(S,4)], widening the
/// upper end until a certificate is found. Only certified gammas are ever
/// returned, so the value is a valid upper bound on the JSR. Throws
/// std::runtime_error when no probe succeeds.
SosUpperBound jsr_upper_sos(const MatrixSet& set, int degree, double tol,
                            const SosOptions& options = {});

}  // namespace jsrcert
