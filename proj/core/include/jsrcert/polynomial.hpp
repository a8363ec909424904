#pragma once

// Homogeneous polynomials in n variables with dense coefficient vectors over
// the graded-lexicographic monomial basis.

#include <map>
#include <utility>
#include <vector>

#include "jsrcert/linalg.hpp"

namespace jsrcert {

/// Exponent multi-index (a_1, ..., a_n).
using Exponent = std::vector<int>;

/// All exponents of total degree d in n variables, in graded-lex order
/// (x_1^d first, x_n^d last).
std::vector<Exponent> monomial_basis(int n, int d);

/// Number of monomials of degree d in n variables.
int monomial_count(int n, int d);

class HomogeneousPolynomial {
 public:
  /// The zero form.
  HomogeneousPolynomial(int n, int d);
  /// `coeffs` indexed like monomial_basis(n, d).
  HomogeneousPolynomial(int n, int d, Vector coeffs);

  static HomogeneousPolynomial from_terms(int n, int d,
                                          const std::vector<std::pair<Exponent, double>>& terms);

  int vars() const { return n_; }
  int degree() const { return d_; }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }
  const std::vector<Exponent>& basis() const { return basis_; }

  /// Coefficient of x^e; zero when e is not of degree d.
  double coeff(const Exponent& e) const;
  void set_coeff(const Exponent& e, double value);
  /// Position of e in the basis, or -1.
  int index_of(const Exponent& e) const;

  double evaluate(const Vector& x) const;

  HomogeneousPolynomial operator+(const HomogeneousPolynomial& o) const;
  HomogeneousPolynomial operator-(const HomogeneousPolynomial& o) const;
  HomogeneousPolynomial operator*(double c) const;

 private:
  int n_;
  int d_;
  std::vector<Exponent> basis_;
  std::map<Exponent, int> index_;
  Vector coeffs_;
};

/// Matrix T with coeffs(p o A) = T * coeffs(p) for every degree-d form p.
Matrix composition_matrix(int d, const Matrix& a);

/// x -> p(A x). Throws std::invalid_argument on a dimension mismatch.
HomogeneousPolynomial compose_linear(const HomogeneousPolynomial& p, const Matrix& a);

}  // namespace jsrcert
