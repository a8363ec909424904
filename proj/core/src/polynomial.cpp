#include "jsrcert/polynomial.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace jsrcert {

std::vector<Exponent> monomial_basis(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("monomial_basis: need n >= 1 and d >= 0");
  std::vector<Exponent> out;
  Exponent e(static_cast<std::size_t>(n), 0);
  // Lexicographically decreasing exponents of a fixed total degree.
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      e[static_cast<std::size_t>(pos)] = left;
      out.push_back(e);
      return;
    }
    for (int a = left; a >= 0; --a) {
      e[static_cast<std::size_t>(pos)] = a;
      rec(pos + 1, left - a);
    }
  };
  rec(0, d);
  return out;
}

int monomial_count(int n, int d) {
  // C(n + d - 1, d)
  double c = 1.0;
  for (int i = 1; i <= n - 1; ++i) c = c * (d + i) / i;
  return static_cast<int>(std::lround(c));
}

HomogeneousPolynomial::HomogeneousPolynomial(int n, int d)
    : HomogeneousPolynomial(n, d, Vector::Zero(monomial_count(n, d))) {}

HomogeneousPolynomial::HomogeneousPolynomial(int n, int d, Vector coeffs)
    : n_(n), d_(d), basis_(monomial_basis(n, d)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<Eigen::Index>(basis_.size())) {
    throw std::invalid_argument("HomogeneousPolynomial: expected " +
                                std::to_string(basis_.size()) + " coefficients, got " +
                                std::to_string(coeffs_.size()));
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], static_cast<int>(i));
}

HomogeneousPolynomial HomogeneousPolynomial::from_terms(
    int n, int d, const std::vector<std::pair<Exponent, double>>& terms) {
  HomogeneousPolynomial p(n, d);
  for (const auto& [e, c] : terms) {
    const int i = p.index_of(e);
    if (i < 0) throw std::invalid_argument("from_terms: exponent does not have degree d");
    p.coeffs_(i) += c;
  }
  return p;
}

int HomogeneousPolynomial::index_of(const Exponent& e) const {
  const auto it = index_.find(e);
  return it == index_.end() ? -1 : it->second;
}

double HomogeneousPolynomial::coeff(const Exponent& e) const {
  const int i = index_of(e);
  return i < 0 ? 0.0 : coeffs_(i);
}

void HomogeneousPolynomial::set_coeff(const Exponent& e, double value) {
  const int i = index_of(e);
  if (i < 0) throw std::invalid_argument("set_coeff: exponent does not have degree d");
  coeffs_(i) = value;
}

double HomogeneousPolynomial::evaluate(const Vector& x) const {
  if (x.size() != n_) throw std::invalid_argument("evaluate: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const double c = coeffs_(static_cast<Eigen::Index>(i));
    if (c == 0.0) continue;
    double term = c;
    for (int v = 0; v < n_; ++v) {
      const int a = basis_[i][static_cast<std::size_t>(v)];
      if (a > 0) term *= std::pow(x(v), a);
    }
    acc += term;
  }
  return acc;
}

HomogeneousPolynomial HomogeneousPolynomial::operator+(const HomogeneousPolynomial& o) const {
  if (o.n_ != n_ || o.d_ != d_) throw std::invalid_argument("polynomial shape mismatch");
  return HomogeneousPolynomial(n_, d_, coeffs_ + o.coeffs_);
}

HomogeneousPolynomial HomogeneousPolynomial::operator-(const HomogeneousPolynomial& o) const {
  if (o.n_ != n_ || o.d_ != d_) throw std::invalid_argument("polynomial shape mismatch");
  return HomogeneousPolynomial(n_, d_, coeffs_ - o.coeffs_);
}

HomogeneousPolynomial HomogeneousPolynomial::operator*(double c) const {
  return HomogeneousPolynomial(n_, d_, c * coeffs_);
}

namespace {

// Multiplies a degree-k form by the linear form sum_v l(v) x_v.
Vector times_linear(const Vector& f, const std::vector<Exponent>& from,
                    const std::map<Exponent, int>& to_index, const Vector& l) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(to_index.size()));
  const int n = static_cast<int>(l.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    const double c = f(static_cast<Eigen::Index>(i));
    if (c == 0.0) continue;
    Exponent e = from[i];
    for (int v = 0; v < n; ++v) {
      if (l(v) == 0.0) continue;
      ++e[static_cast<std::size_t>(v)];
      out(to_index.at(e)) += c * l(v);
      --e[static_cast<std::size_t>(v)];
    }
  }
  return out;
}

}  // namespace

Matrix composition_matrix(int d, const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("composition_matrix: matrix must be square");
  std::vector<std::vector<Exponent>> bases;
  std::vector<std::map<Exponent, int>> indices;
  for (int k = 0; k <= d; ++k) {
    bases.push_back(monomial_basis(n, k));
    std::map<Exponent, int> idx;
    for (std::size_t i = 0; i < bases.back().size(); ++i) idx.emplace(bases.back()[i], static_cast<int>(i));
    indices.push_back(std::move(idx));
  }
  const auto& top = bases[static_cast<std::size_t>(d)];
  Matrix t(static_cast<Eigen::Index>(top.size()), static_cast<Eigen::Index>(top.size()));
  // Column j: the monomial x^e evaluated at A x, i.e. prod_v (row_v(A) x)^{e_v}.
  for (std::size_t j = 0; j < top.size(); ++j) {
    Vector f = Vector::Ones(1);
    int k = 0;
    for (int v = 0; v < n; ++v) {
      const Vector row = a.row(v).transpose();
      for (int r = 0; r < top[j][static_cast<std::size_t>(v)]; ++r) {
        f = times_linear(f, bases[static_cast<std::size_t>(k)], indices[static_cast<std::size_t>(k + 1)], row);
        ++k;
      }
    }
    t.col(static_cast<Eigen::Index>(j)) = f;
  }
  return t;
}

HomogeneousPolynomial compose_linear(const HomogeneousPolynomial& p, const Matrix& a) {
  if (a.rows() != p.vars() || a.cols() != p.vars()) {
    throw std::invalid_argument("compose_linear: matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", polynomial has " +
                                std::to_string(p.vars()) + " variables");
  }
  return HomogeneousPolynomial(p.vars(), p.degree(), composition_matrix(p.degree(), a) * p.coeffs());
}

}  // namespace jsrcert
