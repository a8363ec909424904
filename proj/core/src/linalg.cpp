#include "jsrcert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jsrcert {

MatrixSet::MatrixSet(std::vector<Matrix> members, std::string label)
    : members_(std::move(members)), label_(std::move(label)) {
  if (members_.empty()) {
    throw std::invalid_argument("MatrixSet: at least one matrix is required");
  }
  dim_ = static_cast<int>(members_.front().rows());
  if (dim_ < 1 || dim_ > kMaxDimension) {
    throw std::invalid_argument("MatrixSet: dimension must be in [1, " +
                                std::to_string(kMaxDimension) + "]");
  }
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const Matrix& a = members_[i];
    if (a.rows() != dim_ || a.cols() != dim_) {
      throw std::invalid_argument("MatrixSet: matrix " + std::to_string(i + 1) +
                                  " is not " + std::to_string(dim_) + "x" +
                                  std::to_string(dim_));
    }
    if (!a.allFinite()) {
      throw std::invalid_argument("MatrixSet: matrix " + std::to_string(i + 1) +
                                  " has non-finite entries");
    }
  }
}

const Matrix& MatrixSet::operator[](int i) const {
  if (i < 1 || i > size()) {
    throw std::out_of_range("MatrixSet: symbol " + std::to_string(i) +
                            " outside [1, " + std::to_string(size()) + "]");
  }
  return members_[static_cast<std::size_t>(i - 1)];
}

MatrixSet MatrixSet::scaled(double c) const {
  std::vector<Matrix> out;
  out.reserve(members_.size());
  for (const Matrix& a : members_) out.push_back(c * a);
  return MatrixSet(std::move(out), label_);
}

MatrixSet MatrixSet::similar(const Matrix& t) const {
  const Eigen::PartialPivLU<Matrix> lu(t);
  std::vector<Matrix> out;
  out.reserve(members_.size());
  for (const Matrix& a : members_) out.push_back(lu.solve(a * t));
  return MatrixSet(std::move(out), label_);
}

namespace {

// Roots of z^2 - tr z + det; returns the larger modulus.
double quadratic_root_modulus(double tr, double det) {
  const double half = 0.5 * tr;
  const double disc = half * half - det;
  if (disc < 0.0) return std::sqrt(det);
  return std::abs(half) + std::sqrt(disc);
}

}  // namespace

double spectral_radius(const Matrix& a) {
  const auto n = a.rows();
  if (n == 0) return 0.0;
  if (n == 1) return std::abs(a(0, 0));
  if (n == 2) {
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return quadratic_root_modulus(tr, det);
  }
  const Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& a) {
  const auto n = a.rows();
  if (n == 0) return 0.0;
  if (n == 1) return std::abs(a(0, 0));
  if (n == 2) {
    // sigma_max^2 is the large root of z^2 - |A|_F^2 z + det(A)^2.
    const double fro2 = a.squaredNorm();
    const double det = std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
    const double disc = std::max(0.0, (fro2 - 2.0 * det) * (fro2 + 2.0 * det));
    return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
  }
  const Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

ProductWord word_product(const MatrixSet& set, std::span<const int> word) {
  if (word.empty()) {
    throw std::invalid_argument("word_product: word must be nonempty");
  }
  ProductWord out{Word(word.begin(), word.end()), set[word.front()]};
  for (std::size_t j = 1; j < word.size(); ++j) {
    out.product = set[word[j]] * out.product;
  }
  return out;
}

std::vector<Vector> simulate(const MatrixSet& set, std::span<const int> word,
                             const Vector& x0) {
  if (x0.size() != set.dim()) {
    throw std::invalid_argument("simulate: initial state has dimension " +
                                std::to_string(x0.size()) + ", expected " +
                                std::to_string(set.dim()));
  }
  std::vector<Vector> traj;
  traj.reserve(word.size() + 1);
  traj.push_back(x0);
  for (const int s : word) traj.push_back(set[s] * traj.back());
  return traj;
}

Matrix rotation(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace jsrcert
