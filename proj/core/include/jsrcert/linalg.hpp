#pragma once

// Dense small-matrix primitives shared by every other part of the library.
//
// A switched linear system is given by a finite set {A_1, ..., A_m} of real
// n x n matrices, with trajectories x_{j} = A_{s_j} x_{j-1}. Words over the
// alphabet {1, ..., m} index matrix products; symbols are 1-based so that
// reported witnesses read exactly like the A_i labels.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jsrcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest dimension accepted anywhere in the library.
inline constexpr int kMaxDimension = 8;

/// A word s_1 s_2 ... s_t over {1, ..., m}; s_1 is applied first.
using Word = std::vector<int>;

/// A finite, nonempty set of square matrices of a common dimension.
class MatrixSet {
 public:
  /// Throws std::invalid_argument unless `members` is nonempty, square,
  /// finite, of a common dimension in [1, kMaxDimension].
  explicit MatrixSet(std::vector<Matrix> members, std::string label = {});

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(members_.size()); }
  const std::string& label() const { return label_; }
  const std::vector<Matrix>& members() const { return members_; }

  /// Matrix for the 1-based symbol `i`.
  const Matrix& operator[](int i) const;

  /// Every member multiplied by `c`; the label is kept.
  MatrixSet scaled(double c) const;

  /// {T^{-1} A_i T}.
  MatrixSet similar(const Matrix& t) const;

 private:
  std::vector<Matrix> members_;
  std::string label_;
  int dim_ = 0;
};

/// A word together with its evaluated product A_{s_t} ... A_{s_1}.
struct ProductWord {
  Word word;
  Matrix product;

  int length() const { return static_cast<int>(word.size()); }
};

/// max |lambda| over the eigenvalues of `a`. Closed form for n <= 2.
double spectral_radius(const Matrix& a);

/// Largest singular value of `a`. Closed form for n <= 2.
double operator_norm(const Matrix& a);

/// Evaluates A_{s_t} ... A_{s_1}. Throws std::out_of_range on a symbol
/// outside [1, m] and std::invalid_argument on an empty word.
ProductWord word_product(const MatrixSet& set, std::span<const int> word);

/// Trajectory (x_0, x_1, ..., x_t) with x_j = A_{s_j} x_{j-1}.
std::vector<Vector> simulate(const MatrixSet& set, std::span<const int> word,
                             const Vector& x0);

/// Planar rotation by `angle` radians.
Matrix rotation(double angle);

}  // namespace jsrcert
