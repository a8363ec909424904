#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "jsrcert/linalg.hpp"

namespace jsrcert {
namespace {

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Roots of z^2 - tr z + det from the characteristic polynomial.
double char_poly_radius(const Matrix& a) {
  const double tr = a.trace();
  const double det = a.determinant();
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det));
  return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

TEST(SpectralRadius, Nilpotent) { EXPECT_DOUBLE_EQ(spectral_radius(m2(0, 0, 1, 0)), 0.0); }

TEST(SpectralRadius, UpperTriangularShear) {
  EXPECT_NEAR(spectral_radius(m2(1, 1, 0, 1)), 1.0, 1e-15);
}

TEST(SpectralRadius, BlondelProductMatchesCharacteristicRoots) {
  const Matrix p = m2(1, 1, 0, 1) * (0.7 * m2(1, 0, 1, 1));
  // p = 0.7 [[2,1],[1,1]]: eigenvalues 0.7 (3 +- sqrt 5)/2
  EXPECT_NEAR(spectral_radius(p), 0.7 * (3.0 + std::sqrt(5.0)) / 2.0, 1e-14);
  EXPECT_NEAR(spectral_radius(p), char_poly_radius(p), 1e-14);
}

TEST(SpectralRadius, ComplexPair) {
  EXPECT_NEAR(spectral_radius(0.8 * rotation(0.7)), 0.8, 1e-15);
}

TEST(SpectralRadius, LargerMatricesUseGeneralPath) {
  Matrix a = Matrix::Zero(4, 4);
  a.diagonal() << 0.1, -3.0, 2.0, 0.5;
  EXPECT_NEAR(spectral_radius(a), 3.0, 1e-12);
  Matrix c = Matrix::Zero(3, 3);  // cyclic permutation: cube roots of unity
  c(1, 0) = c(2, 1) = c(0, 2) = 1.0;
  EXPECT_NEAR(spectral_radius(2.0 * c), 2.0, 1e-12);
}

TEST(OperatorNorm, Examples) {
  EXPECT_NEAR(operator_norm(Matrix::Identity(2, 2)), 1.0, 1e-15);
  EXPECT_NEAR(operator_norm(m2(2, 0, 0, 0.5)), 2.0, 1e-15);
  for (double t : {0.0, 0.3, 1.0, 2.5, -4.0}) EXPECT_NEAR(operator_norm(rotation(t)), 1.0, 1e-14);
  EXPECT_NEAR(operator_norm(m2(0, 3, 0, 0)), 3.0, 1e-15);
  EXPECT_NEAR(operator_norm(Matrix::Identity(5, 5) * 1.5), 1.5, 1e-12);
}

TEST(MatrixSetTest, Validation) {
  EXPECT_THROW(MatrixSet({}), std::invalid_argument);
  EXPECT_THROW(MatrixSet({Matrix::Zero(2, 3)}), std::invalid_argument);
  EXPECT_THROW(MatrixSet({Matrix::Zero(2, 2), Matrix::Zero(3, 3)}), std::invalid_argument);
  EXPECT_THROW(MatrixSet({Matrix::Zero(9, 9)}), std::invalid_argument);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(MatrixSet({bad}), std::invalid_argument);
  const MatrixSet s({Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)}, "pair");
  EXPECT_EQ(s.dim(), 2);
  EXPECT_EQ(s.size(), 2);
  EXPECT_EQ(s.label(), "pair");
  EXPECT_DOUBLE_EQ(s[2](1, 1), 2.0);
  EXPECT_THROW(s[0], std::out_of_range);
  EXPECT_THROW(s[3], std::out_of_range);
}

TEST(MatrixSetTest, ScaledAndSimilar) {
  const MatrixSet s({m2(1, 2, 3, 4)});
  EXPECT_TRUE(s.scaled(0.5)[1].isApprox(m2(0.5, 1, 1.5, 2)));
  const Matrix t = m2(2, 1, 0, 1);
  EXPECT_TRUE(s.similar(t)[1].isApprox(t.inverse() * m2(1, 2, 3, 4) * t));
}

TEST(WordProduct, Examples) {
  const MatrixSet s({m2(1, 2, 3, 4), m2(0, 1, -1, 0)});
  const std::vector<int> one{1};
  EXPECT_EQ(word_product(s, one).product, s[1]);
  const MatrixSet twos({2.0 * Matrix::Identity(2, 2)});
  const std::vector<int> w11{1, 1};
  EXPECT_TRUE(word_product(twos, w11).product.isApprox(4.0 * Matrix::Identity(2, 2)));
  EXPECT_THROW(word_product(s, std::vector<int>{}), std::invalid_argument);
  EXPECT_THROW(word_product(s, std::vector<int>{3}), std::out_of_range);
  EXPECT_THROW(word_product(s, std::vector<int>{0}), std::out_of_range);
}

TEST(WordProduct, LagariasWangPairByHand) {
  // k = 1 pair with alpha = 1.2: A1 = 1.2 [[0,0],[1,0]], A2 = (1/1.2) [[0,1],[-1,0]].
  const double a = 1.2;
  const MatrixSet s({m2(0, 0, a, 0), m2(0, 1 / a, -1 / a, 0)});
  // word (2,1): A2 applied first, so the product is A1 A2.
  const ProductWord pw = word_product(s, std::vector<int>{2, 1});
  // A1 A2 = [[0,0],[a*0 + 0*(-1/a), a*(1/a) + 0]] = [[0,0],[0,1]]
  EXPECT_NEAR(pw.product(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(pw.product(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(pw.product(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(pw.product(1, 1), 1.0, 1e-15);
  EXPECT_EQ(pw.length(), 2);
}

TEST(Simulate, Examples) {
  const MatrixSet s({0.5 * Matrix::Identity(2, 2)});
  Vector x0(2);
  x0 << 1, 0;
  const auto empty = simulate(s, std::vector<int>{}, x0);
  ASSERT_EQ(empty.size(), 1u);
  EXPECT_EQ(empty[0], x0);
  const auto traj = simulate(s, std::vector<int>{1, 1}, x0);
  ASSERT_EQ(traj.size(), 3u);
  EXPECT_DOUBLE_EQ(traj[1](0), 0.5);
  EXPECT_DOUBLE_EQ(traj[2](0), 0.25);
  EXPECT_DOUBLE_EQ(traj[2](1), 0.0);
}

class LinalgProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{7};
  std::normal_distribution<double> normal{0.0, 1.0};
  Matrix random(int n) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    return a;
  }
};

TEST_F(LinalgProperties, RadiusHomogeneity) {
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3;
    const Matrix a = random(n);
    const double c = 3.0 * normal(rng);
    EXPECT_NEAR(spectral_radius(c * a), std::abs(c) * spectral_radius(a),
                1e-10 * (1.0 + std::abs(c) * spectral_radius(a)));
  }
}

TEST_F(LinalgProperties, RadiusBelowNorm) {
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix a = random(1 + trial % 4);
    EXPECT_LE(spectral_radius(a), operator_norm(a) * (1.0 + 1e-12) + 1e-14);
  }
}

TEST_F(LinalgProperties, NormSubmultiplicative) {
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 4;
    const Matrix a = random(n);
    const Matrix b = random(n);
    EXPECT_LE(operator_norm(a * b), operator_norm(a) * operator_norm(b) * (1.0 + 1e-12));
  }
}

TEST_F(LinalgProperties, TwoByTwoClosedFormsMatchOracles) {
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix a = random(2);
    EXPECT_NEAR(spectral_radius(a), char_poly_radius(a), 1e-12 * (1.0 + char_poly_radius(a)));
    const double oracle = std::sqrt(char_poly_radius(a.transpose() * a));
    EXPECT_NEAR(operator_norm(a), oracle, 1e-12 * (1.0 + oracle));
  }
}

TEST_F(LinalgProperties, ConcatenatedWords) {
  std::uniform_int_distribution<int> sym(1, 3), len(1, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    const MatrixSet s({random(2), random(2), random(2)});
    std::vector<int> u(static_cast<std::size_t>(len(rng))), v(static_cast<std::size_t>(len(rng)));
    for (int& x : u) x = sym(rng);
    for (int& x : v) x = sym(rng);
    std::vector<int> uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    const Matrix lhs = word_product(s, uv).product;
    const Matrix rhs = word_product(s, v).product * word_product(s, u).product;
    EXPECT_LE((lhs - rhs).norm(), 1e-10 * (1.0 + rhs.norm()));
  }
}

}  // namespace
}  // namespace jsrcert
