#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "jsrcert/families.hpp"
#include "jsrcert/jsr_bounds.hpp"
#include "jsrcert/sos.hpp"

namespace jsrcert {
namespace {

using conic::SolveStatus;

HomogeneousPolynomial poly(int n, int d, const std::vector<std::pair<Exponent, double>>& terms) {
  return HomogeneousPolynomial::from_terms(n, d, terms);
}

conic::ConicSolution solve_gram(const HomogeneousPolynomial& target) {
  GramProblem gp = gram_problem({target}, {true});
  return conic::feasibility_with_margin(gp.problem, gp.margin_blocks);
}

double monomial(const Exponent& e, const Vector& x) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) v *= std::pow(x(static_cast<Eigen::Index>(i)), e[i]);
  return v;
}

TEST(GramProblemTest, SumOfSquares) {
  const auto sol = solve_gram(poly(2, 2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}}));
  ASSERT_TRUE(sol.margin);
  EXPECT_NEAR(*sol.margin, 1.0, 1e-8);
  EXPECT_TRUE(sol.block_values[0].isApprox(Matrix::Identity(2, 2), 1e-7));
  EXPECT_EQ(classify_margin(sol), Feasibility::kFeasible);
}

TEST(GramProblemTest, BoundaryForm) {
  // x^2 y^2 = (xy)^2: the Gram matrix over (x^2, xy, y^2) is singular.
  const auto sol = solve_gram(poly(2, 4, {{{2, 2}, 1.0}}));
  ASSERT_TRUE(sol.margin);
  EXPECT_LE(std::abs(*sol.margin), 1e-7);
  EXPECT_NE(classify_margin(sol), Feasibility::kFeasible);
}

TEST(GramProblemTest, NegativeForm) {
  const auto sol = solve_gram(poly(2, 2, {{{2, 0}, -1.0}}));
  EXPECT_EQ(classify_margin(sol), Feasibility::kInfeasible);
}

TEST(GramProblemTest, Errors) {
  EXPECT_THROW(gram_problem({}, {}), std::invalid_argument);
  EXPECT_THROW(gram_problem({HomogeneousPolynomial(2, 3)}, {true}), std::invalid_argument);
  EXPECT_THROW(gram_problem({HomogeneousPolynomial(2, 2), HomogeneousPolynomial(2, 4)}, {true, true}),
               std::invalid_argument);
}

TEST(GramToCoeffs, MatchesQuadraticFormEvaluation) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 2;
    const int h = 1 + trial % 3;
    const auto basis = monomial_basis(n, h);
    const auto s = static_cast<Eigen::Index>(basis.size());
    Matrix g(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
      for (Eigen::Index j = 0; j < s; ++j) g(i, j) = normal(rng);
    g = (g + g.transpose()).eval();
    const HomogeneousPolynomial p(n, 2 * h, gram_to_coeffs(n, h, g));
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = normal(rng);
    Vector z(s);
    for (Eigen::Index i = 0; i < s; ++i) z(i) = monomial(basis[static_cast<std::size_t>(i)], x);
    const double direct = z.dot(g * z);
    EXPECT_NEAR(p.evaluate(x), direct, 1e-10 * (1.0 + z.squaredNorm() * g.cwiseAbs().maxCoeff()));
  }
}

TEST(SosLyapunov, ContractionHasQuadratic) {
  const SosResult r = sos_lyapunov_feasible(MatrixSet({0.5 * Matrix::Identity(2, 2)}), 2, 1.0);
  EXPECT_EQ(r.status, Feasibility::kFeasible);
  ASSERT_TRUE(r.certificate);
  EXPECT_TRUE(validate_sos_certificate(*r.certificate, MatrixSet({0.5 * Matrix::Identity(2, 2)})).valid);
  // Any valid p is a positive multiple of x^2 + y^2 up to the off-diagonal slack.
  EXPECT_GT(r.certificate->p.coeff({2, 0}), 0.0);
}

TEST(SosLyapunov, ExperimentK2) {
  const MatrixSet s = lagarias_wang_experiment(2);
  EXPECT_EQ(sos_lyapunov_feasible(s, 4, 1.0).status, Feasibility::kInfeasible);
  const SosResult six = sos_lyapunov_feasible(s, 6, 1.0);
  EXPECT_EQ(six.status, Feasibility::kFeasible);
  ASSERT_TRUE(six.certificate);
  const SosCheck c = validate_sos_certificate(*six.certificate, s);
  EXPECT_TRUE(c.valid) << c.reason;
  EXPECT_LE(c.reconstruction_residual, 1e-7);
  EXPECT_GT(c.min_margin, 1e-8);
  EXPECT_GE(c.worst_sample, -1e-9);
}

TEST(SosLyapunov, ExpansionHasNone) {
  const MatrixSet s({2.0 * Matrix::Identity(2, 2)});
  for (int d : {2, 4, 6}) EXPECT_EQ(sos_lyapunov_feasible(s, d, 1.0).status, Feasibility::kInfeasible) << d;
}

TEST(SosLyapunov, RejectsOddDegree) {
  EXPECT_THROW(sos_lyapunov_feasible(MatrixSet({Matrix::Identity(2, 2)}), 3, 1.0), std::invalid_argument);
}

TEST(SosValidation, TamperedCertificatesFail) {
  const MatrixSet s({0.5 * Matrix::Identity(2, 2), 0.9 * rotation(0.3)});
  const SosResult r = sos_lyapunov_feasible(s, 4, 1.0);
  ASSERT_TRUE(r.certificate);
  ASSERT_TRUE(validate_sos_certificate(*r.certificate, s).valid);

  SosLyapunovCertificate bad = *r.certificate;
  bad.p.coeffs()(0) += 0.1;
  EXPECT_FALSE(validate_sos_certificate(bad, s).valid);

  bad = *r.certificate;
  bad.gram_decrease[0].gram(0, 0) -= 10.0;
  EXPECT_FALSE(validate_sos_certificate(bad, s).valid);

  bad = *r.certificate;
  bad.gamma = 0.5;
  EXPECT_FALSE(validate_sos_certificate(bad, s).valid);

  // Same certificate checked against a larger system.
  EXPECT_FALSE(validate_sos_certificate(*r.certificate, s.scaled(3.0)).valid);
}

TEST(MinSosDegree, Examples) {
  const MinDegreeReport k2 = min_sos_degree(lagarias_wang_experiment(2), 8);
  EXPECT_EQ(k2.min_degree, 6);
  EXPECT_EQ(k2.status_string(), "2:infeasible;4:infeasible;6:feasible");
  ASSERT_TRUE(k2.certificate);
  EXPECT_EQ(k2.certificate->degree(), 6);

  EXPECT_EQ(min_sos_degree(lagarias_wang_experiment(3), 12).min_degree, 10);
  EXPECT_EQ(min_sos_degree(MatrixSet({0.9 * rotation(0.5)}), 6).min_degree, 2);

  const MinDegreeReport none = min_sos_degree(MatrixSet({2.0 * Matrix::Identity(2, 2)}), 4);
  EXPECT_FALSE(none.min_degree);
  EXPECT_FALSE(none.any_undetermined());
  EXPECT_EQ(none.per_degree.size(), 2u);
}

TEST(MinSosDegree, ShrinkingNeverIncreasesDegree) {
  for (int k = 2; k <= 4; ++k) {
    const MatrixSet s = lagarias_wang_experiment(k);
    const auto base = min_sos_degree(s, 16).min_degree;
    ASSERT_TRUE(base);
    for (double c : {0.99, 0.95, 0.8}) {
      const auto shrunk = min_sos_degree(s.scaled(c), 16).min_degree;
      ASSERT_TRUE(shrunk);
      EXPECT_LE(*shrunk, *base) << "k=" << k << " c=" << c;
    }
  }
}

TEST(JsrUpperSos, ScalarMultipleOfIdentity) {
  for (double a : {0.3, 1.0, 2.5}) {
    const SosUpperBound ub = jsr_upper_sos(MatrixSet({a * Matrix::Identity(2, 2)}), 2, 1e-4);
    EXPECT_GE(ub.value, a - 1e-9);
    EXPECT_LE(ub.value, a + 1e-4 + 1e-9);
    EXPECT_TRUE(validate_sos_certificate(ub.certificate, MatrixSet({a * Matrix::Identity(2, 2)})).valid);
  }
}

TEST(JsrUpperSos, CrossChecksWithEnumeration) {
  const MatrixSet b = blondel_et_al(0.7);
  GripenbergOptions opt;
  opt.delta = 0.02;
  const double lo = gripenberg(b, opt).lower;
  const SosUpperBound ub = jsr_upper_sos(b, 2, 1e-3);
  EXPECT_GE(ub.value, lo);
  EXPECT_TRUE(validate_sos_certificate(ub.certificate, b).valid);

  const MatrixSet lw = lagarias_wang(2, lagarias_wang_midpoint(2), false);
  const SosUpperBound u6 = jsr_upper_sos(lw, 6, 1e-4);
  EXPECT_GE(u6.value, 1.0 - 1e-4);
  EXPECT_LE(u6.value, rho_upper(lw, 4).value + 1e-9);
}

TEST(SosProperties, CertificatesAlwaysValidate) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  int feasible = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Matrix a(2, 2), b(2, 2);
    a << normal(rng), normal(rng), normal(rng), normal(rng);
    b << normal(rng), normal(rng), normal(rng), normal(rng);
    const MatrixSet s({a, b});
    const double gamma = 1.05 * rho_upper(s, 4).value;
    const SosResult r = sos_lyapunov_feasible(s, 2 + 2 * (trial % 2), gamma);
    if (r.status != Feasibility::kFeasible) continue;
    ++feasible;
    ASSERT_TRUE(r.certificate);
    EXPECT_TRUE(validate_sos_certificate(*r.certificate, s, 1234, 1000).valid);
  }
  EXPECT_GT(feasible, 30);
}

}  // namespace
}  // namespace jsrcert
