#include "jsrcert/sos.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "jsrcert/jsr_bounds.hpp"

namespace jsrcert {

namespace {

// Basis pairs (a <= b) of degree-h monomials grouped by the degree-2h
// monomial z_a z_b they produce.
struct GramLayout {
  int n = 0;
  int h = 0;
  std::vector<Exponent> half_basis;
  std::vector<Exponent> full_basis;
  std::vector<std::vector<std::pair<int, int>>> pairs;  // indexed like full_basis
};

GramLayout make_layout(int n, int h) {
  GramLayout g;
  g.n = n;
  g.h = h;
  g.half_basis = monomial_basis(n, h);
  g.full_basis = monomial_basis(n, 2 * h);
  std::map<Exponent, int> index;
  for (std::size_t i = 0; i < g.full_basis.size(); ++i) index.emplace(g.full_basis[i], static_cast<int>(i));
  g.pairs.assign(g.full_basis.size(), {});
  const auto nh = static_cast<int>(g.half_basis.size());
  for (int a = 0; a < nh; ++a) {
    for (int b = a; b < nh; ++b) {
      Exponent e = g.half_basis[static_cast<std::size_t>(a)];
      for (std::size_t v = 0; v < e.size(); ++v) e[v] += g.half_basis[static_cast<std::size_t>(b)][v];
      g.pairs[static_cast<std::size_t>(index.at(e))].emplace_back(a, b);
    }
  }
  return g;
}

double pair_weight(int a, int b) { return a == b ? 1.0 : 2.0; }

// Adds coef * (coefficient beta of z^T G z) to f.
void add_coefficient(conic::LinearFunctional& f, const GramLayout& g, int block, int beta,
                     double coef) {
  for (const auto& [a, b] : g.pairs[static_cast<std::size_t>(beta)]) {
    f.add(block, a, b, coef * pair_weight(a, b));
  }
}

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

Vector gram_to_coeffs(int n, int half_degree, const Matrix& gram) {
  const GramLayout g = make_layout(n, half_degree);
  if (gram.rows() != static_cast<Eigen::Index>(g.half_basis.size()) || gram.cols() != gram.rows()) {
    throw std::invalid_argument("gram_to_coeffs: Gram matrix does not match the basis size");
  }
  Vector c = Vector::Zero(static_cast<Eigen::Index>(g.full_basis.size()));
  for (std::size_t beta = 0; beta < g.pairs.size(); ++beta) {
    for (const auto& [a, b] : g.pairs[beta]) {
      c(static_cast<Eigen::Index>(beta)) +=
          a == b ? gram(a, a) : gram(a, b) + gram(b, a);
    }
  }
  return c;
}

GramProblem gram_problem(const std::vector<HomogeneousPolynomial>& targets,
                         const std::vector<bool>& margins) {
  if (targets.empty()) throw std::invalid_argument("gram_problem: no targets");
  if (margins.size() != targets.size()) {
    throw std::invalid_argument("gram_problem: one margin flag per target is required");
  }
  const int n = targets.front().vars();
  const int d = targets.front().degree();
  for (const auto& t : targets) {
    if (t.vars() != n || t.degree() != d) {
      throw std::invalid_argument("gram_problem: targets must share variables and degree");
    }
  }
  if (d % 2 != 0 || d < 2) throw std::invalid_argument("gram_problem: degree must be even and >= 2");
  const GramLayout g = make_layout(n, d / 2);
  GramProblem out;
  out.basis = g.half_basis;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const int block = out.problem.add_psd_block(static_cast<int>(g.half_basis.size()));
    out.blocks.push_back(block);
    if (margins[t]) out.margin_blocks.push_back(block);
    for (std::size_t beta = 0; beta < g.full_basis.size(); ++beta) {
      conic::LinearFunctional f;
      add_coefficient(f, g, block, static_cast<int>(beta), 1.0);
      out.problem.add_equality(std::move(f), targets[t].coeffs()(static_cast<Eigen::Index>(beta)));
    }
  }
  return out;
}

SosResult sos_lyapunov_feasible(const MatrixSet& set, int degree, double gamma,
                                const SosOptions& options) {
  if (degree < 2 || degree % 2 != 0) {
    throw std::invalid_argument("sos_lyapunov_feasible: degree must be even and >= 2");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("sos_lyapunov_feasible: gamma must be > 0");
  const int n = set.dim();
  const GramLayout g = make_layout(n, degree / 2);
  const auto nh = static_cast<int>(g.half_basis.size());
  const auto nd = static_cast<int>(g.full_basis.size());

  conic::ConicProblem prob;
  const int gp = prob.add_psd_block(nh);
  std::vector<int> gi;
  for (int i = 0; i < set.size(); ++i) gi.push_back(prob.add_psd_block(nh));

  const double gd = std::pow(gamma, degree);
  for (int i = 0; i < set.size(); ++i) {
    // coeffs(gamma^d p - p o A_i) = M c(G_p)
    Matrix m = -composition_matrix(degree, set[i + 1]);
    m.diagonal().array() += gd;
    for (int beta = 0; beta < nd; ++beta) {
      conic::LinearFunctional f;
      add_coefficient(f, g, gi[static_cast<std::size_t>(i)], beta, 1.0);
      for (int alpha = 0; alpha < nd; ++alpha) {
        if (m(beta, alpha) != 0.0) add_coefficient(f, g, gp, alpha, -m(beta, alpha));
      }
      prob.add_equality(std::move(f), 0.0);
    }
  }
  conic::LinearFunctional trace;
  for (int a = 0; a < nh; ++a) trace.add(gp, a, a, 1.0);
  prob.add_equality(std::move(trace), 1.0);

  std::vector<int> margin_blocks{gp};
  margin_blocks.insert(margin_blocks.end(), gi.begin(), gi.end());
  conic::MarginOptions mo;
  mo.solver = options.solver;
  const conic::ConicSolution sol = conic::feasibility_with_margin(prob, margin_blocks, mo);

  SosResult res;
  res.solver_status = sol.status;
  res.iterations = sol.iterations;
  res.margin = sol.margin;
  res.status = classify_margin(sol);
  if (res.status != Feasibility::kFeasible) return res;

  SosLyapunovCertificate cert;
  cert.gamma = gamma;
  const Matrix& g_p = sol.block_values[static_cast<std::size_t>(gp)];
  cert.p = HomogeneousPolynomial(n, degree, gram_to_coeffs(n, degree / 2, g_p));
  cert.gram_p = GramCertificate{g.half_basis, g_p, *sol.margin};
  for (const int b : gi) {
    cert.gram_decrease.push_back(
        GramCertificate{g.half_basis, sol.block_values[static_cast<std::size_t>(b)], *sol.margin});
  }
  const SosCheck check = validate_sos_certificate(cert, set, options.seed, options.samples);
  if (!check.valid) {
    res.status = Feasibility::kUndetermined;
    res.note = "certificate failed validation: " + check.reason;
    return res;
  }
  res.certificate = std::move(cert);
  return res;
}

SosCheck validate_sos_certificate(const SosLyapunovCertificate& cert, const MatrixSet& set,
                                  std::uint64_t seed, int samples) {
  SosCheck c;
  const int n = cert.p.vars();
  const int d = cert.p.degree();
  auto fail = [&](std::string why) {
    c.valid = false;
    c.reason = std::move(why);
    return c;
  };
  if (n != set.dim()) return fail("polynomial and matrix set dimensions differ");
  if (d < 2 || d % 2 != 0) return fail("degree must be even and >= 2");
  if (static_cast<int>(cert.gram_decrease.size()) != set.size()) {
    return fail("expected one decrease Gram matrix per matrix");
  }
  const std::vector<Exponent> basis = monomial_basis(n, d / 2);
  const auto nh = static_cast<Eigen::Index>(basis.size());

  c.min_margin = std::numeric_limits<double>::infinity();
  auto check_gram = [&](const GramCertificate& gc, const Vector& target, const char* what) -> bool {
    if (gc.basis != basis || gc.gram.rows() != nh || gc.gram.cols() != nh) {
      fail(std::string(what) + ": Gram basis does not match degree");
      return false;
    }
    if ((gc.gram - gc.gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + gc.gram.cwiseAbs().maxCoeff())) {
      fail(std::string(what) + ": Gram matrix is not symmetric");
      return false;
    }
    const Vector recon = gram_to_coeffs(n, d / 2, gc.gram);
    const double r = max_abs(recon - target) / (1.0 + max_abs(target));
    c.reconstruction_residual = std::max(c.reconstruction_residual, r);
    if (!(r <= 1e-7)) {
      fail(std::string(what) + ": Gram reconstruction residual " + std::to_string(r));
      return false;
    }
    const double lmin = min_eigenvalue(gc.gram);
    c.min_margin = std::min(c.min_margin, lmin);
    if (!(gc.margin > kMarginThreshold)) {
      fail(std::string(what) + ": margin not above threshold");
      return false;
    }
    if (lmin < gc.margin - 1e-9) {
      fail(std::string(what) + ": Gram eigenvalue below stated margin");
      return false;
    }
    return true;
  };

  if (!check_gram(cert.gram_p, cert.p.coeffs(), "p")) return c;
  const double gd = std::pow(cert.gamma, d);
  std::vector<HomogeneousPolynomial> images;
  for (int i = 1; i <= set.size(); ++i) {
    images.push_back(compose_linear(cert.p, set[i]));
    const Vector target = gd * cert.p.coeffs() - images.back().coeffs();
    if (!check_gram(cert.gram_decrease[static_cast<std::size_t>(i - 1)], target, "decrease")) return c;
  }

  c.worst_sample = std::numeric_limits<double>::infinity();
  for (const Vector& x : sample_unit_vectors(n, samples, seed)) {
    const double px = cert.p.evaluate(x);
    if (!(px > 0.0)) return fail("p is not positive at a sample point");
    for (int i = 1; i <= set.size(); ++i) {
      const double pa = cert.p.evaluate(set[i] * x);
      const double scale = std::abs(gd * px) + std::abs(pa);
      const double rel = (gd * px - pa) / scale;
      c.worst_sample = std::min(c.worst_sample, rel);
      if (rel < -1e-9) return fail("decrease violated at a sample point");
    }
  }
  c.valid = true;
  return c;
}

bool MinDegreeReport::any_undetermined() const {
  return std::any_of(per_degree.begin(), per_degree.end(),
                     [](const DegreeStatus& s) { return s.status == Feasibility::kUndetermined; });
}

std::string MinDegreeReport::status_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < per_degree.size(); ++i) {
    if (i) os << ';';
    os << per_degree[i].degree << ':' << to_string(per_degree[i].status);
  }
  return os.str();
}

MinDegreeReport min_sos_degree(const MatrixSet& set, int d_max, double gamma,
                               const SosOptions& options) {
  if (d_max < 2 || d_max % 2 != 0) throw std::invalid_argument("min_sos_degree: d_max must be even and >= 2");
  MinDegreeReport rep;
  for (int d = 2; d <= d_max; d += 2) {
    SosResult r = sos_lyapunov_feasible(set, d, gamma, options);
    rep.per_degree.push_back(DegreeStatus{d, r.status, r.margin});
    if (r.status == Feasibility::kFeasible) {
      rep.min_degree = d;
      rep.certificate = std::move(r.certificate);
      break;
    }
  }
  return rep;
}

SosUpperBound jsr_upper_sos(const MatrixSet& set, int degree, double tol, const SosOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("jsr_upper_sos: tol must be > 0");
  SosUpperBound out;
  out.initial_lower = rho_lower(set, 4).value;
  out.initial_upper = rho_upper(set, 4).value;
  double lo = out.initial_lower;
  double hi = out.initial_upper;
  std::optional<SosLyapunovCertificate> best;

  auto probe = [&](double gamma) {
    ++out.probes;
    if (!(gamma > 0.0)) return false;
    SosResult r = sos_lyapunov_feasible(set, degree, gamma, options);
    if (r.status == Feasibility::kUndetermined) ++out.undetermined_probes;
    if (r.status != Feasibility::kFeasible) return false;
    best = std::move(r.certificate);
    return true;
  };

  bool found = probe(hi);
  for (int widen = 0; !found && widen < 60; ++widen) {
    lo = std::max(lo, hi);
    hi += std::max(tol, 0.01 * hi);
    found = probe(hi);
  }
  if (!found) {
    std::ostringstream os;
    os << "jsr_upper_sos: no certificate found up to gamma = " << hi << " (" << out.probes
       << " probes, " << out.undetermined_probes << " undetermined)";
    throw std::runtime_error(os.str());
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.value = hi;
  out.certificate = std::move(*best);
  return out;
}

}  // namespace jsrcert
