#include "jsrcert/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "jsrcert/jsr_bounds.hpp"

namespace jsrcert {

namespace {

using Point = Eigen::Vector2d;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

void require_planar_facets(const Matrix& facets) {
  if (facets.cols() != 2) throw std::invalid_argument("polytope facets must be 2-vectors");
  if (facets.rows() < 2) throw std::invalid_argument("polytope facets must span R^2");
  const Eigen::FullPivLU<Matrix> lu(facets);
  if (lu.rank() < 2) throw std::invalid_argument("polytope facets must span R^2");
}

// Convex hull of pts and -pts, counter-clockwise, collinear points dropped.
std::vector<Point> symmetric_hull(const std::vector<Point>& pts, double tol) {
  std::vector<Point> all;
  all.reserve(2 * pts.size());
  for (const Point& p : pts) {
    all.push_back(p);
    all.push_back(-p);
  }
  std::sort(all.begin(), all.end(), [](const Point& a, const Point& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (all.size() < 3) return all;
  std::vector<Point> hull(2 * all.size());
  std::size_t k = 0;
  auto turn = [&](const Point& o, const Point& a, const Point& b) {
    const Point e = a - o;
    const double len = e.norm();
    return len == 0.0 ? 0.0 : cross(e, b - o) / len;
  };
  for (const Point& p : all) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= tol) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = all.rbegin() + 1; it != all.rend(); ++it) {
    while (k >= lower && turn(hull[k - 2], hull[k - 1], *it) <= tol) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

bool inside(const std::vector<Point>& hull, const Point& w, double tol) {
  if (hull.size() == 2) {
    const Point& v = hull[0];
    const double len = v.norm();
    if (len == 0.0) return w.norm() <= tol;
    return std::abs(cross(v, w)) / len <= tol && std::abs(v.dot(w)) / len <= len + tol;
  }
  if (hull.size() < 2) return w.norm() <= tol;
  for (std::size_t j = 0; j < hull.size(); ++j) {
    const Point& a = hull[j];
    const Point& b = hull[(j + 1) % hull.size()];
    const Point e = b - a;
    if (cross(e, w - a) / e.norm() < -tol) return false;
  }
  return true;
}

double hull_scale(const std::vector<Point>& hull) {
  double s = 0.0;
  for (const Point& p : hull) s = std::max(s, p.cwiseAbs().maxCoeff());
  return s;
}

std::vector<Point> initial_points(const MatrixSet& set, PolytopeInit init) {
  if (init == PolytopeInit::kSquare) return {Point(1.0, 0.0), Point(0.0, 1.0)};
  const Matrix p = rho_lower(set, 6).witness.product;
  const Eigen::EigenSolver<Matrix> es(p);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(best)) + 1e-12) best = i;
  }
  const Eigen::VectorXcd v = es.eigenvectors().col(best);
  std::vector<Point> out;
  const Point re(v(0).real(), v(1).real());
  const Point im(v(0).imag(), v(1).imag());
  const double big = std::max(re.norm(), im.norm());
  for (const Point& q : {re, im}) {
    if (q.norm() > 1e-9 * big) out.push_back(q / q.cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace

double facet_tolerance(double gamma) { return 1e-9 * std::max(1.0, gamma); }

FacetMultipliers facet_decrease_values(const Matrix& facets, const Matrix& a) {
  require_planar_facets(facets);
  if (a.rows() != 2 || a.cols() != 2) throw std::invalid_argument("facet_decrease_lp: A must be 2x2");
  const auto d = facets.rows();
  FacetMultipliers out;
  out.lambda = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Point t = a.transpose() * facets.row(i).transpose();
    if (t.norm() == 0.0) continue;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < d; ++j) {
      const Point cj = facets.row(j).transpose();
      for (Eigen::Index k = j + 1; k < d; ++k) {
        const Point ck = facets.row(k).transpose();
        const double det = cross(cj, ck);
        if (std::abs(det) <= 1e-14 * cj.norm() * ck.norm()) continue;
        // t = lj cj + lk ck
        const double lj = cross(t, ck) / det;
        const double lk = cross(cj, t) / det;
        const double cost = std::abs(lj) + std::abs(lk);
        if (cost < best) {
          best = cost;
          out.lambda.row(i).setZero();
          out.lambda(i, j) = lj;
          out.lambda(i, k) = lk;
        }
      }
    }
    out.worst_ratio = std::max(out.worst_ratio, best);
  }
  return out;
}

std::optional<FacetMultipliers> facet_decrease_lp(const Matrix& facets, const Matrix& a, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("facet_decrease_lp: gamma must be > 0");
  FacetMultipliers m = facet_decrease_values(facets, a);
  if (m.worst_ratio > gamma + facet_tolerance(gamma)) return std::nullopt;
  return m;
}

std::optional<PolytopeInit> parse_polytope_init(const std::string& s) {
  if (s == "eig") return PolytopeInit::kEigen;
  if (s == "square") return PolytopeInit::kSquare;
  return std::nullopt;
}

std::string to_string(PolytopeInit init) {
  return init == PolytopeInit::kEigen ? "eig" : "square";
}

double polytope_norm(const Matrix& facets, const Vector& x) {
  return (facets * x).cwiseAbs().maxCoeff();
}

PolytopeResult invariant_polytope_iterate(const MatrixSet& set, double gamma, int max_vertices,
                                          PolytopeInit init) {
  PolytopeResult res;
  if (set.dim() != 2) {
    res.failure = "polytope search is implemented for n = 2 only";
    return res;
  }
  if (max_vertices < 4) {
    res.failure = "max_vertices must be >= 4";
    return res;
  }
  const double lower = rho_lower(set, 6).value;
  if (!(gamma > lower)) {
    res.failure = "gamma must exceed the lower bound " + std::to_string(lower);
    return res;
  }
  std::vector<Point> pts = initial_points(set, init);
  std::vector<Point> hull = symmetric_hull(pts, 0.0);
  res.vertex_trajectory.push_back(static_cast<int>(hull.size()));

  for (;;) {
    const double tol = 1e-9 * hull_scale(hull);
    hull = symmetric_hull(hull, tol);
    std::vector<Point> added;
    for (const Point& p : hull) {
      for (int i = 1; i <= set.size(); ++i) {
        const Point w = set[i] * p / gamma;
        if (!inside(hull, w, tol)) added.push_back(w);
      }
    }
    if (added.empty()) {
      if (hull.size() >= 3) break;
      // Invariant segment: widen by the orthogonal direction.
      res.degenerate_fixpoint = true;
      const Point v = hull.empty() ? Point(1.0, 0.0) : hull[0];
      added.push_back(Point(-v.y(), v.x()));
    }
    std::vector<Point> next = hull;
    next.insert(next.end(), added.begin(), added.end());
    hull = symmetric_hull(next, 1e-9 * hull_scale(next));
    res.vertex_trajectory.push_back(static_cast<int>(hull.size()));
    if (static_cast<int>(hull.size()) > max_vertices) {
      res.vertex_count = static_cast<int>(hull.size());
      res.failure = "vertex count " + std::to_string(hull.size()) + " exceeds max_vertices " +
                    std::to_string(max_vertices);
      return res;
    }
  }
  res.vertex_count = static_cast<int>(hull.size());

  // Facets from the hull edges, one per +-pair.
  std::vector<Point> normals;
  for (std::size_t j = 0; j < hull.size(); ++j) {
    const Point& a = hull[j];
    const Point& b = hull[(j + 1) % hull.size()];
    Eigen::Matrix2d m;
    m << a.x(), a.y(), b.x(), b.y();
    const Point c = m.partialPivLu().solve(Point(1.0, 1.0));
    const bool dup = std::any_of(normals.begin(), normals.end(), [&](const Point& q) {
      return (q + c).norm() <= 1e-9 * c.norm();
    });
    if (!dup) normals.push_back(c);
  }
  PolytopeCertificate cert;
  cert.gamma = gamma;
  cert.facets = Matrix(static_cast<Eigen::Index>(normals.size()), 2);
  for (std::size_t j = 0; j < normals.size(); ++j) {
    cert.facets.row(static_cast<Eigen::Index>(j)) = normals[j].transpose();
  }
  res.facet_count = static_cast<int>(normals.size());
  for (int i = 1; i <= set.size(); ++i) {
    const auto lp = facet_decrease_lp(cert.facets, set[i], gamma);
    if (!lp) {
      res.failure = "hull is invariant but the facet LP failed for matrix " + std::to_string(i);
      return res;
    }
    cert.multipliers.push_back(lp->lambda);
  }
  const PolytopeCheck check = validate_polytope_certificate(cert, set);
  if (!check.valid) {
    res.failure = "certificate failed validation: " + check.reason;
    return res;
  }
  res.certificate = std::move(cert);
  return res;
}

PolytopeCheck validate_polytope_certificate(const PolytopeCertificate& cert, const MatrixSet& set,
                                            std::uint64_t seed, int samples) {
  PolytopeCheck c;
  auto fail = [&](std::string why) {
    c.valid = false;
    c.reason = std::move(why);
    return c;
  };
  if (set.dim() != 2) return fail("polytope certificates are planar");
  try {
    require_planar_facets(cert.facets);
  } catch (const std::invalid_argument& e) {
    return fail(e.what());
  }
  if (!(cert.gamma > 0.0)) return fail("gamma must be > 0");
  if (static_cast<int>(cert.multipliers.size()) != set.size()) {
    return fail("expected one multiplier matrix per matrix");
  }
  const auto d = cert.facets.rows();
  for (int i = 1; i <= set.size(); ++i) {
    const Matrix& lam = cert.multipliers[static_cast<std::size_t>(i - 1)];
    if (lam.rows() != d || lam.cols() != d) return fail("multiplier matrix has the wrong shape");
    const Matrix target = cert.facets * set[i];  // rows: (A^T c_j)^T
    const Matrix recon = lam * cert.facets;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double err = (target.row(j) - recon.row(j)).norm();
      if (err > 1e-9 * (1.0 + target.row(j).norm())) return fail("multipliers do not reproduce A^T c");
      const double ratio = lam.row(j).cwiseAbs().sum();
      c.worst_ratio = std::max(c.worst_ratio, ratio);
    }
  }
  if (c.worst_ratio > cert.gamma + facet_tolerance(cert.gamma)) return fail("multiplier sum exceeds gamma");
  c.worst_sample = std::numeric_limits<double>::infinity();
  for (const Vector& x : sample_unit_vectors(2, samples, seed)) {
    const double vx = polytope_norm(cert.facets, x);
    for (int i = 1; i <= set.size(); ++i) {
      const double va = polytope_norm(cert.facets, set[i] * x);
      const double rel = (cert.gamma * vx - va) / (cert.gamma * vx + va);
      c.worst_sample = std::min(c.worst_sample, rel);
      if (rel < -1e-9) return fail("V(A x) <= gamma V(x) violated at a sample point");
    }
  }
  c.valid = true;
  return c;
}

}  // namespace jsrcert
