#include "jsrcert/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jsrcert {

std::string to_string(QuadKind k) {
  switch (k) {
    case QuadKind::kCqlf: return "cqlf";
    case QuadKind::kMaxOfQuadratics: return "maxq";
    case QuadKind::kMinOfQuadratics: return "minq";
  }
  return "unknown";
}

std::optional<QuadKind> parse_quad_kind(const std::string& s) {
  if (s == "cqlf") return QuadKind::kCqlf;
  if (s == "maxq") return QuadKind::kMaxOfQuadratics;
  if (s == "minq") return QuadKind::kMinOfQuadratics;
  return std::nullopt;
}

namespace {

int ipow(int base, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<int>::max() / base) throw std::invalid_argument("piece count overflows");
    r *= base;
  }
  return r;
}

// gamma^2 Q_rhs - A_i^T Q_lhs A_i >= 0
struct Edge {
  int symbol;  // 0-based
  int lhs;
  int rhs;
};

std::vector<Edge> edges_for(QuadKind kind, int m, int order) {
  std::vector<Edge> out;
  if (kind == QuadKind::kCqlf) {
    for (int i = 0; i < m; ++i) out.push_back({i, 0, 0});
    return out;
  }
  const int nodes = ipow(m, order);
  for (int i = 0; i < m; ++i) {
    for (int w = 0; w < nodes; ++w) {
      const int s = debruijn_shift(i, w, m, order);
      if (kind == QuadKind::kMaxOfQuadratics) {
        out.push_back({i, w, s});
      } else {
        out.push_back({i, s, w});
      }
    }
  }
  return out;
}

int piece_count(QuadKind kind, int m, int order) {
  return kind == QuadKind::kCqlf ? 1 : ipow(m, order);
}

double evaluate_v(QuadKind kind, const std::vector<Matrix>& pieces, const Vector& x) {
  double best = kind == QuadKind::kMinOfQuadratics ? std::numeric_limits<double>::infinity()
                                                   : -std::numeric_limits<double>::infinity();
  for (const Matrix& q : pieces) {
    const double v = x.dot(q * x);
    best = kind == QuadKind::kMinOfQuadratics ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

}  // namespace

int debruijn_shift(int i, int w, int m, int order) {
  if (order <= 0) return 0;
  return i * ipow(m, order - 1) + w / m;
}

QuadResult quadratic_certificate(const MatrixSet& set, QuadKind kind, int order, double gamma,
                                 const QuadOptions& options) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (kind != QuadKind::kCqlf && order < 1) throw std::invalid_argument("order must be >= 1");
  const int n = set.dim();
  const int m = set.size();
  const int pieces = piece_count(kind, m, order);
  const std::vector<Edge> edges = edges_for(kind, m, order);

  // Reject before assembling anything large.
  const long long eqs = static_cast<long long>(edges.size()) * n * (n + 1) / 2 + 1 +
                        (options.tie_pieces ? static_cast<long long>(pieces - 1) * n * (n + 1) / 2 : 0);
  if (eqs > conic::kMaxEqualities) {
    throw std::invalid_argument(std::to_string(pieces) + " pieces need " + std::to_string(eqs) +
                                " equalities, beyond the solver envelope of " +
                                std::to_string(conic::kMaxEqualities));
  }

  conic::ConicProblem prob;
  std::vector<int> q;
  for (int p = 0; p < pieces; ++p) q.push_back(prob.add_psd_block(n));
  const double g2 = gamma * gamma;
  std::vector<int> margin_blocks = q;
  for (const Edge& e : edges) {
    const int d = prob.add_psd_block(n);
    margin_blocks.push_back(d);
    const Matrix& a = set[e.symbol + 1];
    for (int r = 0; r < n; ++r) {
      for (int c = r; c < n; ++c) {
        conic::LinearFunctional f;
        f.add(d, r, c, 1.0);
        f.add(q[static_cast<std::size_t>(e.rhs)], r, c, -g2);
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) {
            const double coef = a(k, r) * a(l, c);
            if (coef != 0.0) f.add(q[static_cast<std::size_t>(e.lhs)], k, l, coef);
          }
        }
        prob.add_equality(std::move(f), 0.0);
      }
    }
  }
  if (options.tie_pieces) {
    for (int p = 1; p < pieces; ++p) {
      for (int r = 0; r < n; ++r) {
        for (int c = r; c < n; ++c) {
          conic::LinearFunctional f;
          f.add(q[static_cast<std::size_t>(p)], r, c, 1.0);
          f.add(q[0], r, c, -1.0);
          prob.add_equality(std::move(f), 0.0);
        }
      }
    }
  }
  conic::LinearFunctional trace;
  for (const int b : q) {
    for (int r = 0; r < n; ++r) trace.add(b, r, r, 1.0);
  }
  prob.add_equality(std::move(trace), static_cast<double>(n) * pieces);

  conic::MarginOptions mo;
  mo.solver = options.solver;
  const conic::ConicSolution sol = conic::feasibility_with_margin(prob, margin_blocks, mo);
  QuadResult res;
  res.margin = sol.margin;
  res.status = classify_margin(sol);
  if (res.status != Feasibility::kFeasible) return res;

  PiecewiseQuadraticCertificate cert;
  cert.kind = kind;
  cert.order = kind == QuadKind::kCqlf ? 0 : order;
  cert.gamma = gamma;
  cert.symbols = m;
  cert.margin = *sol.margin;
  for (const int b : q) cert.pieces.push_back(sol.block_values[static_cast<std::size_t>(b)]);
  const QuadCheck check = validate_quadratic_certificate(cert, set, options.seed, options.samples);
  if (!check.valid) {
    res.status = Feasibility::kUndetermined;
    res.note = "certificate failed validation: " + check.reason;
    return res;
  }
  // Recompute the per-LMI margins for the record.
  for (const Matrix& p : cert.pieces) cert.lmi_margins.push_back(min_eigenvalue(p));
  for (const Edge& e : edges) {
    const Matrix& a = set[e.symbol + 1];
    cert.lmi_margins.push_back(min_eigenvalue(g2 * cert.pieces[static_cast<std::size_t>(e.rhs)] -
                                              a.transpose() * cert.pieces[static_cast<std::size_t>(e.lhs)] * a));
  }
  res.certificate = std::move(cert);
  return res;
}

QuadResult cqlf(const MatrixSet& set, double gamma, const QuadOptions& options) {
  return quadratic_certificate(set, QuadKind::kCqlf, 0, gamma, options);
}

QuadResult max_of_quadratics(const MatrixSet& set, int order, double gamma, const QuadOptions& options) {
  return quadratic_certificate(set, QuadKind::kMaxOfQuadratics, order, gamma, options);
}

QuadResult min_of_quadratics(const MatrixSet& set, int order, double gamma, const QuadOptions& options) {
  return quadratic_certificate(set, QuadKind::kMinOfQuadratics, order, gamma, options);
}

QuadCheck validate_quadratic_certificate(const PiecewiseQuadraticCertificate& cert,
                                         const MatrixSet& set, std::uint64_t seed, int samples) {
  QuadCheck c;
  auto fail = [&](std::string why) {
    c.valid = false;
    c.reason = std::move(why);
    return c;
  };
  const int n = set.dim();
  const int m = set.size();
  if (cert.symbols != m) return fail("certificate was built for a different number of matrices");
  if (!(cert.gamma > 0.0)) return fail("gamma must be > 0");
  if (cert.kind != QuadKind::kCqlf && cert.order < 1) return fail("order must be >= 1");
  int expected = 0;
  try {
    expected = piece_count(cert.kind, m, cert.order);
  } catch (const std::invalid_argument&) {
    return fail("piece count overflows");
  }
  if (static_cast<int>(cert.pieces.size()) != expected) {
    return fail("expected " + std::to_string(expected) + " pieces, found " +
                std::to_string(cert.pieces.size()));
  }
  c.min_piece_eigenvalue = std::numeric_limits<double>::infinity();
  for (const Matrix& p : cert.pieces) {
    if (p.rows() != n || p.cols() != n) return fail("piece has the wrong dimension");
    if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + p.cwiseAbs().maxCoeff())) {
      return fail("piece is not symmetric");
    }
    c.min_piece_eigenvalue = std::min(c.min_piece_eigenvalue, min_eigenvalue(p));
  }
  if (!(c.min_piece_eigenvalue > kMarginThreshold)) return fail("a piece is not positive definite");

  const double g2 = cert.gamma * cert.gamma;
  c.min_lmi_eigenvalue = std::numeric_limits<double>::infinity();
  for (const Edge& e : edges_for(cert.kind, m, cert.order)) {
    const Matrix& a = set[e.symbol + 1];
    const Matrix lmi = g2 * cert.pieces[static_cast<std::size_t>(e.rhs)] -
                       a.transpose() * cert.pieces[static_cast<std::size_t>(e.lhs)] * a;
    c.min_lmi_eigenvalue = std::min(c.min_lmi_eigenvalue, min_eigenvalue(lmi));
  }
  if (c.min_lmi_eigenvalue < -1e-8) return fail("an LMI is violated by more than 1e-8");

  c.worst_sample = std::numeric_limits<double>::infinity();
  for (const Vector& x : sample_unit_vectors(n, samples, seed)) {
    const double vx = evaluate_v(cert.kind, cert.pieces, x);
    for (int i = 1; i <= m; ++i) {
      const double va = evaluate_v(cert.kind, cert.pieces, set[i] * x);
      const double rel = (g2 * vx - va) / (std::abs(g2 * vx) + std::abs(va));
      c.worst_sample = std::min(c.worst_sample, rel);
      if (rel < -1e-9) return fail("V(A x) <= gamma^2 V(x) violated at a sample point");
    }
  }
  c.valid = true;
  return c;
}

PiecesReport sweep_pieces(const MatrixSet& set, QuadKind kind, int l_max, double gamma,
                          bool stop_at_first, const QuadOptions& options) {
  if (l_max < 1) throw std::invalid_argument("sweep_pieces: l_max must be >= 1");
  PiecesReport rep;
  rep.kind = kind;
  const int last = kind == QuadKind::kCqlf ? 1 : l_max;
  for (int l = 1; l <= last; ++l) {
    OrderStatus s;
    s.order = l;
    try {
      s.pieces = piece_count(kind, set.size(), l);
      const QuadResult r = quadratic_certificate(set, kind, l, gamma, options);
      s.status = r.status;
      s.margin = r.margin;
      s.note = r.note;
    } catch (const std::invalid_argument& e) {
      s.status = Feasibility::kUndetermined;
      s.note = e.what();
    }
    rep.per_order.push_back(s);
    if (s.status == Feasibility::kFeasible) {
      if (!rep.min_order) {
        rep.min_order = l;
        rep.min_pieces = s.pieces;
      }
      if (stop_at_first) break;
    }
  }
  return rep;
}

}  // namespace jsrcert
