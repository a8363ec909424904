#include "jsrcert/conic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <tuple>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace jsrcert::conic {

LinearFunctional& LinearFunctional::add(int block, int row, int col, double coef) {
  terms_.push_back(Term{block, row, col, coef});
  return *this;
}

int ConicProblem::add_psd_block(int size) {
  if (size < 1) throw std::invalid_argument("PSD block size must be >= 1");
  blocks_.push_back(Block{BlockKind::kPsd, size});
  return static_cast<int>(blocks_.size()) - 1;
}

int ConicProblem::add_nonneg_block(int size) {
  if (size < 1) throw std::invalid_argument("nonnegative block size must be >= 1");
  blocks_.push_back(Block{BlockKind::kNonneg, size});
  return static_cast<int>(blocks_.size()) - 1;
}

int ConicProblem::add_free_block(int size) {
  if (size < 1) throw std::invalid_argument("free block size must be >= 1");
  blocks_.push_back(Block{BlockKind::kFree, size});
  return static_cast<int>(blocks_.size()) - 1;
}

void ConicProblem::check_term(const Term& t) const {
  if (t.block < 0 || t.block >= static_cast<int>(blocks_.size())) {
    throw std::invalid_argument("functional references undeclared block " +
                                std::to_string(t.block));
  }
  const Block& b = blocks_[static_cast<std::size_t>(t.block)];
  const bool in_range = t.row >= 0 && t.row < b.size &&
                        (b.kind == BlockKind::kPsd ? (t.col >= 0 && t.col < b.size) : t.col == 0);
  if (!in_range) {
    throw std::invalid_argument("functional references entry (" + std::to_string(t.row) + "," +
                                std::to_string(t.col) + ") outside block " +
                                std::to_string(t.block));
  }
  if (!std::isfinite(t.coef)) throw std::invalid_argument("non-finite coefficient");
}

void ConicProblem::add_equality(LinearFunctional lhs, double rhs) {
  for (const Term& t : lhs.terms()) check_term(t);
  if (!std::isfinite(rhs)) throw std::invalid_argument("non-finite right-hand side");
  equalities_.push_back(Equality{std::move(lhs), rhs});
}

void ConicProblem::set_objective(LinearFunctional objective) {
  for (const Term& t : objective.terms()) check_term(t);
  objective_ = std::move(objective);
}

void ConicProblem::check_envelope() const {
  for (const Block& b : blocks_) {
    if (b.kind == BlockKind::kPsd && b.size > kMaxPsdBlockSize) {
      throw std::invalid_argument("PSD block of size " + std::to_string(b.size) +
                                  " exceeds the " + std::to_string(kMaxPsdBlockSize) +
                                  "x" + std::to_string(kMaxPsdBlockSize) + " envelope");
    }
  }
  if (equalities_.size() > static_cast<std::size_t>(kMaxEqualities)) {
    throw std::invalid_argument(std::to_string(equalities_.size()) +
                                " equalities exceed the envelope of " +
                                std::to_string(kMaxEqualities));
  }
}

std::string ConicProblem::dump() const {
  std::ostringstream os;
  os.precision(17);
  os << "blocks " << blocks_.size() << "\n";
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const char* kind = blocks_[b].kind == BlockKind::kPsd      ? "psd"
                       : blocks_[b].kind == BlockKind::kNonneg ? "nonneg"
                                                               : "free";
    os << "  " << b << " " << kind << " " << blocks_[b].size << "\n";
  }
  os << "equalities " << equalities_.size() << "\n";
  for (std::size_t i = 0; i < equalities_.size(); ++i) {
    os << "  " << i << " rhs " << equalities_[i].rhs << "\n";
    for (const Term& t : equalities_[i].lhs.terms()) {
      os << "    " << t.block << " " << t.row << " " << t.col << " " << t.coef << "\n";
    }
  }
  os << "objective\n";
  for (const Term& t : objective_.terms()) {
    os << "    " << t.block << " " << t.row << " " << t.col << " " << t.coef << "\n";
  }
  return os.str();
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kMarginBelowTolerance: return "margin_below_tolerance";
    case SolveStatus::kIterationLimit: return "iteration_limit";
    case SolveStatus::kNumericalBreakdown: return "numerical_breakdown";
  }
  return "unknown";
}

double evaluate(const LinearFunctional& f, std::span<const Matrix> values) {
  double acc = 0.0;
  for (const Term& t : f.terms()) {
    acc += t.coef * values[static_cast<std::size_t>(t.block)](t.row, t.col);
  }
  return acc;
}

Validation validate_solution(const ConicProblem& problem, std::span<const Matrix> values) {
  Validation v;
  const auto& blocks = problem.blocks();
  v.shapes_ok = values.size() == blocks.size();
  if (!v.shapes_ok) return v;
  v.min_block_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Matrix& x = values[b];
    const int s = blocks[b].size;
    if (blocks[b].kind == BlockKind::kPsd) {
      if (x.rows() != s || x.cols() != s) {
        v.shapes_ok = false;
        return v;
      }
      const Matrix sym = 0.5 * (x + x.transpose());
      const Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
      v.min_block_eigenvalue = std::min(v.min_block_eigenvalue, es.eigenvalues()(0));
    } else {
      if (x.rows() != s || x.cols() != 1) {
        v.shapes_ok = false;
        return v;
      }
      if (blocks[b].kind == BlockKind::kNonneg) {
        v.min_block_eigenvalue = std::min(v.min_block_eigenvalue, x.minCoeff());
      }
    }
  }
  if (!std::isfinite(v.min_block_eigenvalue)) v.min_block_eigenvalue = 0.0;
  double rhs2 = 0.0;
  for (const Equality& e : problem.equalities()) {
    // Symmetric entries are read from the upper triangle only. Each row is
    // measured in units of its coefficient norm (floored at 1).
    double lhs = 0.0;
    std::map<std::tuple<int, int, int>, double> merged;
    for (const Term& t : e.lhs.terms()) {
      const Matrix& x = values[static_cast<std::size_t>(t.block)];
      const int lo = x.cols() == 1 ? t.row : std::min(t.row, t.col);
      const int hi = x.cols() == 1 ? 0 : std::max(t.row, t.col);
      lhs += t.coef * x(lo, hi);
      merged[{t.block, lo, hi}] += t.coef;
    }
    double row2 = 0.0;
    for (const auto& [key, c] : merged) row2 += c * c;
    const double scale = std::max(1.0, std::sqrt(row2));
    v.max_equality_residual = std::max(v.max_equality_residual, std::abs(lhs - e.rhs) / scale);
    rhs2 += (e.rhs / scale) * (e.rhs / scale);
  }
  v.rhs_norm = std::sqrt(rhs2);
  return v;
}

namespace {

// One symmetric-matrix coefficient entry, already expanded: the functional is
// sum v * X(r, c) over the expanded list, with off-diagonal terms split in
// halves over (r, c) and (c, r).
struct SymEntry {
  int r;
  int c;
  double v;
};

struct RowBlockPart {
  int row;
  std::vector<SymEntry> entries;
};

// Internal standard form: minimize <C, X> s.t. A(X) = b.
struct StandardForm {
  std::vector<int> psd_sizes;
  std::vector<int> psd_block_index;  // original block id per PSD block
  // Vector blocks are concatenated into one nonneg vector and one free
  // vector; these map original (block, index) to positions.
  std::vector<int> lp_offset;    // per original block, -1 if not nonneg
  std::vector<int> free_offset;  // per original block, -1 if not free
  std::vector<int> psd_slot;     // per original block, -1 if not PSD
  int n_lp = 0;
  int n_free = 0;

  int m = 0;
  std::vector<std::vector<RowBlockPart>> psd_rows;  // per PSD block
  Matrix a_lp;    // m x n_lp
  Matrix a_free;  // m x n_free
  Vector b;
  std::vector<Matrix> c_psd;
  Vector c_lp;
  Vector c_free;
  Vector row_scale;  // original row i was divided by row_scale(i)
  std::vector<int> kept_rows;
};

void accumulate_sym(Matrix& m, int r, int c, double coef) {
  if (r == c) {
    m(r, r) += coef;
  } else {
    m(r, c) += 0.5 * coef;
    m(c, r) += 0.5 * coef;
  }
}

// Dense per-row representation used only during presolve.
struct DenseRows {
  Matrix rows;  // m x nvar in an orthonormal coordinate system (svec)
  Vector b;
};

int svec_size(int s) { return s * (s + 1) / 2; }

// Builds the standard form; returns false if presolve proves infeasibility.
bool build_standard_form(const ConicProblem& p, StandardForm& sf) {
  const auto& blocks = p.blocks();
  const auto nb = blocks.size();
  sf.lp_offset.assign(nb, -1);
  sf.free_offset.assign(nb, -1);
  sf.psd_slot.assign(nb, -1);
  std::vector<int> svec_offset(nb, -1);
  int nvar = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    switch (blocks[b].kind) {
      case BlockKind::kPsd:
        sf.psd_slot[b] = static_cast<int>(sf.psd_sizes.size());
        sf.psd_sizes.push_back(blocks[b].size);
        sf.psd_block_index.push_back(static_cast<int>(b));
        svec_offset[b] = nvar;
        nvar += svec_size(blocks[b].size);
        break;
      case BlockKind::kNonneg:
        sf.lp_offset[b] = sf.n_lp;
        sf.n_lp += blocks[b].size;
        svec_offset[b] = nvar;
        nvar += blocks[b].size;
        break;
      case BlockKind::kFree:
        sf.free_offset[b] = sf.n_free;
        sf.n_free += blocks[b].size;
        svec_offset[b] = nvar;
        nvar += blocks[b].size;
        break;
    }
  }

  // Row vectors in svec coordinates (off-diagonal scaled by 1/sqrt2 per the
  // coefficient on X(r,c) so the Euclidean inner product matches <A, X>).
  const auto& eqs = p.equalities();
  const int m0 = static_cast<int>(eqs.size());
  DenseRows dense{Matrix::Zero(m0, nvar), Vector::Zero(m0)};
  auto svec_index = [&](int block, int r, int c) {
    const auto b = static_cast<std::size_t>(block);
    if (blocks[b].kind != BlockKind::kPsd) return svec_offset[b] + r;
    const int s = blocks[b].size;
    const int lo = std::min(r, c);
    const int hi = std::max(r, c);
    // Column-major packed upper triangle.
    (void)s;
    return svec_offset[b] + hi * (hi + 1) / 2 + lo;
  };
  for (int i = 0; i < m0; ++i) {
    for (const Term& t : eqs[static_cast<std::size_t>(i)].lhs.terms()) {
      const auto& blk = blocks[static_cast<std::size_t>(t.block)];
      const double w = (blk.kind == BlockKind::kPsd && t.row != t.col) ? 1.0 / std::sqrt(2.0) : 1.0;
      dense.rows(i, svec_index(t.block, t.row, t.col)) += w * t.coef;
    }
    dense.b(i) = eqs[static_cast<std::size_t>(i)].rhs;
  }
  // Unit-norm rows.
  sf.row_scale = Vector::Ones(m0);
  for (int i = 0; i < m0; ++i) {
    const double nrm = dense.rows.row(i).norm();
    if (nrm > 0.0) {
      sf.row_scale(i) = nrm;
      dense.rows.row(i) /= nrm;
      dense.b(i) /= nrm;
    }
  }

  // Independent rows, preferring earlier ones.
  std::vector<int> kept;
  if (m0 > 0) {
    Matrix basis(nvar, 0);
    std::vector<Vector> q;
    for (int i = 0; i < m0; ++i) {
      Vector v = dense.rows.row(i).transpose();
      const double n0 = v.norm();
      if (n0 == 0.0) {
        if (std::abs(dense.b(i)) > 1e-12) return false;
        continue;
      }
      for (int pass = 0; pass < 2; ++pass) {
        for (const Vector& u : q) v -= u.dot(v) * u;
      }
      if (v.norm() > 1e-9 * n0) {
        q.push_back(v / v.norm());
        kept.push_back(i);
      }
    }
    // Consistency of dropped rows.
    if (static_cast<int>(kept.size()) < m0) {
      Matrix ak(static_cast<Eigen::Index>(kept.size()), nvar);
      Vector bk(static_cast<Eigen::Index>(kept.size()));
      for (std::size_t j = 0; j < kept.size(); ++j) {
        ak.row(static_cast<Eigen::Index>(j)) = dense.rows.row(kept[j]);
        bk(static_cast<Eigen::Index>(j)) = dense.b(kept[j]);
      }
      const Eigen::ColPivHouseholderQR<Matrix> qr(ak.transpose());
      std::size_t next = 0;
      for (int i = 0; i < m0; ++i) {
        if (next < kept.size() && kept[next] == i) {
          ++next;
          continue;
        }
        const Vector coef = qr.solve(Vector(dense.rows.row(i).transpose()));
        if (std::abs(coef.dot(bk) - dense.b(i)) > 1e-9 * (1.0 + std::abs(dense.b(i)))) {
          return false;
        }
      }
    }
  }
  sf.kept_rows = kept;
  sf.m = static_cast<int>(kept.size());
  sf.b.resize(sf.m);
  sf.psd_rows.assign(sf.psd_sizes.size(), {});
  sf.a_lp = Matrix::Zero(sf.m, sf.n_lp);
  sf.a_free = Matrix::Zero(sf.m, sf.n_free);
  for (int k = 0; k < sf.m; ++k) {
    const int i = kept[static_cast<std::size_t>(k)];
    const double scale = sf.row_scale(i);
    sf.b(k) = eqs[static_cast<std::size_t>(i)].rhs / scale;
    // Group PSD terms per block.
    std::vector<Matrix> acc(sf.psd_sizes.size());
    std::vector<bool> touched(sf.psd_sizes.size(), false);
    for (const Term& t : eqs[static_cast<std::size_t>(i)].lhs.terms()) {
      const auto b = static_cast<std::size_t>(t.block);
      const double v = t.coef / scale;
      switch (blocks[b].kind) {
        case BlockKind::kPsd: {
          const auto slot = static_cast<std::size_t>(sf.psd_slot[b]);
          if (!touched[slot]) {
            acc[slot] = Matrix::Zero(blocks[b].size, blocks[b].size);
            touched[slot] = true;
          }
          accumulate_sym(acc[slot], t.row, t.col, v);
          break;
        }
        case BlockKind::kNonneg:
          sf.a_lp(k, sf.lp_offset[b] + t.row) += v;
          break;
        case BlockKind::kFree:
          sf.a_free(k, sf.free_offset[b] + t.row) += v;
          break;
      }
    }
    for (std::size_t slot = 0; slot < acc.size(); ++slot) {
      if (!touched[slot]) continue;
      RowBlockPart part{k, {}};
      const Matrix& a = acc[slot];
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
          if (a(r, c) != 0.0) part.entries.push_back({static_cast<int>(r), static_cast<int>(c), a(r, c)});
        }
      }
      if (!part.entries.empty()) sf.psd_rows[slot].push_back(std::move(part));
    }
  }

  // Objective, negated for minimization.
  sf.c_psd.clear();
  for (const int s : sf.psd_sizes) sf.c_psd.push_back(Matrix::Zero(s, s));
  sf.c_lp = Vector::Zero(sf.n_lp);
  sf.c_free = Vector::Zero(sf.n_free);
  for (const Term& t : p.objective().terms()) {
    const auto b = static_cast<std::size_t>(t.block);
    switch (blocks[b].kind) {
      case BlockKind::kPsd:
        accumulate_sym(sf.c_psd[static_cast<std::size_t>(sf.psd_slot[b])], t.row, t.col, -t.coef);
        break;
      case BlockKind::kNonneg:
        sf.c_lp(sf.lp_offset[b] + t.row) -= t.coef;
        break;
      case BlockKind::kFree:
        sf.c_free(sf.free_offset[b] + t.row) -= t.coef;
        break;
    }
  }
  return true;
}

// Primal or dual iterate over the standard form.
struct Iterate {
  std::vector<Matrix> psd;
  Vector lp;
  Vector free;  // primal only
};

double inner(const Iterate& a, const Iterate& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.psd.size(); ++k) acc += a.psd[k].cwiseProduct(b.psd[k]).sum();
  acc += a.lp.dot(b.lp);
  return acc;
}

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& sf, const SolverOptions& opt) : sf_(sf), opt_(opt) {}

  struct Result {
    SolveStatus status = SolveStatus::kIterationLimit;
    Iterate x;
    Vector y;
    double pobj = 0.0;
    double dobj = 0.0;
    double relp = 0.0;
    double reld = 0.0;
    double relgap = 0.0;
    int iterations = 0;
  };

  Result run();

 private:
  Vector apply_a(const Iterate& x) const;
  Iterate apply_at(const Vector& y) const;
  Matrix schur(const Iterate& x, const std::vector<Matrix>& z_inv, const Vector& z_lp) const;
  void initial_point(Iterate& x, Vector& y, Iterate& z) const;
  static double max_step(const std::vector<Matrix>& x, const Vector& x_lp,
                         const std::vector<Matrix>& dx, const Vector& dx_lp);

  const StandardForm& sf_;
  SolverOptions opt_;
};

Vector InteriorPoint::apply_a(const Iterate& x) const {
  Vector out = Vector::Zero(sf_.m);
  for (std::size_t k = 0; k < sf_.psd_rows.size(); ++k) {
    for (const RowBlockPart& part : sf_.psd_rows[k]) {
      double acc = 0.0;
      for (const SymEntry& e : part.entries) acc += e.v * x.psd[k](e.r, e.c);
      out(part.row) += acc;
    }
  }
  if (sf_.n_lp > 0) out += sf_.a_lp * x.lp;
  if (sf_.n_free > 0) out += sf_.a_free * x.free;
  return out;
}

Iterate InteriorPoint::apply_at(const Vector& y) const {
  Iterate out;
  for (const int s : sf_.psd_sizes) out.psd.push_back(Matrix::Zero(s, s));
  for (std::size_t k = 0; k < sf_.psd_rows.size(); ++k) {
    for (const RowBlockPart& part : sf_.psd_rows[k]) {
      const double yi = y(part.row);
      for (const SymEntry& e : part.entries) out.psd[k](e.r, e.c) += yi * e.v;
    }
  }
  out.lp = sf_.n_lp > 0 ? Vector(sf_.a_lp.transpose() * y) : Vector();
  out.free = sf_.n_free > 0 ? Vector(sf_.a_free.transpose() * y) : Vector();
  return out;
}

Matrix InteriorPoint::schur(const Iterate& x, const std::vector<Matrix>& z_inv,
                            const Vector& z_lp) const {
  Matrix m = Matrix::Zero(sf_.m, sf_.m);
  for (std::size_t k = 0; k < sf_.psd_rows.size(); ++k) {
    const auto& rows = sf_.psd_rows[k];
    const Matrix& xk = x.psd[k];
    const Matrix& zi = z_inv[k];
    const Eigen::Index s = xk.rows();
    Matrix t(s, s);
    for (const RowBlockPart& pi : rows) {
      // G = X A_i Z^{-1}
      t.setZero();
      for (const SymEntry& e : pi.entries) t.row(e.r) += e.v * zi.row(e.c);
      const Matrix g = xk * t;
      for (const RowBlockPart& pj : rows) {
        if (pj.row < pi.row) continue;
        double acc = 0.0;
        for (const SymEntry& e : pj.entries) acc += e.v * g(e.r, e.c);
        m(pi.row, pj.row) += acc;
      }
    }
  }
  // Fill the lower triangle from the upper, then the LP part.
  for (int i = 0; i < sf_.m; ++i) {
    for (int j = 0; j < i; ++j) m(i, j) = m(j, i);
  }
  if (sf_.n_lp > 0) {
    const Vector d = x.lp.cwiseQuotient(z_lp);
    m.noalias() += sf_.a_lp * d.asDiagonal() * sf_.a_lp.transpose();
  }
  return m;
}

void InteriorPoint::initial_point(Iterate& x, Vector& y, Iterate& z) const {
  const double bmax = sf_.b.size() > 0 ? sf_.b.cwiseAbs().maxCoeff() : 0.0;
  x.psd.clear();
  z.psd.clear();
  for (std::size_t k = 0; k < sf_.psd_sizes.size(); ++k) {
    const int s = sf_.psd_sizes[k];
    double amax = 0.0;
    for (const RowBlockPart& part : sf_.psd_rows[k]) {
      double f = 0.0;
      for (const SymEntry& e : part.entries) f += e.v * e.v;
      amax = std::max(amax, std::sqrt(f));
    }
    const double rs = std::sqrt(static_cast<double>(s));
    const double xi = std::max({10.0, rs, s * (1.0 + bmax) / (1.0 + amax)});
    const double eta = std::max({10.0, rs, amax, sf_.c_psd[k].norm()});
    x.psd.push_back(xi * Matrix::Identity(s, s));
    z.psd.push_back(eta * Matrix::Identity(s, s));
  }
  if (sf_.n_lp > 0) {
    const double rs = std::sqrt(static_cast<double>(sf_.n_lp));
    double amax = 0.0;
    for (Eigen::Index c = 0; c < sf_.a_lp.cols(); ++c) amax = std::max(amax, sf_.a_lp.col(c).norm());
    const double xi = std::max({10.0, rs, sf_.n_lp * (1.0 + bmax) / (1.0 + amax)});
    const double eta = std::max({10.0, rs, amax, sf_.c_lp.norm()});
    x.lp = Vector::Constant(sf_.n_lp, xi);
    z.lp = Vector::Constant(sf_.n_lp, eta);
  } else {
    x.lp = Vector();
    z.lp = Vector();
  }
  x.free = Vector::Zero(sf_.n_free);
  z.free = Vector();
  y = Vector::Zero(sf_.m);
}

double InteriorPoint::max_step(const std::vector<Matrix>& x, const Vector& x_lp,
                               const std::vector<Matrix>& dx, const Vector& dx_lp) {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Eigen::LLT<Matrix> llt(x[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    const Matrix l_inv = llt.matrixL().solve(Matrix::Identity(x[k].rows(), x[k].cols()));
    Matrix w = l_inv * dx[k] * l_inv.transpose();
    w = 0.5 * (w + w.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) step = std::min(step, -1.0 / lmin);
  }
  for (Eigen::Index i = 0; i < x_lp.size(); ++i) {
    if (dx_lp(i) < 0.0) step = std::min(step, -x_lp(i) / dx_lp(i));
  }
  return step;
}

InteriorPoint::Result InteriorPoint::run() {
  Result res;
  Iterate x, z;
  Vector y;
  initial_point(x, y, z);
  const std::size_t np = sf_.psd_sizes.size();
  int cone_dim = sf_.n_lp;
  for (const int s : sf_.psd_sizes) cone_dim += s;

  const double b_norm = sf_.b.norm();
  double c_norm2 = sf_.c_lp.squaredNorm() + sf_.c_free.squaredNorm();
  for (const Matrix& c : sf_.c_psd) c_norm2 += c.squaredNorm();
  const double c_norm = std::sqrt(c_norm2);

  auto objective = [&](const Iterate& xi) {
    double acc = sf_.c_lp.size() > 0 ? sf_.c_lp.dot(xi.lp) : 0.0;
    if (sf_.n_free > 0) acc += sf_.c_free.dot(xi.free);
    for (std::size_t k = 0; k < np; ++k) acc += sf_.c_psd[k].cwiseProduct(xi.psd[k]).sum();
    return acc;
  };

  double best_score = std::numeric_limits<double>::infinity();
  Result best;
  int stall = 0;

  for (int it = 0; it <= opt_.iter_limit; ++it) {
    // Residuals.
    const Vector rp = sf_.b - apply_a(x);
    const Iterate aty = apply_at(y);
    Iterate rd;
    double rd_norm2 = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      rd.psd.push_back(sf_.c_psd[k] - aty.psd[k] - z.psd[k]);
      rd_norm2 += rd.psd.back().squaredNorm();
    }
    rd.lp = sf_.n_lp > 0 ? Vector(sf_.c_lp - aty.lp - z.lp) : Vector();
    rd.free = sf_.n_free > 0 ? Vector(sf_.c_free - aty.free) : Vector();
    rd_norm2 += rd.lp.squaredNorm() + rd.free.squaredNorm();

    const double pobj = objective(x);
    const double dobj = sf_.b.dot(y);
    const double mu = cone_dim > 0 ? inner(x, z) / cone_dim : 0.0;
    const double relp = rp.norm() / (1.0 + b_norm);
    const double reld = std::sqrt(rd_norm2) / (1.0 + c_norm);
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu)) {
      res = best;
      res.status = SolveStatus::kNumericalBreakdown;
      res.iterations = it;
      return res;
    }

    const double score = std::max({relp, reld, relgap});
    if (score < best_score) {
      best_score = score;
      best.x = x;
      best.y = y;
      best.pobj = pobj;
      best.dobj = dobj;
      best.relp = relp;
      best.reld = reld;
      best.relgap = relgap;
      best.iterations = it;
      stall = 0;
    } else if (++stall >= 8) {
      break;
    }
    if (score <= opt_.target_tolerance) break;

    // Farkas-type certificates along a diverging iterate.
    if (dobj > 0.0) {
      const double ray = (reld * (1.0 + c_norm) + c_norm) / dobj;
      if (ray < 1e-8 && dobj > 1e8) {
        res.status = SolveStatus::kInfeasible;
        res.x = x;
        res.y = y;
        res.iterations = it;
        return res;
      }
    }
    if (pobj < 0.0) {
      const double ray = (relp * (1.0 + b_norm) + b_norm) / -pobj;
      if (ray < 1e-8 && -pobj > 1e8) {
        res.status = SolveStatus::kUnbounded;
        res.x = x;
        res.y = y;
        res.iterations = it;
        return res;
      }
    }
    if (it == opt_.iter_limit) break;

    // Factor Z and form the Schur complement.
    std::vector<Matrix> z_inv(np);
    bool ok = true;
    for (std::size_t k = 0; k < np; ++k) {
      const Eigen::LLT<Matrix> llt(z.psd[k]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      z_inv[k] = llt.solve(Matrix::Identity(z.psd[k].rows(), z.psd[k].cols()));
      z_inv[k] = 0.5 * (z_inv[k] + z_inv[k].transpose());
    }
    if (!ok) break;
    const Matrix m = schur(x, z_inv, z.lp);
    const int nf = sf_.n_free;
    Matrix kkt = Matrix::Zero(sf_.m + nf, sf_.m + nf);
    kkt.topLeftCorner(sf_.m, sf_.m) = m;
    if (nf > 0) {
      kkt.topRightCorner(sf_.m, nf) = sf_.a_free;
      kkt.bottomLeftCorner(nf, sf_.m) = sf_.a_free.transpose();
    }
    const Eigen::PartialPivLU<Matrix> lu(kkt);

    // Solves for a direction given the centering target and a corrector term.
    struct Direction {
      std::vector<Matrix> dx;
      Vector dx_lp;
      Vector dx_free;
      Vector dy;
      std::vector<Matrix> dz;
      Vector dz_lp;
    };
    auto direction = [&](double sigma_mu, const Direction* corr) {
      Direction d;
      // H = X - sigma mu Z^{-1} + X Rd Z^{-1} + dXa dZa Z^{-1}
      Iterate h;
      for (std::size_t k = 0; k < np; ++k) {
        Matrix hk = x.psd[k] - sigma_mu * z_inv[k] + x.psd[k] * rd.psd[k] * z_inv[k];
        if (corr) hk += corr->dx[k] * corr->dz[k] * z_inv[k];
        h.psd.push_back(std::move(hk));
      }
      if (sf_.n_lp > 0) {
        Vector hl = x.lp - sigma_mu * z.lp.cwiseInverse() +
                    x.lp.cwiseProduct(rd.lp).cwiseQuotient(z.lp);
        if (corr) hl += corr->dx_lp.cwiseProduct(corr->dz_lp).cwiseQuotient(z.lp);
        h.lp = std::move(hl);
      }
      h.free = Vector::Zero(nf);
      Vector rhs(sf_.m + nf);
      rhs.head(sf_.m) = rp + apply_a(h);
      if (nf > 0) rhs.tail(nf) = rd.free;
      const Vector sol = lu.solve(rhs);
      d.dy = sol.head(sf_.m);
      d.dx_free = nf > 0 ? Vector(sol.tail(nf)) : Vector();
      const Iterate at_dy = apply_at(d.dy);
      for (std::size_t k = 0; k < np; ++k) {
        Matrix dz = rd.psd[k] - at_dy.psd[k];
        Matrix dx = -x.psd[k] + sigma_mu * z_inv[k] - x.psd[k] * dz * z_inv[k];
        if (corr) dx -= corr->dx[k] * corr->dz[k] * z_inv[k];
        d.dx.push_back(0.5 * (dx + dx.transpose()));
        d.dz.push_back(0.5 * (dz + dz.transpose()));
      }
      if (sf_.n_lp > 0) {
        d.dz_lp = rd.lp - at_dy.lp;
        Vector dx = -x.lp + sigma_mu * z.lp.cwiseInverse() -
                    x.lp.cwiseProduct(d.dz_lp).cwiseQuotient(z.lp);
        if (corr) dx -= corr->dx_lp.cwiseProduct(corr->dz_lp).cwiseQuotient(z.lp);
        d.dx_lp = std::move(dx);
      }
      return d;
    };

    const Direction pred = direction(0.0, nullptr);
    const double ap_a = std::min(1.0, max_step(x.psd, x.lp, pred.dx, pred.dx_lp));
    const double ad_a = std::min(1.0, max_step(z.psd, z.lp, pred.dz, pred.dz_lp));
    double mu_aff = 0.0;
    if (cone_dim > 0) {
      Iterate xa, za;
      for (std::size_t k = 0; k < np; ++k) {
        xa.psd.push_back(x.psd[k] + ap_a * pred.dx[k]);
        za.psd.push_back(z.psd[k] + ad_a * pred.dz[k]);
      }
      xa.lp = sf_.n_lp > 0 ? Vector(x.lp + ap_a * pred.dx_lp) : Vector();
      za.lp = sf_.n_lp > 0 ? Vector(z.lp + ad_a * pred.dz_lp) : Vector();
      mu_aff = inner(xa, za) / cone_dim;
    }
    const double ratio = mu > 0.0 ? std::clamp(mu_aff / mu, 0.0, 1.0) : 0.0;
    const double sigma = std::pow(ratio, 3);
    const Direction corr = direction(sigma * mu, &pred);

    const double tau = 0.98;
    const double ap = std::min(1.0, tau * max_step(x.psd, x.lp, corr.dx, corr.dx_lp));
    const double ad = std::min(1.0, tau * max_step(z.psd, z.lp, corr.dz, corr.dz_lp));
    if (!(ap > 0.0) && !(ad > 0.0)) break;

    for (std::size_t k = 0; k < np; ++k) {
      x.psd[k] += ap * corr.dx[k];
      z.psd[k] += ad * corr.dz[k];
    }
    if (sf_.n_lp > 0) {
      x.lp += ap * corr.dx_lp;
      z.lp += ad * corr.dz_lp;
    }
    if (nf > 0) x.free += ap * corr.dx_free;
    y += ad * corr.dy;
    res.iterations = it + 1;
  }

  res = best;
  res.status = best_score <= opt_.tolerance ? SolveStatus::kOptimal : SolveStatus::kIterationLimit;
  return res;
}

std::vector<Matrix> to_block_values(const ConicProblem& p, const StandardForm& sf, const Iterate& x) {
  std::vector<Matrix> out;
  const auto& blocks = p.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    switch (blocks[b].kind) {
      case BlockKind::kPsd: {
        const Matrix& v = x.psd[static_cast<std::size_t>(sf.psd_slot[b])];
        out.push_back(0.5 * (v + v.transpose()));
        break;
      }
      case BlockKind::kNonneg:
        out.push_back(x.lp.segment(sf.lp_offset[b], blocks[b].size));
        break;
      case BlockKind::kFree:
        out.push_back(x.free.segment(sf.free_offset[b], blocks[b].size));
        break;
    }
  }
  return out;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) {
  problem.check_envelope();
  ConicSolution sol;
  StandardForm sf;
  if (!build_standard_form(problem, sf)) {
    sol.status = SolveStatus::kInfeasible;
    return sol;
  }
  sol.dropped_rows = static_cast<int>(problem.equalities().size()) - sf.m;
  if (sol.dropped_rows > 0) {
    std::clog << "conic: dropped " << sol.dropped_rows << " linearly dependent equality row(s)\n";
  }
  InteriorPoint ipm(sf, options);
  const InteriorPoint::Result r = ipm.run();
  sol.status = r.status;
  sol.iterations = r.iterations;
  if (r.x.psd.size() != sf.psd_sizes.size()) return sol;  // no iterate recorded
  sol.block_values = to_block_values(problem, sf, r.x);
  sol.objective_value = evaluate(problem.objective(), sol.block_values);
  sol.duality_gap = std::abs(r.pobj - r.dobj);
  if (r.reld <= options.tolerance) sol.dual_bound = -r.dobj;
  const Validation v = validate_solution(problem, sol.block_values);
  sol.max_equality_residual = v.max_equality_residual;
  sol.min_block_eigenvalue = v.min_block_eigenvalue;
  if (sol.status == SolveStatus::kOptimal &&
      (v.max_equality_residual > 1e-8 * (1.0 + v.rhs_norm) || v.min_block_eigenvalue < -1e-9)) {
    sol.status = SolveStatus::kIterationLimit;
  }
  return sol;
}

ConicSolution feasibility_with_margin(const ConicProblem& problem,
                                      std::span<const int> margin_blocks,
                                      const MarginOptions& options) {
  const auto& blocks = problem.blocks();
  std::vector<bool> is_margin(blocks.size(), false);
  for (const int b : margin_blocks) {
    if (b < 0 || b >= static_cast<int>(blocks.size()) ||
        blocks[static_cast<std::size_t>(b)].kind != BlockKind::kPsd) {
      throw std::invalid_argument("margin blocks must be PSD blocks");
    }
    is_margin[static_cast<std::size_t>(b)] = true;
  }

  // Same blocks plus one free scalar lambda; margin block B is stored as
  // B' = B - lambda I.
  ConicProblem shifted;
  for (const Block& b : blocks) {
    switch (b.kind) {
      case BlockKind::kPsd: shifted.add_psd_block(b.size); break;
      case BlockKind::kNonneg: shifted.add_nonneg_block(b.size); break;
      case BlockKind::kFree: shifted.add_free_block(b.size); break;
    }
  }
  const int lambda = shifted.add_free_block(1);
  for (const Equality& e : problem.equalities()) {
    LinearFunctional f = e.lhs;
    double lambda_coef = 0.0;
    for (const Term& t : e.lhs.terms()) {
      if (is_margin[static_cast<std::size_t>(t.block)] && t.row == t.col) lambda_coef += t.coef;
    }
    if (lambda_coef != 0.0) f.add(lambda, 0, lambda_coef);
    shifted.add_equality(std::move(f), e.rhs);
  }
  if (options.normalize_trace) {
    LinearFunctional f;
    double total = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (!is_margin[b]) continue;
      for (int i = 0; i < blocks[b].size; ++i) f.add(static_cast<int>(b), i, i, 1.0);
      total += blocks[b].size;
    }
    f.add(lambda, 0, total);
    shifted.add_equality(std::move(f), total);
  }
  LinearFunctional obj;
  obj.add(lambda, 0, 1.0);
  shifted.set_objective(std::move(obj));

  ConicSolution sol = solve(shifted, options.solver);
  if (sol.block_values.size() != shifted.blocks().size()) {
    sol.block_values.clear();
    return sol;
  }
  const double lam = sol.block_values.back()(0, 0);
  sol.block_values.pop_back();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (is_margin[b]) {
      sol.block_values[b] += lam * Matrix::Identity(blocks[b].size, blocks[b].size);
    }
  }
  sol.margin = lam;
  sol.objective_value = lam;
  const Validation v = validate_solution(problem, sol.block_values);
  sol.max_equality_residual = v.max_equality_residual;
  // Cone check on the shifted blocks, as solved.
  double min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].kind == BlockKind::kFree) continue;
    if (blocks[b].kind == BlockKind::kNonneg) {
      min_eig = std::min(min_eig, sol.block_values[b].minCoeff());
      continue;
    }
    Matrix s = sol.block_values[b];
    if (is_margin[b]) s -= lam * Matrix::Identity(blocks[b].size, blocks[b].size);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues()(0));
  }
  sol.min_block_eigenvalue = std::isfinite(min_eig) ? min_eig : 0.0;
  if (sol.status == SolveStatus::kOptimal && !(lam > options.threshold)) {
    sol.status = SolveStatus::kMarginBelowTolerance;
  }
  return sol;
}

}  // namespace jsrcert::conic
