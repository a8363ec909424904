#include "jsrcert/families.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace jsrcert {

namespace {

std::string fmt_label(const std::string& name, int k, std::optional<double> alpha,
                      const std::string& extra = {}) {
  std::ostringstream os;
  os.precision(17);
  os << name;
  if (k > 0) os << " k=" << k;
  if (alpha) os << " alpha=" << *alpha;
  if (!extra.empty()) os << " " << extra;
  return os.str();
}

void require_k(int k, int min_k, const char* who) {
  if (k < min_k) {
    throw std::invalid_argument(std::string(who) + ": k must be >= " +
                                std::to_string(min_k));
  }
}

}  // namespace

MatrixSet kozyakin(int k, Branch branch) {
  require_k(k, 1, "kozyakin");
  const bool stable = branch == Branch::kStable;
  if (stable && k == 1) {
    throw std::invalid_argument("kozyakin: k=1 on the stable branch has scale 1-1/k = 0");
  }
  const double pi = std::numbers::pi;
  const double t = stable ? std::sin(2.0 * pi / (2 * k + 1)) : std::sin(2.0 * pi / (2 * k));
  const double c = std::sqrt(std::max(0.0, 1.0 - t * t));
  const double t4 = 1.0 - std::pow(t, 4);
  const double denom = 1.0 - 3.0 * pi * std::pow(t, 3) / 2.0;
  if (std::abs(denom) < 1e-12) {
    throw std::invalid_argument("kozyakin: 1 - 3 pi t^3 / 2 vanishes");
  }
  Matrix a1(2, 2), a2(2, 2);
  a1 << c, -t, 0.0, 0.0;
  a1 *= t4 / denom;
  a2 << c, -t, t, c;
  a2 *= t4;
  if (stable) {
    const double s = 1.0 - 1.0 / k;
    a1 *= s;
    a2 *= s;
  }
  return MatrixSet({a1, a2}, fmt_label("kozyakin", k, std::nullopt,
                                       stable ? "stable" : "unstable"));
}

MatrixSet blondel_et_al(double alpha) {
  if (!(alpha > 0.0 && alpha < kAlphaStar)) {
    throw std::invalid_argument("blondel_et_al: alpha must lie in (0, alpha*)");
  }
  Matrix a1(2, 2), a2(2, 2);
  a1 << 1.0, 1.0, 0.0, 1.0;
  a2 << alpha, 0.0, alpha, alpha;
  return MatrixSet({a1, a2}, fmt_label("blondel", 0, alpha));
}

MatrixSet lagarias_wang(int k, double alpha, bool scaled) {
  require_k(k, 1, "lagarias_wang");
  const double theta = std::numbers::pi / (2.0 * k);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  if (!(alpha > 1.0 && alpha * c < 1.0)) {
    throw std::invalid_argument("lagarias_wang: alpha must lie in (1, 1/cos(pi/2k))");
  }
  if (scaled && k == 1) {
    throw std::invalid_argument("lagarias_wang: k=1 with scaling has factor 1-1/k = 0");
  }
  Matrix a1(2, 2), a2(2, 2);
  a1 << 0.0, 0.0, std::pow(alpha, k), 0.0;
  a2 << c, s, -s, c;
  a2 /= alpha;
  if (scaled) {
    const double f = 1.0 - 1.0 / k;
    a1 *= f;
    a2 *= f;
  }
  return MatrixSet({a1, a2}, fmt_label("lw", k, alpha, scaled ? "scaled" : ""));
}

double lagarias_wang_midpoint(int k) {
  require_k(k, 2, "lagarias_wang_midpoint");
  return 0.5 * (1.0 + 1.0 / std::cos(std::numbers::pi / (2.0 * k)));
}

double lagarias_wang_experiment_scale(int k) {
  require_k(k, 2, "lagarias_wang_experiment");
  return 1.0 - 1.0 / (1000.0 * k);
}

MatrixSet lagarias_wang_experiment(int k) {
  require_k(k, 2, "lagarias_wang_experiment");
  const MatrixSet base = lagarias_wang(k, lagarias_wang_midpoint(k), false);
  const MatrixSet out = base.scaled(lagarias_wang_experiment_scale(k));
  return MatrixSet(out.members(), "lw-exp k=" + std::to_string(k));
}

MatrixSet make_family(const FamilySpec& spec) {
  switch (spec.family) {
    case Family::kKozyakin:
      return kozyakin(spec.k, spec.branch);
    case Family::kBlondelEtAl:
      if (!spec.alpha) throw std::invalid_argument("blondel: --alpha is required");
      return blondel_et_al(*spec.alpha);
    case Family::kLagariasWang:
      return lagarias_wang(spec.k, spec.alpha ? *spec.alpha : lagarias_wang_midpoint(spec.k),
                           spec.scaled);
    case Family::kLagariasWangExperiment:
      return lagarias_wang_experiment(spec.k);
  }
  throw std::invalid_argument("unknown family");
}

std::optional<Family> parse_family(const std::string& name) {
  if (name == "kozyakin") return Family::kKozyakin;
  if (name == "blondel") return Family::kBlondelEtAl;
  if (name == "lw") return Family::kLagariasWang;
  if (name == "lw-exp") return Family::kLagariasWangExperiment;
  return std::nullopt;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::kKozyakin: return "kozyakin";
    case Family::kBlondelEtAl: return "blondel";
    case Family::kLagariasWang: return "lw";
    case Family::kLagariasWangExperiment: return "lw-exp";
  }
  return "?";
}

}  // namespace jsrcert
