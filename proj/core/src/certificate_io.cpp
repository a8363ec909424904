#include "jsrcert/certificate_io.hpp"

#include <fstream>
#include <sstream>

#include "jsrcert/matrix_set_io.hpp"

namespace jsrcert {

using nlohmann::json;

namespace {

json rect_to_json(const Matrix& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + "/" + key, "missing field");
  return j.at(key);
}

double number(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) throw InputError(where + "/" + key, "expected a number");
  return v.get<double>();
}

int integer(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) throw InputError(where + "/" + key, "expected an integer");
  return v.get<int>();
}

const json& array(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_array()) throw InputError(where + "/" + key, "expected an array");
  return v;
}

Matrix rect_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw InputError(where + "/0", "expected a nonempty row");
  const std::size_t cols = j[0].size();
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rw = where + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) {
      throw InputError(rw, "expected a row of " + std::to_string(cols) + " numbers");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw InputError(rw + "/" + std::to_string(c), "expected a number");
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return a;
}

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(where + "/" + std::to_string(i), "expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json gram_to_json(const GramCertificate& g) {
  return json{{"matrix", rect_to_json(g.gram)}, {"margin", g.margin}};
}

GramCertificate gram_from_json(const json& j, const std::vector<Exponent>& basis,
                               const std::string& where) {
  GramCertificate g;
  g.basis = basis;
  g.gram = rect_from_json(field(j, "matrix", where), where + "/matrix");
  g.margin = number(j, "margin", where);
  return g;
}

json sos_to_json(const SosLyapunovCertificate& c) {
  json basis = json::array();
  for (const Exponent& e : c.gram_p.basis) basis.push_back(e);
  json dec = json::array();
  for (const GramCertificate& g : c.gram_decrease) dec.push_back(gram_to_json(g));
  return json{{"kind", "sos"},
              {"gamma", c.gamma},
              {"degree", c.degree()},
              {"n", c.p.vars()},
              {"basis", basis},
              {"coefficients", vector_to_json(c.p.coeffs())},
              {"gram_p", gram_to_json(c.gram_p)},
              {"gram_decrease", dec}};
}

SosLyapunovCertificate sos_from_json(const json& j, int n) {
  SosLyapunovCertificate c;
  c.gamma = number(j, "gamma", "");
  const int d = integer(j, "degree", "");
  if (d < 2 || d % 2 != 0) throw InputError("/degree", "degree must be even and >= 2");
  if (integer(j, "n", "") != n) throw InputError("/n", "does not match the system dimension");
  const Vector coeffs = vector_from_json(array(j, "coefficients", ""), "/coefficients");
  if (coeffs.size() != monomial_count(n, d)) {
    throw InputError("/coefficients", "expected " + std::to_string(monomial_count(n, d)) + " coefficients");
  }
  c.p = HomogeneousPolynomial(n, d, coeffs);
  const std::vector<Exponent> basis = monomial_basis(n, d / 2);
  const json& jb = array(j, "basis", "");
  if (jb.size() != basis.size()) throw InputError("/basis", "basis size does not match the degree");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (!jb[i].is_array()) throw InputError("/basis/" + std::to_string(i), "expected an exponent");
    Exponent e;
    for (const json& v : jb[i]) {
      if (!v.is_number_integer()) throw InputError("/basis/" + std::to_string(i), "expected integers");
      e.push_back(v.get<int>());
    }
    if (e != basis[i]) throw InputError("/basis/" + std::to_string(i), "basis is not in graded-lex order");
  }
  c.gram_p = gram_from_json(field(j, "gram_p", ""), basis, "/gram_p");
  const json& dec = array(j, "gram_decrease", "");
  for (std::size_t i = 0; i < dec.size(); ++i) {
    c.gram_decrease.push_back(gram_from_json(dec[i], basis, "/gram_decrease/" + std::to_string(i)));
  }
  return c;
}

json quad_to_json(const PiecewiseQuadraticCertificate& c) {
  json pieces = json::array();
  for (const Matrix& q : c.pieces) pieces.push_back(rect_to_json(q));
  return json{{"kind", to_string(c.kind)}, {"order", c.order},   {"gamma", c.gamma},
              {"symbols", c.symbols},      {"margin", c.margin}, {"pieces", pieces},
              {"lmi_margins", c.lmi_margins}};
}

PiecewiseQuadraticCertificate quad_from_json(const json& j, QuadKind kind) {
  PiecewiseQuadraticCertificate c;
  c.kind = kind;
  c.order = integer(j, "order", "");
  c.gamma = number(j, "gamma", "");
  c.symbols = integer(j, "symbols", "");
  c.margin = number(j, "margin", "");
  const json& pieces = array(j, "pieces", "");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    c.pieces.push_back(rect_from_json(pieces[i], "/pieces/" + std::to_string(i)));
  }
  if (j.contains("lmi_margins")) {
    const Vector v = vector_from_json(j["lmi_margins"], "/lmi_margins");
    c.lmi_margins.assign(v.data(), v.data() + v.size());
  }
  return c;
}

json polytope_to_json(const PolytopeCertificate& c) {
  json mult = json::array();
  for (const Matrix& m : c.multipliers) mult.push_back(rect_to_json(m));
  return json{{"kind", "polytope"},
              {"gamma", c.gamma},
              {"facets", rect_to_json(c.facets)},
              {"multipliers", mult}};
}

PolytopeCertificate polytope_from_json(const json& j) {
  PolytopeCertificate c;
  c.gamma = number(j, "gamma", "");
  c.facets = rect_from_json(field(j, "facets", ""), "/facets");
  const json& mult = array(j, "multipliers", "");
  for (std::size_t i = 0; i < mult.size(); ++i) {
    c.multipliers.push_back(rect_from_json(mult[i], "/multipliers/" + std::to_string(i)));
  }
  return c;
}

}  // namespace

std::string certificate_kind(const Certificate& cert) {
  return std::visit(
      [](const auto& b) -> std::string {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, SosLyapunovCertificate>) {
          return "sos";
        } else if constexpr (std::is_same_v<T, PiecewiseQuadraticCertificate>) {
          return to_string(b.kind);
        } else {
          return "polytope";
        }
      },
      cert.body);
}

json certificate_to_json(const Certificate& cert) {
  json j = std::visit(
      [](const auto& b) -> json {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, SosLyapunovCertificate>) {
          return sos_to_json(b);
        } else if constexpr (std::is_same_v<T, PiecewiseQuadraticCertificate>) {
          return quad_to_json(b);
        } else {
          return polytope_to_json(b);
        }
      },
      cert.body);
  j["system"] = to_json(cert.system);
  return j;
}

Certificate certificate_from_json(const json& j) {
  if (!j.is_object()) throw InputError("", "expected a JSON object");
  const json& kind = field(j, "kind", "");
  if (!kind.is_string()) throw InputError("/kind", "expected a string");
  const std::string k = kind.get<std::string>();
  MatrixSet system = [&] {
    try {
      return matrix_set_from_json(field(j, "system", ""));
    } catch (const InputError& e) {
      throw InputError("/system" + e.where(), e.what());
    }
  }();
  if (k == "sos") return Certificate{sos_from_json(j, system.dim()), std::move(system)};
  if (k == "polytope") return Certificate{polytope_from_json(j), std::move(system)};
  if (const auto qk = parse_quad_kind(k)) return Certificate{quad_from_json(j, *qk), std::move(system)};
  throw InputError("/kind", "unknown certificate kind '" + k + "'");
}

std::string dump_certificate(const Certificate& cert) {
  return certificate_to_json(cert).dump(2) + "\n";
}

Certificate parse_certificate(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("", std::string("invalid JSON: ") + e.what());
  }
  return certificate_from_json(j);
}

Certificate load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_certificate(ss.str());
}

Revalidation revalidate(const Certificate& cert, std::uint64_t seed, int samples) {
  Revalidation r;
  r.kind = certificate_kind(cert);
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, SosLyapunovCertificate>) {
          const SosCheck c = validate_sos_certificate(b, cert.system, seed, samples);
          r.valid = c.valid;
          r.reason = c.reason;
        } else if constexpr (std::is_same_v<T, PiecewiseQuadraticCertificate>) {
          const QuadCheck c = validate_quadratic_certificate(b, cert.system, seed, samples);
          r.valid = c.valid;
          r.reason = c.reason;
        } else {
          const PolytopeCheck c = validate_polytope_certificate(b, cert.system, seed, samples);
          r.valid = c.valid;
          r.reason = c.reason;
        }
      },
      cert.body);
  return r;
}

}  // namespace jsrcert
