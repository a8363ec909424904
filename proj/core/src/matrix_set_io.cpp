#include "jsrcert/matrix_set_io.hpp"

#include <fstream>
#include <sstream>

namespace jsrcert {

using nlohmann::json;

json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw InputError(where, "expected a nonempty array of rows");
  }
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::string rw = where + "/" + std::to_string(r);
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw InputError(rw, "expected a row of " + std::to_string(n) + " numbers");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) {
        throw InputError(rw + "/" + std::to_string(c), "expected a number");
      }
      a(r, c) = v.get<double>();
    }
  }
  return a;
}

json to_json(const MatrixSet& set) {
  json mats = json::array();
  for (const Matrix& a : set.members()) mats.push_back(matrix_to_json(a));
  return json{{"n", set.dim()}, {"label", set.label()}, {"matrices", mats}};
}

MatrixSet matrix_set_from_json(const json& j) {
  if (!j.is_object()) throw InputError("", "expected a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw InputError("/n", "expected an integer dimension");
  }
  const int n = j["n"].get<int>();
  if (n < 1 || n > kMaxDimension) {
    throw InputError("/n", "dimension must be in [1, " +
                               std::to_string(kMaxDimension) + "]");
  }
  std::string label;
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw InputError("/label", "expected a string");
    label = j["label"].get<std::string>();
  }
  if (!j.contains("matrices") || !j["matrices"].is_array() ||
      j["matrices"].empty()) {
    throw InputError("/matrices", "expected a nonempty array of matrices");
  }
  std::vector<Matrix> members;
  for (std::size_t i = 0; i < j["matrices"].size(); ++i) {
    const std::string where = "/matrices/" + std::to_string(i);
    Matrix a = matrix_from_json(j["matrices"][i], where);
    if (a.rows() != n) {
      throw InputError(where, "matrix is " + std::to_string(a.rows()) + "x" +
                                  std::to_string(a.rows()) + ", expected n=" +
                                  std::to_string(n));
    }
    members.push_back(std::move(a));
  }
  return MatrixSet(std::move(members), std::move(label));
}

std::string dump_matrix_set(const MatrixSet& set) {
  return to_json(set).dump(2) + "\n";
}

MatrixSet parse_matrix_set(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("", std::string("invalid JSON: ") + e.what());
  }
  return matrix_set_from_json(j);
}

MatrixSet load_matrix_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix_set(ss.str());
}

}  // namespace jsrcert
