#pragma once

// JSON interchange for matrix sets:
//   { "n": int, "label": string, "matrices": [[[row], [row], ...], ...] }

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "jsrcert/linalg.hpp"

namespace jsrcert {

/// Malformed input document. `where()` is a JSON pointer to the offending
/// field, e.g. "/matrices/1/0/2".
class InputError : public std::runtime_error {
 public:
  InputError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

nlohmann::json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json to_json(const MatrixSet& set);
MatrixSet matrix_set_from_json(const nlohmann::json& j);

/// Serialized text (two-space indent, trailing newline). Doubles are written
/// with shortest round-trip precision, so parse(dump(S)) == S bit-exactly.
std::string dump_matrix_set(const MatrixSet& set);
MatrixSet parse_matrix_set(const std::string& text);
MatrixSet load_matrix_set(const std::string& path);

}  // namespace jsrcert
