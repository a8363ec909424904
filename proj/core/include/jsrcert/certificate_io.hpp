#pragma once

// Self-contained certificate documents. Each carries the matrix set it was
// issued for, so it can be re-validated from the file alone.

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "jsrcert/linalg.hpp"
#include "jsrcert/polytope.hpp"
#include "jsrcert/quadratic.hpp"
#include "jsrcert/sos.hpp"

namespace jsrcert {

using CertificateBody =
    std::variant<SosLyapunovCertificate, PiecewiseQuadraticCertificate, PolytopeCertificate>;

struct Certificate {
  CertificateBody body;
  MatrixSet system;
};

/// "sos", "cqlf", "maxq", "minq" or "polytope".
std::string certificate_kind(const Certificate& cert);

nlohmann::json certificate_to_json(const Certificate& cert);
/// Throws InputError with a JSON pointer on malformed documents.
Certificate certificate_from_json(const nlohmann::json& j);

std::string dump_certificate(const Certificate& cert);
Certificate parse_certificate(const std::string& text);
Certificate load_certificate(const std::string& path);

struct Revalidation {
  bool valid = false;
  std::string kind;
  std::string reason;
};

/// Runs the matching validator. No solver calls.
Revalidation revalidate(const Certificate& cert, std::uint64_t seed = kDefaultSeed,
                        int samples = kDefaultSamples);

}  // namespace jsrcert
