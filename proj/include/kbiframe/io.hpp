#pragma once

#include "kbiframe/audit.hpp"
#include "kbiframe/certifier.hpp"
#include "kbiframe/instance_gen.hpp"
#include "kbiframe/operator_lab.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace kbf::io {

using Json = nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "1";

Json complex_to_json(Complex z);
Json vector_to_json(std::span<const Complex> v);
Json matrix_to_json(const ComplexMatrix& m);

/// `field` names the JSON location in error messages (e.g. "k[2][0]").
Complex complex_from_json(const Json& j, const std::string& field);
ComplexVector vector_from_json(const Json& j, const std::string& field);
ComplexMatrix matrix_from_json(const Json& j, const std::string& field);

/// InstanceFile: schema_version, dim, x_vectors, y_vectors, k; optional t,
/// factors, alphas, z_vectors, power, name, provenance, seed, truncation_dim.
Json instance_to_json(const gen::Instance& inst);
gen::Instance instance_from_json(const Json& j);

/// Parses text, reporting syntax errors as ParseError with line and column.
Json parse_json(std::string_view text, std::string_view origin);

gen::Instance load_instance(const std::filesystem::path& path);
void save_instance(const gen::Instance& inst, const std::filesystem::path& path);

/// Bare array of rows, or {"matrix": rows}.
ComplexMatrix load_matrix(const std::filesystem::path& path);

/// Sorted keys, two-space indent, shortest round-trip doubles.
std::string canonical_dump(const Json& j);

std::string sha256_hex(std::string_view bytes);

/// "sha256:" + hex digest of the compact canonical InstanceFile.
std::string input_digest(const gen::Instance& inst);

Json tolerances_to_json(const certify::Tolerances& tol);
Json lower_bound_to_json(const certify::LowerBound& a);
Json certificate_fields(const certify::KBiframeCertificate& cert);
Json douglas_fields(const ops::DouglasReport& rep);
Json audit_fields(const audit::AuditReport& rep);

/// Top-level CertificateFile documents.
Json certificate_document(const certify::KBiframeCertificate& cert, const std::string& digest,
                          std::string_view mode);
Json audit_document(const audit::AuditReport& rep, const std::string& digest,
                    const certify::Tolerances& tol);

void save_certificate(const certify::KBiframeCertificate& cert, const gen::Instance& input,
                      const std::filesystem::path& path, std::string_view mode = "k_biframe");
void save_audit(const audit::AuditReport& rep, const gen::Instance& input,
                const certify::Tolerances& tol, const std::filesystem::path& path);

void write_document(const Json& j, std::ostream& out);
void write_document(const Json& j, const std::filesystem::path& path);

} // namespace kbf::io
