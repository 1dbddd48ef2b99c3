#include "kbiframe/io.hpp"

#include "kbiframe/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace kbf::io {

namespace {

std::string at(const std::string& field, std::size_t i) {
  return field + "[" + std::to_string(i) + "]";
}

const Json& require_field(const Json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    throw SchemaError(std::string(key), "missing required field");
  }
  return *it;
}

const Json& require_array(const Json& j, const std::string& field) {
  if (!j.is_array()) {
    throw SchemaError(field, "expected an array");
  }
  return j;
}

std::size_t require_count(const Json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw SchemaError(field, "expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

frame::FrameSequence sequence_from_json(const Json& j, const std::string& field, std::size_t dim) {
  require_array(j, field);
  std::vector<ComplexVector> vs;
  vs.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto v = vector_from_json(j[i], at(field, i));
    if (v.size() != dim) {
      throw SchemaError(at(field, i), "expected " + std::to_string(dim) + " entries, got " +
                                          std::to_string(v.size()));
    }
    vs.push_back(std::move(v));
  }
  return {dim, std::move(vs)};
}

Json sequence_to_json(const frame::FrameSequence& s) {
  Json out = Json::array();
  for (const auto& v : s.vectors()) {
    out.push_back(vector_to_json(v));
  }
  return out;
}

gen::Provenance provenance_from_string(std::string_view s) {
  for (auto p : {gen::Provenance::PaperGallery, gen::Provenance::RandomFamily,
                 gen::Provenance::File}) {
    if (gen::to_string(p) == s) {
      return p;
    }
  }
  throw SchemaError("provenance", "unknown provenance '" + std::string(s) + "'");
}

void require_square(const ComplexMatrix& m, std::size_t dim, const std::string& field) {
  if (m.rows() != dim || m.cols() != dim) {
    throw SchemaError(field, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                                 " matrix, got " + std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path.string() + ": cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Lines and columns are 1-based; `offset` is a byte count as nlohmann reports it.
std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Json optional_vector(const std::optional<ComplexVector>& v) {
  return v ? vector_to_json(*v) : Json(nullptr);
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

} // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json vector_to_json(std::span<const Complex> v) {
  Json out = Json::array();
  for (const auto& z : v) {
    out.push_back(complex_to_json(z));
  }
  return out;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out.push_back(vector_to_json(m.row(i)));
  }
  return out;
}

Complex complex_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError(field, "expected a complex number as [re, im]");
  }
  const Complex z{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw SchemaError(field, "non-finite entry");
  }
  return z;
}

ComplexVector vector_from_json(const Json& j, const std::string& field) {
  require_array(j, field);
  ComplexVector v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v.push_back(complex_from_json(j[i], at(field, i)));
  }
  return v;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& field) {
  require_array(j, field);
  if (j.empty()) {
    throw SchemaError(field, "matrix has no rows");
  }
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  std::vector<Complex> entries;
  for (std::size_t i = 0; i < rows; ++i) {
    auto row = vector_from_json(j[i], at(field, i));
    if (i == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw SchemaError(at(field, i), "ragged matrix: expected " + std::to_string(cols) +
                                          " columns, got " + std::to_string(row.size()));
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  if (rows > kMaxDimension || cols > kMaxDimension) {
    throw SchemaError(field, "matrix exceeds " + std::to_string(kMaxDimension) + " rows or columns");
  }
  return {rows, cols, std::move(entries)};
}

Json instance_to_json(const gen::Instance& inst) {
  Json j = Json::object();
  j["schema_version"] = std::string(kSchemaVersion);
  j["dim"] = inst.dim();
  j["x_vectors"] = sequence_to_json(inst.pair.x());
  j["y_vectors"] = sequence_to_json(inst.pair.y());
  j["k"] = matrix_to_json(inst.k);
  if (inst.t) {
    j["t"] = matrix_to_json(*inst.t);
  }
  if (!inst.factors.empty()) {
    j["factors"] = Json::array();
    for (const auto& f : inst.factors) {
      j["factors"].push_back(matrix_to_json(f));
    }
  }
  if (!inst.alphas.empty()) {
    j["alphas"] = vector_to_json(inst.alphas);
  }
  if (inst.z) {
    j["z_vectors"] = sequence_to_json(*inst.z);
  }
  if (inst.power) {
    j["power"] = *inst.power;
  }
  if (!inst.name.empty()) {
    j["name"] = inst.name;
  }
  j["provenance"] = std::string(gen::to_string(inst.provenance));
  if (inst.seed) {
    j["seed"] = *inst.seed;
  }
  if (inst.truncation_dim) {
    j["truncation_dim"] = *inst.truncation_dim;
  }
  return j;
}

gen::Instance instance_from_json(const Json& j) {
  if (!j.is_object()) {
    throw SchemaError("(root)", "expected a JSON object");
  }
  const Json& version = require_field(j, "schema_version");
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion) {
    throw SchemaError("schema_version", "expected \"" + std::string(kSchemaVersion) + "\"");
  }
  const std::size_t dim = require_count(require_field(j, "dim"), "dim");
  if (dim == 0 || dim > kMaxDimension) {
    throw SchemaError("dim", "must be in [1, " + std::to_string(kMaxDimension) + "]");
  }
  gen::Instance inst;
  auto x = sequence_from_json(require_field(j, "x_vectors"), "x_vectors", dim);
  auto y = sequence_from_json(require_field(j, "y_vectors"), "y_vectors", dim);
  if (x.size() != y.size()) {
    throw SchemaError("y_vectors", "expected " + std::to_string(x.size()) +
                                       " vectors to match x_vectors, got " +
                                       std::to_string(y.size()));
  }
  inst.pair = frame::BiframePair(std::move(x), std::move(y));
  inst.k = matrix_from_json(require_field(j, "k"), "k");
  require_square(inst.k, dim, "k");

  if (auto it = j.find("t"); it != j.end()) {
    inst.t = matrix_from_json(*it, "t");
    require_square(*inst.t, dim, "t");
  }
  if (auto it = j.find("factors"); it != j.end()) {
    require_array(*it, "factors");
    for (std::size_t i = 0; i < it->size(); ++i) {
      auto f = matrix_from_json((*it)[i], at("factors", i));
      require_square(f, dim, at("factors", i));
      inst.factors.push_back(std::move(f));
    }
  }
  if (auto it = j.find("alphas"); it != j.end()) {
    inst.alphas = vector_from_json(*it, "alphas");
  }
  if (auto it = j.find("z_vectors"); it != j.end()) {
    auto z = sequence_from_json(*it, "z_vectors", dim);
    if (z.size() != inst.pair.size()) {
      throw SchemaError("z_vectors", "expected " + std::to_string(inst.pair.size()) + " vectors");
    }
    inst.z = std::move(z);
  }
  if (auto it = j.find("power"); it != j.end()) {
    const std::size_t power = require_count(*it, "power");
    if (power < 1 || power > 64) {
      throw SchemaError("power", "must be in [1, 64]");
    }
    inst.power = static_cast<unsigned>(power);
  }
  if (auto it = j.find("name"); it != j.end()) {
    if (!it->is_string()) {
      throw SchemaError("name", "expected a string");
    }
    inst.name = it->get<std::string>();
  }
  inst.provenance = gen::Provenance::File;
  if (auto it = j.find("provenance"); it != j.end()) {
    if (!it->is_string()) {
      throw SchemaError("provenance", "expected a string");
    }
    inst.provenance = provenance_from_string(it->get<std::string>());
  }
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) {
      throw SchemaError("seed", "expected a nonnegative integer");
    }
    inst.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("truncation_dim"); it != j.end()) {
    inst.truncation_dim = require_count(*it, "truncation_dim");
  }
  return inst;
}

Json parse_json(std::string_view text, std::string_view origin) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string(origin) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": invalid JSON (" + e.what() + ")");
  }
}

gen::Instance load_instance(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const Json j = parse_json(text, path.string());
  try {
    return instance_from_json(j);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    // Frame-model validation (dimension, finiteness) surfaced as a schema problem.
    throw SchemaError("(instance)", e.what());
  }
}

void save_instance(const gen::Instance& inst, const std::filesystem::path& path) {
  write_document(instance_to_json(inst), path);
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const Json j = parse_json(text, path.string());
  if (j.is_object()) {
    return matrix_from_json(require_field(j, "matrix"), "matrix");
  }
  return matrix_from_json(j, "(root)");
}

std::string canonical_dump(const Json& j) { return j.dump(2); }

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string input_digest(const gen::Instance& inst) {
  return "sha256:" + sha256_hex(instance_to_json(inst).dump());
}

Json tolerances_to_json(const certify::Tolerances& tol) {
  return {{"herm_tol", tol.herm_tol}, {"bis_tol", tol.bis_tol}, {"ktol", tol.ktol}};
}

Json lower_bound_to_json(const certify::LowerBound& a) {
  return a.unbounded ? Json("unbounded") : Json(a.value);
}

Json certificate_fields(const certify::KBiframeCertificate& cert) {
  return {
      {"hermitian_residual", cert.hermitian_residual},
      {"psd_margin", cert.psd_margin},
      {"a_opt", lower_bound_to_json(cert.a_opt)},
      {"b_opt", cert.b_opt},
      {"a_estimate", cert.a_estimate},
      {"is_k_biframe", cert.is_k_biframe},
      {"is_tight", cert.is_tight},
      {"is_parseval", cert.is_parseval},
      {"verdict", std::string(certify::to_string(cert.verdict))},
      {"witness_lower", optional_vector(cert.witness_lower)},
  };
}

Json douglas_fields(const ops::DouglasReport& rep) {
  return {
      {"range_included", rep.range_included},
      {"lambda_min", rep.lambda_min ? Json(*rep.lambda_min) : Json(nullptr)},
      {"factor_u", rep.factor_u ? matrix_to_json(*rep.factor_u) : Json(nullptr)},
      {"projector_test", rep.projector_test},
      {"majorization_test", rep.majorization_test},
      {"factorization_test", rep.factorization_test},
      {"projector_residual", rep.projector_residual},
      {"factorization_residual", rep.factorization_residual},
      {"majorization_margin", rep.majorization_margin},
      {"witness", optional_vector(rep.witness)},
  };
}

Json audit_fields(const audit::AuditReport& rep) {
  Json j = Json::object();
  j["statement"] = std::string(audit::to_string(rep.statement));
  j["hypotheses_ok"] = rep.hypotheses_ok;
  j["hypotheses"] = Json::array();
  for (const auto& h : rep.hypotheses) {
    j["hypotheses"].push_back({{"name", h.name}, {"ok", h.ok}, {"residual", number_or_null(h.residual)}});
  }
  if (rep.claimed) {
    j["claimed_bounds"] = {{"lower", lower_bound_to_json(rep.claimed->lower)},
                           {"upper", rep.claimed->upper ? Json(*rep.claimed->upper) : Json(nullptr)}};
  } else {
    j["claimed_bounds"] = nullptr;
  }
  j["claim_valid"] = rep.claim_valid;
  j["intermediate_valid"] = rep.intermediate_valid ? Json(*rep.intermediate_valid) : Json(nullptr);
  j["certificate"] = rep.certificate ? certificate_fields(*rep.certificate) : Json(nullptr);
  j["douglas"] = rep.douglas ? douglas_fields(*rep.douglas) : Json(nullptr);
  if (rep.witness) {
    j["witness"] = {{"vector", rep.witness->vector.empty() ? Json(nullptr)
                                                            : vector_to_json(rep.witness->vector)},
                    {"description", rep.witness->description},
                    {"margin", number_or_null(rep.witness->margin)}};
  } else {
    j["witness"] = nullptr;
  }
  j["metrics"] = Json::object();
  for (const auto& [name, value] : rep.metrics) {
    j["metrics"][name] = number_or_null(value);
  }
  j["trials"] = rep.trials;
  j["violations"] = rep.violations;
  j["notes"] = rep.notes;
  return j;
}

Json certificate_document(const certify::KBiframeCertificate& cert, const std::string& digest,
                          std::string_view mode) {
  return {{"schema_version", std::string(kSchemaVersion)},
          {"kind", "certificate"},
          {"mode", std::string(mode)},
          {"input_digest", digest},
          {"tolerances", tolerances_to_json(cert.tolerances)},
          {"certificate", certificate_fields(cert)}};
}

Json audit_document(const audit::AuditReport& rep, const std::string& digest,
                    const certify::Tolerances& tol) {
  return {{"schema_version", std::string(kSchemaVersion)},
          {"kind", "audit"},
          {"input_digest", digest},
          {"tolerances", tolerances_to_json(tol)},
          {"report", audit_fields(rep)}};
}

void save_certificate(const certify::KBiframeCertificate& cert, const gen::Instance& input,
                      const std::filesystem::path& path, std::string_view mode) {
  write_document(certificate_document(cert, input_digest(input), mode), path);
}

void save_audit(const audit::AuditReport& rep, const gen::Instance& input,
                const certify::Tolerances& tol, const std::filesystem::path& path) {
  write_document(audit_document(rep, input_digest(input), tol), path);
}

void write_document(const Json& j, std::ostream& out) { out << canonical_dump(j) << '\n'; }

void write_document(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(path.string() + ": cannot open for writing");
  }
  write_document(j, out);
  if (!out) {
    throw Error(path.string() + ": write failed");
  }
}

} // namespace kbf::io
