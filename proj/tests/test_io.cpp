#include "doctest.h"

#include "kbiframe/certifier.hpp"
#include "kbiframe/errors.hpp"
#include "kbiframe/instance_gen.hpp"
#include "kbiframe/io.hpp"
#include "test_support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace kbf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "kbiframe_test_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

void check_same(const gen::Instance& a, const gen::Instance& b) {
  CHECK(a.name == b.name);
  CHECK(a.pair.x() == b.pair.x());
  CHECK(a.pair.y() == b.pair.y());
  CHECK(a.k == b.k);
  CHECK(a.t == b.t);
  CHECK(a.factors == b.factors);
  CHECK(a.alphas == b.alphas);
  CHECK(a.power == b.power);
  CHECK(a.provenance == b.provenance);
  CHECK(a.seed == b.seed);
  CHECK(a.truncation_dim == b.truncation_dim);
  CHECK(a.z.has_value() == b.z.has_value());
  if (a.z && b.z) {
    CHECK(*a.z == *b.z);
  }
}

} // namespace

TEST_CASE("SHA-256 known answers") {
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("property: gallery and random instances survive a file round trip exactly") {
  for (const auto& name : gen::gallery_names()) {
    CAPTURE(name);
    const auto inst = gen::gallery(name);
    const auto path = scratch(name + ".json");
    io::save_instance(inst, path);
    const auto back = io::load_instance(path);
    check_same(inst, back);
    CHECK(io::input_digest(inst) == io::input_digest(back));
  }
  gen::Rng rng(81);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = gen::random_triple(1 + rng.index(5), 6, gen::Family::Skew, rng);
    inst.t = rng.normal_matrix(inst.dim(), inst.dim());
    inst.factors = {inst.k, rng.normal_matrix(inst.dim(), inst.dim())};
    inst.alphas = {rng.normal(), rng.normal()};
    inst.seed = 0xFFFFFFFFFFFFFFFFull;
    const auto text = io::canonical_dump(io::instance_to_json(inst));
    const auto back = io::instance_from_json(io::parse_json(text, "mem"));
    check_same(inst, back);
  }
}

TEST_CASE("digest is stable and sensitive to content") {
  const auto a = gen::gallery("ex_c4");
  const auto d = io::input_digest(a);
  CHECK(d.rfind("sha256:", 0) == 0);
  CHECK(d.size() == 7 + 64);
  CHECK(d == io::input_digest(gen::gallery("ex_c4")));
  auto b = a;
  b.k(0, 0) = 2.0;
  CHECK(d != io::input_digest(b));
}

TEST_CASE("schema errors name the offending field") {
  const std::string good =
      R"({"schema_version":"1","dim":2,"x_vectors":[[[1,0],[0,0]]],"y_vectors":[[[1,0],[0,0]]],)"
      R"("k":[[[1,0],[0,0]],[[0,0],[1,0]]]})";
  CHECK_NOTHROW(io::instance_from_json(io::parse_json(good, "mem")));

  auto expect_field = [](const std::string& text, const std::string& field) {
    CAPTURE(text);
    try {
      io::instance_from_json(io::parse_json(text, "mem"));
      FAIL("no SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.field() == field);
    }
  };
  expect_field(R"({"schema_version":"1","dim":2,"y_vectors":[],"k":[]})", "x_vectors");
  expect_field(R"({"schema_version":"2","dim":2,"x_vectors":[],"y_vectors":[],"k":[]})",
               "schema_version");
  expect_field(R"({"schema_version":"1","dim":2,"x_vectors":[[[1,0],[0,0],[0,0]]],)"
               R"("y_vectors":[[[1,0],[0,0]]],"k":[[[1,0],[0,0]],[[0,0],[1,0]]]})",
               "x_vectors[0]");
  expect_field(R"({"schema_version":"1","dim":2,"x_vectors":[[[1,0],[0,0]]],)"
               R"("y_vectors":[[[1,0],[0,"a"]]],"k":[[[1,0],[0,0]],[[0,0],[1,0]]]})",
               "y_vectors[0][1]");
  expect_field(R"({"schema_version":"1","dim":2,"x_vectors":[[[1,0],[0,0]]],)"
               R"("y_vectors":[[[1,0],[0,0]]],"k":[[[1,0],[0,0]],[[0,0],[1,0]]],"power":0})",
               "power");
}

TEST_CASE("parse errors report line and column") {
  const auto path = scratch("broken.json");
  write_text(path, "{\n  \"dim\": 2,\n  \"x_vectors\": [,]\n}\n");
  try {
    io::load_instance(path);
    FAIL("no ParseError");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("broken.json:3:") != std::string::npos);
  }
  CHECK_THROWS_AS(io::load_instance(scratch("missing.json")), ParseError);
}

TEST_CASE("load_matrix accepts both layouts") {
  const auto bare = scratch("bare.json");
  write_text(bare, "[[[1,0],[0,1]],[[2,0],[0,0]]]");
  const auto wrapped = scratch("wrapped.json");
  write_text(wrapped, R"({"matrix": [[[1,0],[0,1]],[[2,0],[0,0]]]})");
  const ComplexMatrix expect{{1.0, Complex{0.0, 1.0}}, {2.0, 0.0}};
  CHECK(io::load_matrix(bare) == expect);
  CHECK(io::load_matrix(wrapped) == expect);
  write_text(bare, "[[[1,0]],[[2,0],[0,0]]]");
  CHECK_THROWS_AS(io::load_matrix(bare), SchemaError);
}

TEST_CASE("certificate documents") {
  const auto parseval = gen::gallery("parseval", 3);
  auto cert = certify::certify_k_biframe(parseval.pair, ComplexMatrix(3, 3));
  const auto doc = io::certificate_document(cert, io::input_digest(parseval), "k_biframe");
  CHECK(doc.at("kind") == "certificate");
  CHECK(doc.at("input_digest") == io::input_digest(parseval));
  const std::string text = io::canonical_dump(doc);
  CHECK(text.find("\"unbounded\"") != std::string::npos);
  // Canonical output sorts keys and is byte-stable.
  CHECK(text == io::canonical_dump(io::parse_json(text, "mem")));

  const auto c4 = gen::gallery("ex_c4");
  cert = certify::certify_k_biframe(c4.pair, c4.k);
  std::ostringstream out;
  io::write_document(io::certificate_document(cert, io::input_digest(c4), "k_biframe"), out);
  const auto back = io::parse_json(out.str(), "mem");
  CHECK(back.at("certificate").at("verdict") == "k_biframe");
}
