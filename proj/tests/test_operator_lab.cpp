#include "doctest.h"

#include "kbiframe/errors.hpp"
#include "kbiframe/frame.hpp"
#include "kbiframe/instance_gen.hpp"
#include "kbiframe/operator_lab.hpp"
#include "test_support.hpp"

#include <numbers>

using namespace kbf;
using kbf::testing::max_diff;
using kbf::testing::real_diag;

namespace {

ComplexMatrix dft(std::size_t n) {
  ComplexMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(n);
      f(j, k) = scale * std::polar(1.0, -angle);
    }
  }
  return f;
}

} // namespace

TEST_CASE("douglas: left shift range is not inside right shift range") {
  const auto r = ops::douglas_check(gen::left_shift(4), gen::right_shift(4));
  CHECK_FALSE(r.range_included);
  CHECK_FALSE(r.projector_test);
  CHECK_FALSE(r.majorization_test);
  CHECK_FALSE(r.factorization_test);
  CHECK(r.projector_residual == doctest::Approx(1.0));
  CHECK_FALSE(r.lambda_min.has_value());
  REQUIRE(r.witness.has_value());
  CHECK(std::abs((*r.witness)[0]) == doctest::Approx(1.0));
}

TEST_CASE("douglas: identity against itself") {
  const auto id = ComplexMatrix::identity(3);
  const auto r = ops::douglas_check(id, id);
  CHECK(r.range_included);
  CHECK(r.projector_test);
  CHECK(r.majorization_test);
  CHECK(r.factorization_test);
  REQUIRE(r.lambda_min.has_value());
  CHECK(*r.lambda_min == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(r.factor_u.has_value());
  CHECK(max_diff(*r.factor_u, id) < 1e-12);
  CHECK_FALSE(r.witness.has_value());
}

TEST_CASE("douglas: t1 = t2·U0 is included and U reproduces t1") {
  gen::Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.index(6);
    const auto t2 = gen::random_operator(n, rng.index(n + 1), rng);
    const auto t1 = t2 * rng.normal_matrix(n, n);
    const auto r = ops::douglas_check(t1, t2);
    CHECK(r.range_included);
    CHECK(r.projector_test);
    CHECK(r.majorization_test);
    CHECK(r.factorization_test);
    CHECK(r.factorization_residual <= 1e-9);
    CHECK(r.majorization_margin >= -1e-9);
    REQUIRE(r.factor_u.has_value());
    CHECK(max_diff(t2 * *r.factor_u, t1) <= 1e-9);
  }
}

TEST_CASE("douglas: zero t1 is always included with λ = 0") {
  const auto r = ops::douglas_check(ComplexMatrix(3, 3), gen::right_shift(3));
  CHECK(r.range_included);
  REQUIRE(r.lambda_min.has_value());
  CHECK(*r.lambda_min == doctest::Approx(0.0));
}

TEST_CASE("property: the three Douglas tests agree") {
  gen::Rng rng(52);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.index(6);
    const auto t1 = gen::random_operator(n, rng.index(n + 1), rng);
    const auto t2 = gen::random_operator(n, rng.index(n + 1), rng);
    const auto r = ops::douglas_check(t1, t2);
    CHECK(r.projector_test == r.majorization_test);
    CHECK(r.projector_test == r.factorization_test);
    CHECK(r.range_included == r.projector_test);
  }
}

TEST_CASE("injectivity_constant examples") {
  CHECK(ops::injectivity_constant(ComplexMatrix::identity(4)) == doctest::Approx(1.0));
  CHECK(ops::injectivity_constant(gen::left_shift(4)) == doctest::Approx(0.0));
  CHECK(ops::injectivity_constant(real_diag({2.0, 3.0})) == doctest::Approx(4.0));
}

TEST_CASE("is_coisometry examples") {
  CHECK(ops::is_coisometry(dft(5), 1e-10));
  CHECK_FALSE(ops::is_coisometry(gen::right_shift(4), 1e-10));
  CHECK_FALSE(ops::is_coisometry(2.0 * ComplexMatrix::identity(3), 1e-10));
  gen::Rng rng(53);
  CHECK(ops::is_coisometry(gen::random_unitary(6, rng), 1e-10));
}

TEST_CASE("commutation_residual examples") {
  CHECK(ops::commutation_residual(real_diag({1.0, 2.0}), real_diag({3.0, 4.0})) == 0.0);
  // [e1e2*, e2e1*] = diag(1, -1).
  const ComplexMatrix a{{0.0, 1.0}, {0.0, 0.0}};
  CHECK(ops::commutation_residual(a, adjoint(a)) == doctest::Approx(1.0));
  gen::Rng rng(54);
  const auto p = gen::random_commuting_pair(5, rng);
  CHECK(ops::commutation_residual(p.t, p.k) <= 1e-10);
}

TEST_CASE("pseudo_inverse_verify examples") {
  const auto d = real_diag({2.0, 0.0});
  CHECK(ops::pseudo_inverse_verify(d, real_diag({0.5, 0.0}), 0.0).max() < 1e-14);
  // A right inverse that leaks into N(d) is not the Moore-Penrose inverse.
  const ComplexMatrix wrong{{0.5, 0.0}, {1.0, 0.0}};
  CHECK(ops::pseudo_inverse_verify(d, wrong, 0.0).max() > 0.5);
  CHECK(ops::pseudo_inverse_verify(ComplexMatrix(3, 3), ComplexMatrix(3, 3), 0.0).max() == 0.0);
}

TEST_CASE("restrict_to_range examples") {
  const auto s = real_diag({2.0, 1.0, 1.0, 0.0});
  const auto k = gen::gallery("ex_s_singular").k;
  auto r = ops::restrict_to_range(s, k);
  CHECK(r.basis.cols() == 3);
  CHECK(r.sigma_min == doctest::Approx(1.0));

  r = ops::restrict_to_range(ComplexMatrix::identity(3), gen::random_operator(3, 2, 55));
  CHECK(r.sigma_min == doctest::Approx(1.0));
  CHECK(max_diff(r.compression, ComplexMatrix::identity(2)) < 1e-12);

  r = ops::restrict_to_range(s, ComplexMatrix(4, 4));
  CHECK(r.basis.cols() == 0);
  CHECK(r.sigma_min == 0.0);

  // S vanishes on e4, so against the full space σ_min is 0.
  CHECK(ops::restrict_to_range(s, ComplexMatrix::identity(4)).sigma_min == doctest::Approx(0.0));
}
