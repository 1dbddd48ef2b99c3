#include "doctest.h"

#include "kbiframe/errors.hpp"
#include "kbiframe/matrix.hpp"
#include "test_support.hpp"

#include <limits>

using namespace kbf;
using kbf::testing::max_diff;

TEST_CASE("adjoint conjugates and transposes") {
  CHECK(adjoint(ComplexMatrix::identity(3)) == ComplexMatrix::identity(3));

  const ComplexMatrix shift{{0.0, 1.0}, {0.0, 0.0}};
  CHECK(adjoint(shift) == ComplexMatrix{{0.0, 0.0}, {1.0, 0.0}});

  ComplexMatrix m(2, 3);
  m(0, 1) = Complex{0.0, 1.0};
  const auto a = adjoint(m);
  CHECK(a.rows() == 3);
  CHECK(a.cols() == 2);
  CHECK(a(1, 0) == Complex{0.0, -1.0});
}

TEST_CASE("construction validates shape and entries") {
  CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<Complex>(3)), DimensionMismatch);
  CHECK_THROWS_AS(ComplexMatrix({{1.0, 2.0}, {3.0}}), DimensionMismatch);
  CHECK_THROWS_AS(ComplexMatrix(kMaxDimension + 1, 1), SizeLimitExceeded);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ComplexMatrix(1, 1, {Complex{nan, 0.0}}), NonFiniteEntry);
  CHECK_THROWS_AS(ComplexMatrix({{Complex{0.0, INFINITY}}}), NonFiniteEntry);
}

TEST_CASE("products follow row-by-column convention") {
  const ComplexMatrix a{{1.0, 2.0}, {3.0, 4.0}};
  const ComplexMatrix b{{0.0, 1.0}, {1.0, 0.0}};
  CHECK(a * b == ComplexMatrix{{2.0, 1.0}, {4.0, 3.0}});
  CHECK(b * a == ComplexMatrix{{3.0, 4.0}, {1.0, 2.0}});

  const ComplexVector x{1.0, Complex{0.0, 1.0}};
  const auto ax = a * std::span<const Complex>(x);
  CHECK(ax[0] == Complex{1.0, 2.0});
  CHECK(ax[1] == Complex{3.0, 4.0});

  CHECK_THROWS_AS(a * ComplexMatrix(3, 1), DimensionMismatch);
  CHECK_THROWS_AS(a + ComplexMatrix(2, 3), DimensionMismatch);
}

TEST_CASE("inner product is linear in the first argument") {
  const ComplexVector u{Complex{0.0, 1.0}, 0.0};
  const ComplexVector v{1.0, 0.0};
  CHECK(inner(u, v) == Complex{0.0, 1.0});
  CHECK(inner(v, u) == Complex{0.0, -1.0});
  CHECK(norm2(ComplexVector{3.0, Complex{0.0, 4.0}}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(inner(u, ComplexVector(3)), DimensionMismatch);
}

TEST_CASE("outer product u·v* applied to w gives ⟨w, v⟩·u") {
  gen::Rng rng(5);
  const auto u = rng.normal_vector(4);
  const auto v = rng.normal_vector(4);
  const auto w = rng.normal_vector(4);
  const auto lhs = ComplexMatrix::outer(u, v) * std::span<const Complex>(w);
  const auto rhs = scaled(u, inner(w, v));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(lhs[i] - rhs[i]) < 1e-13);
  }
}

TEST_CASE("diagonal, trace and norms") {
  const auto d = kbf::testing::real_diag({2.0, 1.0, 1.0, 0.0});
  CHECK(trace(d) == Complex{4.0, 0.0});
  CHECK(frobenius_norm(d) == doctest::Approx(std::sqrt(6.0)));
  CHECK(max_abs_entry(d) == 2.0);

  std::vector<ComplexVector> cols{{1.0, 0.0}, {0.0, 2.0}, {3.0, 0.0}};
  const auto m = ComplexMatrix::from_columns(cols, 2);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.column(2) == ComplexVector{3.0, 0.0});
  CHECK(m.leading_columns(2) == ComplexMatrix{{1.0, 0.0}, {0.0, 2.0}});
}

TEST_CASE("property: (AB)* = B*A* on random rectangular matrices") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t r = 1 + rng.index(5);
    const std::size_t k = 1 + rng.index(5);
    const std::size_t c = 1 + rng.index(5);
    const auto a = rng.normal_matrix(r, k);
    const auto b = rng.normal_matrix(k, c);
    CHECK(max_diff(adjoint(a * b), adjoint(b) * adjoint(a)) < 1e-13);
  }
}
