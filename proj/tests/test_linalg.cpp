#include "doctest.h"

#include "kbiframe/errors.hpp"
#include "kbiframe/instance_gen.hpp"
#include "kbiframe/linalg.hpp"
#include "kbiframe/operator_lab.hpp"
#include "test_support.hpp"

#ifdef KBF_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace kbf;
using kbf::testing::max_diff;
using kbf::testing::real_diag;

namespace {

ComplexMatrix reconstruct(const linalg::EigenDecomposition& e) {
  return e.eigenvectors * ComplexMatrix::diagonal(e.eigenvalues) * adjoint(e.eigenvectors);
}

ComplexMatrix reconstruct(const linalg::SvdDecomposition& s) {
  return s.left * ComplexMatrix::diagonal(s.singulars) * adjoint(s.right);
}

double unitarity_defect(const ComplexMatrix& q) {
  return max_diff(adjoint(q) * q, ComplexMatrix::identity(q.cols()));
}

#ifdef KBF_HAVE_EIGEN
Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(i, j) = m(i, j);
    }
  }
  return out;
}
#endif

} // namespace

TEST_CASE("hermitian_eigen on the singular diagonal example") {
  const auto e = linalg::hermitian_eigen(real_diag({2.0, 1.0, 1.0, 0.0}));
  REQUIRE(e.eigenvalues.size() == 4);
  CHECK(e.eigenvalues[0] == doctest::Approx(0.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(e.eigenvalues[2] == doctest::Approx(1.0));
  CHECK(e.eigenvalues[3] == doctest::Approx(2.0));
}

TEST_CASE("hermitian_eigen of the identity") {
  const auto e = linalg::hermitian_eigen(ComplexMatrix::identity(5));
  for (double l : e.eigenvalues) {
    CHECK(l == doctest::Approx(1.0));
  }
  CHECK(unitarity_defect(e.eigenvectors) < 1e-14);
}

TEST_CASE("hermitian_eigen rejects non-Hermitian input") {
  CHECK_THROWS_AS(linalg::hermitian_eigen(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}), NotHermitian);
  CHECK_THROWS_AS(linalg::hermitian_eigen(ComplexMatrix(2, 3)), DimensionMismatch);
}

TEST_CASE("property: random Hermitian reconstruction and orthonormality") {
  gen::Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + rng.index(8);
    const auto h = kbf::testing::random_hermitian(n, rng);
    const auto e = linalg::hermitian_eigen(h);
    CHECK(max_diff(reconstruct(e), h) <= 1e-10);
    CHECK(unitarity_defect(e.eigenvectors) <= 1e-12);
    CHECK(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
  }
}

TEST_CASE("svd examples") {
  auto s = linalg::svd(real_diag({3.0, 2.0, 0.0}));
  CHECK(s.singulars[0] == doctest::Approx(3.0));
  CHECK(s.singulars[1] == doctest::Approx(2.0));
  CHECK(s.singulars[2] == doctest::Approx(0.0));

  // The right shift has orthonormal columns except the last, which is zero.
  s = linalg::svd(gen::right_shift(4));
  CHECK(s.singulars[0] == doctest::Approx(1.0));
  CHECK(s.singulars[1] == doctest::Approx(1.0));
  CHECK(s.singulars[2] == doctest::Approx(1.0));
  CHECK(s.singulars[3] == doctest::Approx(0.0));
  const auto mm = linalg::hermitian_eigen(adjoint(gen::right_shift(4)) * gen::right_shift(4));
  CHECK(mm.eigenvalues.front() == doctest::Approx(0.0));
  CHECK(mm.eigenvalues.back() == doctest::Approx(1.0));

  s = linalg::svd(ComplexMatrix(3, 2));
  for (double v : s.singulars) {
    CHECK(v == 0.0);
  }
  CHECK(unitarity_defect(s.left) < 1e-14);
}

TEST_CASE("property: svd reconstructs rectangular and rank-deficient matrices") {
  gen::Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.index(6);
    ComplexMatrix m = trial % 3 == 0 ? rng.normal_matrix(n, 1 + rng.index(6))
                                     : gen::random_operator(n, rng.index(n + 1), rng);
    const auto s = linalg::svd(m);
    const double smax = s.singulars.empty() ? 0.0 : s.singulars.front();
    CHECK(max_diff(reconstruct(s), m) <= 1e-10 * std::max(1.0, smax));
    CHECK(unitarity_defect(s.left) <= 1e-12);
    CHECK(unitarity_defect(s.right) <= 1e-12);
    CHECK(std::is_sorted(s.singulars.rbegin(), s.singulars.rend()));
  }
}

TEST_CASE("random_operator has the requested numerical rank") {
  gen::Rng rng(23);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::size_t r = 0; r <= n; ++r) {
      CHECK(linalg::numerical_rank(gen::random_operator(n, r, rng)) == r);
    }
  }
}

TEST_CASE("pseudo_inverse examples") {
  CHECK(max_diff(linalg::pseudo_inverse(real_diag({2.0, 0.0})), real_diag({0.5, 0.0})) < 1e-15);
  CHECK_THROWS_AS(linalg::pseudo_inverse(real_diag({1.0}), 0.0), BadParameters);

  gen::Rng rng(24);
  const auto inv = gen::random_operator(4, 4, rng);
  CHECK(max_diff(linalg::pseudo_inverse(inv) * inv, ComplexMatrix::identity(4)) <= 1e-9);

  const auto deficient = gen::random_operator(4, 2, rng);
  const auto res =
      ops::pseudo_inverse_verify(deficient, linalg::pseudo_inverse(deficient), 0.0);
  CHECK(res.max() <= 1e-9);
}

TEST_CASE("psd_sqrt examples") {
  CHECK(max_diff(linalg::psd_sqrt(real_diag({4.0, 1.0, 0.0})), real_diag({2.0, 1.0, 0.0})) <
        1e-14);
  CHECK(max_diff(linalg::psd_sqrt(ComplexMatrix::identity(3)), ComplexMatrix::identity(3)) < 1e-14);
  CHECK_THROWS_AS(linalg::psd_sqrt(real_diag({1.0, -0.5})), NotPsd);

  gen::Rng rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = gen::random_psd(1 + rng.index(6), rng);
    const auto r = linalg::psd_sqrt(h);
    CHECK(max_diff(r * r, h) <= 1e-9);
    CHECK(linalg::hermitian_defect(r) < 1e-14);
  }
}

TEST_CASE("norms, ranks and range bases") {
  CHECK(linalg::spectral_norm(real_diag({2.0, -3.0})) == doctest::Approx(3.0));
  CHECK(linalg::min_eig_hermitian(real_diag({2.0, -3.0})) == doctest::Approx(-3.0));

  const auto c4 = gen::gallery("ex_c4").k;
  CHECK(linalg::numerical_rank(c4) == 3);

  // R(right shift) = span{e2, e3, e4}: its projector is diag(0, 1, 1, 1).
  const auto q = linalg::range_basis(gen::right_shift(4));
  CHECK(q.cols() == 3);
  CHECK(max_diff(q * adjoint(q), real_diag({0.0, 1.0, 1.0, 1.0})) < 1e-14);
  CHECK(linalg::range_basis(ComplexMatrix(3, 3)).cols() == 0);
}

#ifdef KBF_HAVE_EIGEN
TEST_CASE("oracle: eigenvalues and singular values agree with Eigen") {
  gen::Rng rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.index(10);
    const auto h = kbf::testing::random_hermitian(n, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(h));
    const auto ours = linalg::hermitian_eigen(h).eigenvalues;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(ours[i] == doctest::Approx(es.eigenvalues()(static_cast<Eigen::Index>(i))).epsilon(1e-10));
    }

    const auto m = gen::random_operator(n, rng.index(n + 1), rng);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
    const auto sv = linalg::svd(m).singulars;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(sv[i] - svd.singularValues()(static_cast<Eigen::Index>(i))) < 1e-12);
    }
  }
}
#endif
