#include "doctest.h"

#include "kbiframe/audit.hpp"
#include "kbiframe/errors.hpp"
#include "kbiframe/frame.hpp"
#include "kbiframe/instance_gen.hpp"
#include "test_support.hpp"

using namespace kbf;
using kbf::testing::basis;
using kbf::testing::real_diag;

namespace {

const certify::Tolerances kTol{};

// A·‖M*w‖² − Re Φ(w), recomputed from scratch.
double lower_violation(const frame::BiframePair& p, const ComplexMatrix& m, double a,
                       const ComplexVector& w) {
  const double mw = norm2(adjoint(m) * std::span<const Complex>(w));
  return a * mw * mw - frame::pair_form(p, w).real();
}

frame::BiframePair standard_pair(std::size_t n) {
  const auto e = frame::FrameSequence::standard_basis(n);
  return {e, e};
}

} // namespace

TEST_CASE("statement ids round-trip") {
  CHECK(audit::all_statements().size() == 14);
  for (auto s : audit::all_statements()) {
    CHECK(audit::statement_from_string(audit::to_string(s)) == s);
  }
  CHECK_THROWS_AS(audit::statement_from_string("nope"), UnknownName);
}

TEST_CASE("check_claimed_bounds flags the ℂ⁴ claim A = 1") {
  const auto inst = gen::gallery("ex_c4");
  const audit::ClaimedBounds claimed{certify::LowerBound::finite(1.0), 3.0};
  const auto c = audit::check_claimed_bounds(inst.pair, inst.k, claimed, kTol);
  CHECK_FALSE(c.lower_ok);
  CHECK(c.upper_ok);
  CHECK(c.lower_margin == doctest::Approx(-6.0));
  REQUIRE(c.witness.has_value());
  CHECK(lower_violation(inst.pair, inst.k, 1.0, c.witness->vector) ==
        doctest::Approx(c.witness->margin));
  CHECK(c.witness->margin > 10 * kTol.herm_tol);

  const audit::ClaimedBounds fixed{certify::LowerBound::finite(1.0 / 3.0), 3.0};
  CHECK(audit::check_claimed_bounds(inst.pair, inst.k, fixed, kTol).lower_ok);
}

TEST_CASE("swap on ℂ⁴") {
  const auto inst = gen::gallery("ex_c4");
  const auto r = audit::audit_swap(inst.pair, inst.k);
  CHECK(r.claim_valid);
  CHECK(r.intermediate_valid == true);
  CHECK(*r.metric("swap_identity_residual") <= 1e-12);
}

TEST_CASE("sum: X = Y = Z = standard basis gives A = 4") {
  const auto e = frame::FrameSequence::standard_basis(3);
  const auto r = audit::audit_sum(e, e, e, ComplexMatrix::identity(3));
  CHECK(r.hypotheses_ok);
  CHECK(r.claim_valid);
  REQUIRE(r.claimed.has_value());
  CHECK(r.claimed->lower.value == doctest::Approx(4.0));
  CHECK(*r.claimed->upper == doctest::Approx(4.0));
  REQUIRE(r.certificate.has_value());
  CHECK(r.certificate->a_opt.value == doctest::Approx(4.0));
}

TEST_CASE("linear combination") {
  const auto p = standard_pair(3);
  const auto id = ComplexMatrix::identity(3);

  auto r = audit::audit_linear_combination(p, {{1.0, id}, {0.0, id}});
  CHECK(r.claim_valid);
  CHECK(r.claimed->lower.value == doctest::Approx(1.0));

  // α = (1, 1), K₁ = K₂ = I: claimed A = 1/2 but M = 2I needs A ≤ 1/4.
  r = audit::audit_linear_combination(p, {{1.0, id}, {1.0, id}});
  CHECK(r.hypotheses_ok);
  CHECK_FALSE(r.claim_valid);
  CHECK(r.claimed->lower.value == doctest::Approx(0.5));
  CHECK(r.certificate->a_opt.value == doctest::Approx(0.25));
  REQUIRE(r.witness.has_value());
  const double recomputed = lower_violation(p, 2.0 * id, 0.5, r.witness->vector);
  CHECK(recomputed == doctest::Approx(r.witness->margin));
  CHECK(recomputed > 10 * kTol.herm_tol);

  CHECK_THROWS_AS(audit::audit_linear_combination(p, {}), BadParameters);
}

TEST_CASE("product") {
  const auto inst = gen::gallery("ex_c4");
  auto r = audit::audit_product(inst.pair, {inst.k, ComplexMatrix::identity(4)});
  CHECK(r.claim_valid);
  CHECK(*r.metric("tail_norm") == doctest::Approx(1.0));
  CHECK(r.claimed->lower.value == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

  r = audit::audit_product(inst.pair, {inst.k, ComplexMatrix(4, 4)});
  CHECK(r.claim_valid);
  CHECK(r.claimed->lower.unbounded);
}

TEST_CASE("norm promotion") {
  const auto p = standard_pair(3);
  auto r = audit::audit_norm_promotion(p, ComplexMatrix::identity(3));
  CHECK(r.hypotheses_ok);
  CHECK(r.claim_valid);
  r = audit::audit_norm_promotion(p, 2.0 * ComplexMatrix::identity(3));
  CHECK(r.claim_valid);
  CHECK(r.claimed->lower.value == doctest::Approx(0.25));
  // ‖K‖ < 1 leaves the statement vacuous.
  r = audit::audit_norm_promotion(p, 0.5 * ComplexMatrix::identity(3));
  CHECK_FALSE(r.hypotheses_ok);
  CHECK(r.claim_valid);
}

TEST_CASE("operator inequality agrees with the definition") {
  for (const char* name : {"ex_c4", "parseval", "ex_s_singular"}) {
    CAPTURE(name);
    const auto inst = gen::gallery(name);
    const auto r = audit::audit_operator_inequality(inst.pair, inst.k);
    CHECK(r.claim_valid);
  }
  // A pair with a negative direction is rejected on both sides.
  const frame::FrameSequence x(2, {basis(2, 0)});
  const frame::FrameSequence y(2, {basis(2, 0, -1.0)});
  const auto r = audit::audit_operator_inequality({x, y}, ComplexMatrix::identity(2));
  CHECK(r.claim_valid);
  REQUIRE(r.certificate.has_value());
  CHECK_FALSE(r.certificate->is_k_biframe);
}

TEST_CASE("sqrt factorization") {
  for (const char* name : {"parseval", "ex_c4"}) {
    CAPTURE(name);
    const auto inst = gen::gallery(name);
    const auto r = audit::audit_sqrt_factorization(inst.pair, inst.k);
    CHECK(r.claim_valid);
    CHECK(r.intermediate_valid == true);
    CHECK(*r.metric("factorization_residual") <= 1e-8);
  }
  // K reaches e4, where S vanishes: no factor and no certificate.
  const auto singular = gen::gallery("ex_s_singular");
  const auto r = audit::audit_sqrt_factorization(singular.pair, ComplexMatrix::identity(4));
  CHECK(r.claim_valid);
  CHECK(r.intermediate_valid == false);
}

TEST_CASE("range transfer") {
  const auto inst = gen::gallery("ex_c4");
  auto r = audit::audit_range_transfer(inst.pair, inst.k, inst.k);
  CHECK(r.hypotheses_ok);
  CHECK(r.claim_valid);
  CHECK(*r.metric("alpha") == doctest::Approx(1.0).epsilon(1e-6));

  // R(left shift) contains e1, which R(right shift) misses.
  const auto sh = gen::gallery("shift", 5);
  r = audit::audit_range_transfer(sh.pair, sh.k, *sh.t);
  CHECK_FALSE(r.hypotheses_ok);
  CHECK(r.claim_valid);
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("positive perturbation counterexample") {
  const auto inst = gen::gallery("perturbation_counterexample");
  const auto r = audit::run_audit(audit::Statement::PositivePerturbation, inst);
  CHECK(r.hypotheses_ok);
  CHECK_FALSE(r.claim_valid);
  CHECK(r.intermediate_valid == false);
  CHECK(*r.metric("step_margin") < 0.0);
  CHECK(*r.metric("operator_identity_residual") <= 1e-12);
  REQUIRE(r.certificate.has_value());
  CHECK_FALSE(r.certificate->is_k_biframe);
  REQUIRE(r.witness.has_value());
  REQUIRE(r.witness->vector.size() == 2);

  const auto& t = *inst.t;
  const frame::BiframePair perturbed(
      inst.pair.x() + frame::apply_operator_to_sequence(t, inst.pair.x()),
      inst.pair.y() + frame::apply_operator_to_sequence(t, inst.pair.y()));
  const double recomputed = lower_violation(perturbed, inst.k, 1.0, r.witness->vector);
  CHECK(recomputed == doctest::Approx(r.witness->margin));
  CHECK(recomputed > 10 * kTol.herm_tol);
}

TEST_CASE("positive perturbation with T = 0 and T = cI") {
  const auto inst = gen::gallery("ex_c4");
  auto r = audit::audit_positive_perturbation(inst.pair, inst.k, ComplexMatrix(4, 4), 1);
  CHECK(r.claim_valid);
  CHECK(*r.metric("step_margin") == doctest::Approx(0.0));

  r = audit::audit_positive_perturbation(inst.pair, inst.k, 0.5 * ComplexMatrix::identity(4), 2);
  CHECK(r.hypotheses_ok);
  CHECK(r.claim_valid);
  CHECK(r.intermediate_valid == true);

  // A non-Hermitian T fails the hypotheses.
  r = audit::audit_positive_perturbation(inst.pair, inst.k, gen::right_shift(4), 1);
  CHECK_FALSE(r.hypotheses_ok);
  CHECK(r.claim_valid);
}

TEST_CASE("invertibility on the range of K") {
  const auto inst = gen::gallery("ex_s_singular");
  const auto r = audit::audit_invertibility_on_range(inst.pair, inst.k);
  CHECK(r.hypotheses_ok);
  CHECK(r.claim_valid);
  CHECK(*r.metric("sigma_min_restricted") == doctest::Approx(1.0));
  CHECK(*r.metric("kappa") <= *r.metric("sigma_min_restricted") + 1e-9);
  CHECK(r.trials == 100);
  CHECK(r.violations == 0);
}

TEST_CASE("implication statements: vacuity and search") {
  const auto c4 = gen::gallery("ex_c4");
  // K has rank 3, so surjectivity fails and nothing is asserted.
  auto r = audit::audit_surjectivity_necessity(c4.pair, c4.k, ComplexMatrix::identity(4));
  CHECK_FALSE(r.hypotheses_ok);
  CHECK(r.claim_valid);

  const auto p = standard_pair(3);
  const auto id = ComplexMatrix::identity(3);
  r = audit::audit_surjectivity_necessity(p, id, gen::random_operator(3, 2, 71));
  CHECK(r.hypotheses_ok);
  CHECK(r.claim_valid);
  CHECK(r.intermediate_valid == false);
  r = audit::audit_two_sided_invertibility(p, id, gen::random_unitary(3, 72));
  CHECK(r.claim_valid);
  CHECK(r.intermediate_valid == true);

  const auto parseval = gen::gallery("parseval", 4);
  for (auto s : {audit::Statement::SurjectivityNecessity, audit::Statement::TwoSidedInvertibility}) {
    const auto search = audit::falsification_search(s, parseval, 30);
    CHECK(search.trials == 30);
    CHECK(search.claim_valid);
    CHECK(search.violations == 0);
  }
  CHECK_THROWS_AS(audit::falsification_search(audit::Statement::Swap, parseval, 3), BadParameters);
}

TEST_CASE("commuting and coisometry transfer with T = I") {
  const auto inst = gen::gallery("ex_c4");
  const auto id = ComplexMatrix::identity(4);
  auto r = audit::audit_commuting_transfer(inst.pair, inst.k, id);
  CHECK(r.hypotheses_ok);
  CHECK(r.claim_valid);
  CHECK(*r.metric("lower_margin") >= -1e-8);
  r = audit::audit_coisometry_transfer(inst.pair, inst.k, id);
  CHECK(r.hypotheses_ok);
  CHECK(r.claim_valid);

  // The right shift does not commute with K.
  r = audit::audit_commuting_transfer(inst.pair, inst.k, gen::right_shift(4));
  CHECK_FALSE(r.hypotheses_ok);
}

TEST_CASE("run_audit requires the operators a statement needs") {
  const auto inst = gen::gallery("ex_c4");
  CHECK_THROWS_AS(audit::run_audit(audit::Statement::RangeTransfer, inst), BadParameters);
  CHECK_THROWS_AS(audit::run_audit(audit::Statement::Sum, inst), BadParameters);
  CHECK_NOTHROW(audit::run_audit(audit::Statement::Swap, inst));
}

TEST_CASE("property: audits are deterministic for a fixed seed") {
  gen::Rng rng(73);
  auto inst = gen::random_biframe(4, 6, gen::Family::Controlled, rng);
  const auto pair = gen::random_commuting_pair(4, rng);
  inst.k = pair.k;
  inst.t = pair.t;
  audit::AuditOptions opt;
  opt.seed = 5;
  for (auto s : {audit::Statement::CommutingTransfer, audit::Statement::OperatorInequality,
                 audit::Statement::InvertibilityOnRange}) {
    const auto a = audit::run_audit(s, inst, opt);
    const auto b = audit::run_audit(s, inst, opt);
    CHECK(a.claim_valid == b.claim_valid);
    CHECK(a.metrics == b.metrics);
    CHECK(a.violations == b.violations);
  }
}
