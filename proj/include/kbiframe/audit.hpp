#pragma once

#include "kbiframe/certifier.hpp"
#include "kbiframe/frame.hpp"
#include "kbiframe/instance_gen.hpp"
#include "kbiframe/operator_lab.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kbf::audit {

enum class Statement {
  Swap,
  Sum,
  LinearCombination,
  Product,
  NormPromotion,
  OperatorInequality,
  SqrtFactorization,
  RangeTransfer,
  PositivePerturbation,
  InvertibilityOnRange,
  SurjectivityNecessity,
  CommutingTransfer,
  TwoSidedInvertibility,
  CoisometryTransfer,
};

std::string_view to_string(Statement s);
Statement statement_from_string(std::string_view id);
const std::vector<Statement>& all_statements();

struct HypothesisCheck {
  std::string name;
  bool ok = false;
  double residual = 0.0;
};

struct ClaimedBounds {
  certify::LowerBound lower;
  std::optional<double> upper;
};

/// Evidence that a claim fails. `vector` is empty for instance-level witnesses
/// (e.g. two certificates that disagree); `margin` is the amount by which the
/// stated inequality is violated, re-evaluated through the pair form.
struct Witness {
  ComplexVector vector;
  std::string description;
  double margin = 0.0;
};

struct AuditReport {
  Statement statement = Statement::Swap;
  bool hypotheses_ok = true;
  std::vector<HypothesisCheck> hypotheses;
  std::optional<ClaimedBounds> claimed;
  bool claim_valid = true;
  /// Proof-step check, reported apart from the conclusion where a statement has one.
  std::optional<bool> intermediate_valid;
  std::optional<certify::KBiframeCertificate> certificate;
  std::optional<ops::DouglasReport> douglas;
  std::optional<Witness> witness;
  /// Auditor-specific quantities in a fixed order (margins, residuals, κ, ...).
  std::vector<std::pair<std::string, double>> metrics;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::vector<std::string> notes;

  std::optional<double> metric(std::string_view name) const;
};

struct AuditOptions {
  certify::Tolerances tol;
  std::uint64_t seed = 0;
  /// Random unit vectors per sampled inequality check.
  std::size_t samples = 100;
  /// Slack in sampled inequality checks, relative to max(1, ‖S‖) of the pair sampled.
  double sample_slack = 1e-8;
};

/// Margin used when deciding whether a claimed bound holds: a claim fails only
/// when it is violated by more than 10·herm_tol·max(1, ‖H‖).
double claim_tolerance(const ComplexMatrix& h, const certify::Tolerances& tol);

struct BoundCheck {
  bool lower_ok = true;
  bool upper_ok = true;
  double lower_margin = 0.0; // λ_min(H − A·MM*), or λ_min(H) for an unbounded A
  double upper_margin = 0.0; // B − λ_max(H)
  std::optional<Witness> witness;
};

/// Tests claimed (A, B) for pair p against operator m over the whole space.
BoundCheck check_claimed_bounds(const frame::BiframePair& p, const ComplexMatrix& m,
                                const ClaimedBounds& claimed, const certify::Tolerances& tol);

AuditReport audit_swap(const frame::BiframePair& p, const ComplexMatrix& k,
                       const AuditOptions& opt = {});
AuditReport audit_sum(const frame::FrameSequence& x, const frame::FrameSequence& y,
                      const frame::FrameSequence& z, const ComplexMatrix& k,
                      const AuditOptions& opt = {});

struct CombinationTerm {
  Complex alpha;
  ComplexMatrix k;
};

AuditReport audit_linear_combination(const frame::BiframePair& p,
                                     const std::vector<CombinationTerm>& terms,
                                     const AuditOptions& opt = {});
AuditReport audit_product(const frame::BiframePair& p, const std::vector<ComplexMatrix>& factors,
                          const AuditOptions& opt = {});
AuditReport audit_norm_promotion(const frame::BiframePair& p, const ComplexMatrix& k,
                                 const AuditOptions& opt = {});
AuditReport audit_operator_inequality(const frame::BiframePair& p, const ComplexMatrix& k,
                                      const AuditOptions& opt = {});
AuditReport audit_sqrt_factorization(const frame::BiframePair& p, const ComplexMatrix& k,
                                     const AuditOptions& opt = {});
AuditReport audit_range_transfer(const frame::BiframePair& p, const ComplexMatrix& k,
                                 const ComplexMatrix& t, const AuditOptions& opt = {});
AuditReport audit_positive_perturbation(const frame::BiframePair& p, const ComplexMatrix& k,
                                        const ComplexMatrix& t, unsigned power,
                                        const AuditOptions& opt = {});
AuditReport audit_invertibility_on_range(const frame::BiframePair& p, const ComplexMatrix& k,
                                         const AuditOptions& opt = {});
AuditReport audit_surjectivity_necessity(const frame::BiframePair& p, const ComplexMatrix& k,
                                         const ComplexMatrix& t, const AuditOptions& opt = {});
AuditReport audit_commuting_transfer(const frame::BiframePair& p, const ComplexMatrix& k,
                                     const ComplexMatrix& t, const AuditOptions& opt = {});
AuditReport audit_two_sided_invertibility(const frame::BiframePair& p, const ComplexMatrix& k,
                                          const ComplexMatrix& t, const AuditOptions& opt = {});
AuditReport audit_coisometry_transfer(const frame::BiframePair& p, const ComplexMatrix& k,
                                      const ComplexMatrix& t, const AuditOptions& opt = {});

/// Runs one auditor on an instance, pulling t, z, factors, alphas and power
/// from it. Throws BadParameters when a required operator is missing.
AuditReport run_audit(Statement s, const gen::Instance& inst, const AuditOptions& opt = {});

/// Randomized falsification search for the implication-style statements
/// (surjectivity_necessity, two_sided_invertibility): draws `trials` random
/// operators t of every rank and audits each against the instance. Absence of
/// a violation is reported as such, never as proof.
AuditReport falsification_search(Statement s, const gen::Instance& inst, std::size_t trials,
                                 const AuditOptions& opt = {});

} // namespace kbf::audit
