#include "kbiframe/audit.hpp"

#include "kbiframe/errors.hpp"
#include "kbiframe/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace kbf::audit {

namespace {

using certify::KBiframeCertificate;
using certify::LowerBound;
using frame::BiframePair;

constexpr std::array<std::pair<Statement, std::string_view>, 14> kStatementNames{{
    {Statement::Swap, "swap"},
    {Statement::Sum, "sum"},
    {Statement::LinearCombination, "linear_combination"},
    {Statement::Product, "product"},
    {Statement::NormPromotion, "norm_promotion"},
    {Statement::OperatorInequality, "operator_inequality"},
    {Statement::SqrtFactorization, "sqrt_factorization"},
    {Statement::RangeTransfer, "range_transfer"},
    {Statement::PositivePerturbation, "positive_perturbation"},
    {Statement::InvertibilityOnRange, "invertibility_on_range"},
    {Statement::SurjectivityNecessity, "surjectivity_necessity"},
    {Statement::CommutingTransfer, "commuting_transfer"},
    {Statement::TwoSidedInvertibility, "two_sided_invertibility"},
    {Statement::CoisometryTransfer, "coisometry_transfer"},
}};

AuditReport start(Statement s) {
  AuditReport r;
  r.statement = s;
  return r;
}

void add_hypothesis(AuditReport& r, std::string name, bool ok, double residual) {
  r.hypotheses.push_back({std::move(name), ok, residual});
  r.hypotheses_ok = r.hypotheses_ok && ok;
}

// Hypothesis "p is a K-biframe", residual = the certified a_opt (or psd margin).
KBiframeCertificate require_k_biframe(AuditReport& r, const std::string& name,
                                      const BiframePair& p, const ComplexMatrix& k,
                                      const certify::Tolerances& tol) {
  auto cert = certify::certify_k_biframe(p, k, tol);
  add_hypothesis(r, name, cert.is_k_biframe,
                 cert.a_opt.unbounded ? cert.psd_margin : cert.a_opt.value);
  return cert;
}

void mark_vacuous(AuditReport& r) {
  r.claim_valid = true;
  r.notes.emplace_back("hypotheses not satisfied; the statement asserts nothing here");
}

double op_norm(const ComplexMatrix& m) { return linalg::spectral_norm(m); }

ComplexMatrix matrix_power(const ComplexMatrix& t, unsigned power) {
  ComplexMatrix out = ComplexMatrix::identity(t.rows());
  for (unsigned i = 0; i < power; ++i) {
    out = out * t;
  }
  return out;
}

bool bound_within(const LowerBound& a, const LowerBound& b, double slack) {
  if (a.unbounded || b.unbounded) {
    return a.unbounded == b.unbounded;
  }
  return std::abs(a.value - b.value) <= slack;
}

// Unit vectors Q·z/‖Q·z‖ for Gaussian z; Q has orthonormal columns.
std::vector<ComplexVector> sample_unit_vectors(const ComplexMatrix& q, std::size_t count,
                                               gen::Rng& rng) {
  std::vector<ComplexVector> out;
  if (q.cols() == 0) {
    return out;
  }
  out.reserve(count);
  while (out.size() < count) {
    auto x = q * std::span<const Complex>(rng.normal_vector(q.cols()));
    const double nx = norm2(x);
    if (nx > 1e-12) {
      out.push_back(scaled(x, 1.0 / nx));
    }
  }
  return out;
}

double norm_sq(std::span<const Complex> v) {
  const double n = norm2(v);
  return n * n;
}

// ‖M*·w‖² for the lower-bound side of the definition.
double lower_side(const ComplexMatrix& m_adj, std::span<const Complex> w) {
  return norm_sq(m_adj * w);
}

void record_bounds(AuditReport& r, const BoundCheck& c, const ClaimedBounds& cb) {
  r.metrics.emplace_back("lower_margin", c.lower_margin);
  if (cb.upper) {
    r.metrics.emplace_back("upper_margin", c.upper_margin);
  }
}

} // namespace

std::string_view to_string(Statement s) {
  for (const auto& [st, name] : kStatementNames) {
    if (st == s) {
      return name;
    }
  }
  return "unknown";
}

Statement statement_from_string(std::string_view id) {
  for (const auto& [st, name] : kStatementNames) {
    if (name == id) {
      return st;
    }
  }
  throw UnknownName("unknown statement id '" + std::string(id) + "'");
}

const std::vector<Statement>& all_statements() {
  static const std::vector<Statement> all = [] {
    std::vector<Statement> v;
    for (const auto& entry : kStatementNames) {
      v.push_back(entry.first);
    }
    return v;
  }();
  return all;
}

std::optional<double> AuditReport::metric(std::string_view name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) {
      return value;
    }
  }
  return std::nullopt;
}

double claim_tolerance(const ComplexMatrix& h, const certify::Tolerances& tol) {
  return 10.0 * tol.herm_tol * std::max(1.0, op_norm(h));
}

BoundCheck check_claimed_bounds(const BiframePair& p, const ComplexMatrix& m,
                                const ClaimedBounds& claimed, const certify::Tolerances& tol) {
  const ComplexMatrix h = frame::hermitian_part(frame::biframe_operator(p));
  const ComplexMatrix m_adj = adjoint(m);
  const double tau = claim_tolerance(h, tol);
  BoundCheck out;

  ComplexMatrix shifted = h;
  if (!claimed.lower.unbounded) {
    shifted -= claimed.lower.value * (m * m_adj);
  }
  const auto lower = linalg::hermitian_eigen(shifted, tol.ktol);
  if (!lower.eigenvalues.empty()) {
    out.lower_margin = lower.eigenvalues.front();
    out.lower_ok = out.lower_margin >= -tau;
    if (!out.lower_ok) {
      // Rescale so that ‖M*w‖ = 1 when that enlarges w; the violation can only grow.
      auto w = lower.eigenvectors.column(0);
      const double mw = std::sqrt(lower_side(m_adj, w));
      if (mw > 0.0 && mw < 1.0) {
        w = scaled(w, 1.0 / mw);
      }
      const double a = claimed.lower.unbounded ? 0.0 : claimed.lower.value;
      out.witness = Witness{w, "A·‖M*x‖² ≤ Re Φ(x) fails",
                            a * lower_side(m_adj, w) - frame::pair_form(p, w).real()};
    }
  }

  if (claimed.upper) {
    const auto e = linalg::hermitian_eigen(h, tol.ktol);
    if (!e.eigenvalues.empty()) {
      out.upper_margin = *claimed.upper - e.eigenvalues.back();
      out.upper_ok = out.upper_margin >= -tau;
      if (!out.upper_ok && !out.witness) {
        auto w = e.eigenvectors.column(e.eigenvalues.size() - 1);
        out.witness = Witness{w, "Re Φ(x) ≤ B·‖x‖² fails",
                              frame::pair_form(p, w).real() - *claimed.upper * norm_sq(w)};
      }
    }
  }
  return out;
}

AuditReport audit_swap(const BiframePair& p, const ComplexMatrix& k, const AuditOptions& opt) {
  auto r = start(Statement::Swap);
  const auto forward = certify::certify_k_biframe(p, k, opt.tol);
  const auto reverse = certify::certify_k_biframe(p.swapped(), k, opt.tol);

  const ComplexMatrix s = frame::biframe_operator(p);
  const double identity_residual =
      op_norm(frame::biframe_operator(p.swapped()) - adjoint(s));
  r.metrics.emplace_back("swap_identity_residual", identity_residual);
  r.intermediate_valid = identity_residual <= opt.tol.ktol * std::max(1.0, op_norm(s));

  const double slack = 2.0 * opt.tol.bis_tol;
  const bool agree = forward.is_k_biframe == reverse.is_k_biframe &&
                     bound_within(forward.a_opt, reverse.a_opt, slack) &&
                     std::abs(forward.b_opt - reverse.b_opt) <= slack;
  r.claimed = ClaimedBounds{forward.a_opt, forward.b_opt};
  r.claim_valid = agree;
  r.metrics.emplace_back("b_opt_difference", std::abs(forward.b_opt - reverse.b_opt));
  if (!forward.a_opt.unbounded && !reverse.a_opt.unbounded) {
    r.metrics.emplace_back("a_opt_difference", std::abs(forward.a_opt.value - reverse.a_opt.value));
  }
  if (!agree) {
    r.witness = Witness{{}, "certificates of (X,Y) and (Y,X) disagree",
                        std::abs(forward.b_opt - reverse.b_opt)};
  }
  r.certificate = reverse;
  return r;
}

AuditReport audit_sum(const frame::FrameSequence& x, const frame::FrameSequence& y,
                      const frame::FrameSequence& z, const ComplexMatrix& k,
                      const AuditOptions& opt) {
  auto r = start(Statement::Sum);
  const BiframePair xy(x, y);
  const BiframePair zy(z, y);
  const BiframePair xz(x, z);
  const BiframePair zz(z, z);
  const auto c_xy = require_k_biframe(r, "(X,Y) is a K-biframe", xy, k, opt.tol);
  const auto c_zy = require_k_biframe(r, "(Z,Y) is a K-biframe", zy, k, opt.tol);
  const auto c_xz = require_k_biframe(r, "(X,Z) is a K-biframe", xz, k, opt.tol);
  const auto c_z = require_k_biframe(r, "Z is a K-frame", zz, k, opt.tol);

  const BiframePair summed(z + x, y + z);
  const ComplexMatrix s_sum = frame::biframe_operator(summed);
  const ComplexMatrix expansion = frame::biframe_operator(zy) + frame::biframe_operator(zz) +
                                  frame::biframe_operator(xy) + frame::biframe_operator(xz);
  const double expansion_residual = op_norm(s_sum - expansion);
  r.metrics.emplace_back("expansion_residual", expansion_residual);
  r.intermediate_valid = expansion_residual <= opt.tol.ktol * std::max(1.0, op_norm(s_sum));

  ClaimedBounds cb;
  const std::array<const KBiframeCertificate*, 4> parts{&c_xy, &c_zy, &c_xz, &c_z};
  double a_sum = 0.0;
  double b_sum = 0.0;
  bool any_unbounded = false;
  for (const auto* c : parts) {
    any_unbounded = any_unbounded || c->a_opt.unbounded;
    a_sum += c->a_opt.value;
    b_sum += c->b_opt;
  }
  cb.lower = any_unbounded ? LowerBound::infinite() : LowerBound::finite(a_sum);
  cb.upper = b_sum;
  r.claimed = cb;
  r.certificate = certify::certify_k_biframe(summed, k, opt.tol);

  const auto check = check_claimed_bounds(summed, k, cb, opt.tol);
  record_bounds(r, check, cb);
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  r.claim_valid = check.lower_ok && check.upper_ok;
  if (!r.claim_valid) {
    r.witness = check.witness;
  }
  return r;
}

AuditReport audit_linear_combination(const BiframePair& p, const std::vector<CombinationTerm>& terms,
                                     const AuditOptions& opt) {
  if (terms.empty()) {
    throw BadParameters("linear_combination needs at least one (alpha, K) term");
  }
  auto r = start(Statement::LinearCombination);
  const std::size_t n = p.dim();
  ComplexMatrix m(n, n);
  double inverse_sum = 0.0;
  double b_min = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto& term = terms[j];
    const auto c = require_k_biframe(r, "pair is a K_" + std::to_string(j + 1) + "-biframe", p,
                                     term.k, opt.tol);
    if (!c.a_opt.unbounded && c.a_opt.value > 0.0) {
      inverse_sum += std::norm(term.alpha) / c.a_opt.value;
    }
    b_min = j == 0 ? c.b_opt : std::min(b_min, c.b_opt);
    m += term.alpha * term.k;
  }
  ClaimedBounds cb;
  cb.lower = inverse_sum > 0.0 ? LowerBound::finite(1.0 / inverse_sum) : LowerBound::infinite();
  cb.upper = b_min;
  r.claimed = cb;
  r.certificate = certify::certify_k_biframe(p, m, opt.tol);

  const auto check = check_claimed_bounds(p, m, cb, opt.tol);
  record_bounds(r, check, cb);
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  r.claim_valid = check.lower_ok && check.upper_ok;
  if (!r.claim_valid) {
    r.witness = check.witness;
  }
  return r;
}

AuditReport audit_product(const BiframePair& p, const std::vector<ComplexMatrix>& factors,
                          const AuditOptions& opt) {
  if (factors.empty()) {
    throw BadParameters("product needs at least one factor");
  }
  auto r = start(Statement::Product);
  const auto c1 = require_k_biframe(r, "pair is a K_1-biframe", p, factors.front(), opt.tol);
  ComplexMatrix tail = ComplexMatrix::identity(p.dim());
  for (std::size_t j = 1; j < factors.size(); ++j) {
    tail = tail * factors[j];
  }
  const ComplexMatrix m = factors.front() * tail;
  // ‖K_n*···K_2*‖ = ‖K_2···K_n‖.
  const double tail_norm = op_norm(tail);
  r.metrics.emplace_back("tail_norm", tail_norm);

  ClaimedBounds cb;
  if (tail_norm == 0.0 || c1.a_opt.unbounded) {
    cb.lower = LowerBound::infinite();
    r.notes.emplace_back("the product operator vanishes; every lower constant is admissible");
  } else {
    cb.lower = LowerBound::finite(c1.a_opt.value / (tail_norm * tail_norm));
  }
  cb.upper = c1.b_opt;
  r.claimed = cb;
  r.certificate = certify::certify_k_biframe(p, m, opt.tol);

  const auto check = check_claimed_bounds(p, m, cb, opt.tol);
  record_bounds(r, check, cb);
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  r.claim_valid = check.lower_ok && check.upper_ok;
  if (!r.claim_valid) {
    r.witness = check.witness;
  }
  return r;
}

AuditReport audit_norm_promotion(const BiframePair& p, const ComplexMatrix& k,
                                 const AuditOptions& opt) {
  auto r = start(Statement::NormPromotion);
  const double k_norm = op_norm(k);
  add_hypothesis(r, "‖K‖ ≥ 1", k_norm >= 1.0, k_norm);
  const auto plain = require_k_biframe(r, "pair is a biframe", p,
                                       ComplexMatrix::identity(p.dim()), opt.tol);
  ClaimedBounds cb;
  cb.lower = k_norm > 0.0 ? LowerBound::finite(plain.a_opt.value / (k_norm * k_norm))
                          : LowerBound::infinite();
  cb.upper = plain.b_opt;
  r.claimed = cb;
  r.certificate = certify::certify_k_biframe(p, k, opt.tol);

  const auto check = check_claimed_bounds(p, k, cb, opt.tol);
  record_bounds(r, check, cb);
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  r.claim_valid = check.lower_ok && check.upper_ok;
  if (!r.claim_valid) {
    r.witness = check.witness;
  }
  return r;
}

AuditReport audit_operator_inequality(const BiframePair& p, const ComplexMatrix& k,
                                      const AuditOptions& opt) {
  auto r = start(Statement::OperatorInequality);
  const auto cert = certify::certify_k_biframe(p, k, opt.tol);
  r.certificate = cert;
  r.claimed = ClaimedBounds{cert.a_opt, cert.b_opt};

  const ComplexMatrix s = frame::biframe_operator(p);
  const ComplexMatrix h = frame::hermitian_part(s);
  const ComplexMatrix g = k * adjoint(k);
  const ComplexMatrix k_adj = adjoint(k);

  // Operator side: S ⪰ A·KK* for some A > 0, re-tested just below a_opt.
  bool operator_side = cert.is_k_biframe;
  if (cert.is_k_biframe && !cert.a_opt.unbounded) {
    const double a_below = std::max(0.0, cert.a_opt.value - 2.0 * opt.tol.bis_tol);
    ComplexMatrix shifted = h;
    shifted -= a_below * g;
    const bool below_ok =
        certify::passes_psd(shifted, linalg::spectral_norm(h), opt.tol.ktol);
    r.metrics.emplace_back("psd_margin_below_a_opt", linalg::min_eig_hermitian(shifted));
    if (!below_ok) {
      operator_side = false;
      r.notes.emplace_back("H − (a_opt − 2·bis_tol)·KK* failed the PSD test");
    }
  }

  // Definition side: the two-sided inequality on sampled unit vectors, plus
  // any direction the certifier flagged.
  gen::Rng rng(opt.seed);
  const auto samples =
      sample_unit_vectors(ComplexMatrix::identity(p.dim()), 2 * opt.samples, rng);
  r.trials = samples.size();
  double worst_lower = 0.0;
  double worst_upper = 0.0;
  double worst_imag = 0.0;
  std::optional<Witness> evidence;
  const double a = cert.a_opt.unbounded ? 0.0 : cert.a_opt.value;
  const double slack = opt.sample_slack * std::max(1.0, op_norm(h));
  for (const auto& v : samples) {
    const Complex phi = frame::pair_form(p, v);
    const double lower_gap = a * lower_side(k_adj, v) - phi.real();
    const double upper_gap = phi.real() - cert.b_opt;
    worst_lower = std::max(worst_lower, lower_gap);
    worst_upper = std::max(worst_upper, upper_gap);
    worst_imag = std::max(worst_imag, std::abs(phi.imag()));
    if (lower_gap > slack || upper_gap > slack) {
      ++r.violations;
      if (!evidence) {
        evidence = Witness{v, "sampled two-sided inequality fails at a_opt, b_opt",
                           std::max(lower_gap, upper_gap)};
      }
    }
  }
  bool definition_side = r.violations == 0;

  const double s_norm = std::max(1.0, op_norm(s));
  ComplexMatrix skew = s - adjoint(s);
  skew *= Complex{0.0, -0.5}; // (S − S*)/(2i), Hermitian; ⟨skew·v, v⟩ = Im Φ(v)
  const auto se = linalg::hermitian_eigen(skew, opt.tol.ktol);
  if (!se.eigenvalues.empty()) {
    const std::size_t idx = std::abs(se.eigenvalues.front()) > std::abs(se.eigenvalues.back())
                                ? 0
                                : se.eigenvalues.size() - 1;
    const auto v = se.eigenvectors.column(idx);
    const double imag = std::abs(frame::pair_form(p, v).imag());
    worst_imag = std::max(worst_imag, imag);
    if (imag > 0.5 * opt.tol.herm_tol * s_norm) {
      definition_side = false;
      if (!evidence) {
        evidence = Witness{v, "Φ(x) is not real", imag};
      }
    }
  }
  if (cert.witness_lower) {
    const auto& w = *cert.witness_lower;
    const double gap = opt.tol.bis_tol * lower_side(k_adj, w) - frame::pair_form(p, w).real();
    if (gap > 0.0) {
      definition_side = false;
      if (!evidence) {
        evidence = Witness{w, "Re Φ(x) < bis_tol·‖K*x‖²", gap};
      }
    }
  }
  r.metrics.emplace_back("worst_sampled_lower_gap", worst_lower);
  r.metrics.emplace_back("worst_sampled_upper_gap", worst_upper);
  r.metrics.emplace_back("worst_imaginary_part", worst_imag);

  // Both sides are outcomes here rather than preconditions; hypotheses_ok stays true.
  r.hypotheses.push_back({"operator side: S ⪰ A·KK* for some A > 0", operator_side,
                          cert.psd_margin});
  r.hypotheses.push_back({"definition side: A‖K*x‖² ≤ Φ(x) ≤ B‖x‖²", definition_side, worst_lower});
  r.claim_valid = operator_side == definition_side;
  if (!r.claim_valid) {
    r.witness = evidence ? *evidence
                         : Witness{{}, "operator and definition sides disagree", cert.psd_margin};
  } else if (!operator_side) {
    r.notes.emplace_back("both sides agree the pair is not a K-biframe");
  }
  return r;
}

AuditReport audit_sqrt_factorization(const BiframePair& p, const ComplexMatrix& k,
                                     const AuditOptions& opt) {
  auto r = start(Statement::SqrtFactorization);
  const auto cert = certify::certify_k_biframe(p, k, opt.tol);
  r.certificate = cert;
  add_hypothesis(r, "S is Hermitian", cert.hermitian_residual <= opt.tol.herm_tol,
                 cert.hermitian_residual);
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  const ComplexMatrix h = frame::hermitian_part(frame::biframe_operator(p));
  const double k_norm = op_norm(k);
  const double factor_tol =
      std::max(linalg::default_rtol(k.rows(), k.cols()), opt.tol.herm_tol) * std::max(1.0, k_norm);

  bool factor_exists = false;
  if (linalg::is_psd(h, opt.tol.ktol)) {
    const ComplexMatrix root = linalg::psd_sqrt(h, opt.tol.ktol);
    const ComplexMatrix u = linalg::pseudo_inverse(root) * k;
    const double residual = op_norm(root * u - k);
    r.metrics.emplace_back("factorization_residual", residual);
    r.metrics.emplace_back("factor_norm", op_norm(u));
    factor_exists = residual <= factor_tol;
  } else {
    r.notes.emplace_back("S has a negative eigenvalue; S^(1/2) does not exist");
  }
  r.intermediate_valid = factor_exists;
  r.claim_valid = factor_exists == cert.is_k_biframe;
  if (!r.claim_valid) {
    r.witness = Witness{{}, factor_exists ? "K = S^(1/2)·U holds but the certificate fails"
                                          : "certificate holds but K = S^(1/2)·U fails",
                        r.metric("factorization_residual").value_or(0.0)};
  }
  return r;
}

AuditReport audit_range_transfer(const BiframePair& p, const ComplexMatrix& k,
                                 const ComplexMatrix& t, const AuditOptions& opt) {
  auto r = start(Statement::RangeTransfer);
  const auto cert = require_k_biframe(r, "pair is a K-biframe", p, k, opt.tol);
  const auto douglas = ops::douglas_check(t, k);
  r.douglas = douglas;
  add_hypothesis(r, "R(T) ⊆ R(K)", douglas.range_included && douglas.lambda_min.has_value(),
                 douglas.projector_residual);

  ClaimedBounds cb;
  cb.upper = cert.b_opt;
  const double alpha = douglas.lambda_min.value_or(0.0);
  r.metrics.emplace_back("alpha", alpha);
  if (alpha > 0.0 && !cert.a_opt.unbounded) {
    cb.lower = LowerBound::finite(cert.a_opt.value / (alpha * alpha));
  } else {
    cb.lower = LowerBound::infinite();
  }
  r.claimed = cb;
  r.certificate = certify::certify_k_biframe(p, t, opt.tol);
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  const auto check = check_claimed_bounds(p, t, cb, opt.tol);
  record_bounds(r, check, cb);
  r.claim_valid = check.lower_ok && check.upper_ok;
  if (!r.claim_valid) {
    r.witness = check.witness;
  }
  return r;
}

AuditReport audit_positive_perturbation(const BiframePair& p, const ComplexMatrix& k,
                                        const ComplexMatrix& t, unsigned power,
                                        const AuditOptions& opt) {
  auto r = start(Statement::PositivePerturbation);
  if (!t.is_square() || t.rows() != p.dim()) {
    throw DimensionMismatch("T must be square of the pair's dimension");
  }
  const double t_defect = linalg::hermitian_defect(t);
  add_hypothesis(r, "T is Hermitian", t_defect <= opt.tol.herm_tol, t_defect);
  if (t_defect <= opt.tol.herm_tol) {
    const double t_min = linalg::min_eig_hermitian(frame::hermitian_part(t), opt.tol.ktol);
    add_hypothesis(r, "T is positive", t_min >= -opt.tol.ktol * std::max(1.0, op_norm(t)), t_min);
  }
  const auto base = require_k_biframe(r, "pair is a K-biframe", p, k, opt.tol);

  const ComplexMatrix tn = matrix_power(t, power);
  const BiframePair perturbed(p.x() + frame::apply_operator_to_sequence(tn, p.x()),
                              p.y() + frame::apply_operator_to_sequence(tn, p.y()));
  const ComplexMatrix s = frame::biframe_operator(p);
  const ComplexMatrix s_new = frame::biframe_operator(perturbed);
  const ComplexMatrix i_plus = ComplexMatrix::identity(p.dim()) + tn;
  const double identity_residual = op_norm(s_new - i_plus * s * adjoint(i_plus));
  r.metrics.emplace_back("operator_identity_residual", identity_residual);
  if (identity_residual > opt.tol.ktol * std::max(1.0, op_norm(s_new))) {
    r.notes.emplace_back("S_new differs from (I+T^n)·S·(I+T^n)*");
  }

  // Proof step: S_new ⪰ S.
  const ComplexMatrix h = frame::hermitian_part(s);
  const ComplexMatrix h_new = frame::hermitian_part(s_new);
  const double step_margin = linalg::min_eig_hermitian(h_new - h, opt.tol.ktol);
  r.metrics.emplace_back("step_margin", step_margin);
  r.intermediate_valid =
      step_margin >= -opt.tol.ktol * std::max({1.0, op_norm(h_new), op_norm(h)});

  const auto cert_new = certify::certify_k_biframe(perturbed, k, opt.tol);
  r.certificate = cert_new;
  ClaimedBounds cb;
  cb.lower = base.a_opt;
  r.claimed = cb;
  const auto check = check_claimed_bounds(perturbed, k, cb, opt.tol);
  record_bounds(r, check, cb);
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  r.claim_valid = cert_new.is_k_biframe && check.lower_ok;
  if (!r.claim_valid) {
    if (!cert_new.is_k_biframe && cert_new.witness_lower) {
      // No A > 0 works in this direction; normalize so ‖K*w‖ = 1 where possible.
      auto w = *cert_new.witness_lower;
      const ComplexMatrix k_adj = adjoint(k);
      const double kw = std::sqrt(lower_side(k_adj, w));
      if (kw > 0.0 && kw < 1.0) {
        w = scaled(w, 1.0 / kw);
      }
      const double a = base.a_opt.unbounded ? 0.0 : base.a_opt.value;
      r.witness = Witness{w, "perturbed pair: m·‖K*x‖² ≤ Re Φ(x) fails (no A > 0 works)",
                          a * lower_side(k_adj, w) - frame::pair_form(perturbed, w).real()};
    } else {
      r.witness = check.witness;
    }
  }
  return r;
}

AuditReport audit_invertibility_on_range(const BiframePair& p, const ComplexMatrix& k,
                                         const AuditOptions& opt) {
  auto r = start(Statement::InvertibilityOnRange);
  const auto cert = require_k_biframe(r, "pair is a K-biframe", p, k, opt.tol);
  r.certificate = cert;
  r.notes.emplace_back("R(K) is closed in finite dimension");
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  const auto restriction = ops::restrict_to_range(frame::biframe_operator(p), k);
  if (cert.a_opt.unbounded || restriction.basis.cols() == 0) {
    r.notes.emplace_back("R(K) = {0}; nothing to invert");
    return r;
  }
  const double k_plus_norm = op_norm(linalg::pseudo_inverse(k));
  const double kappa = cert.a_opt.value / (k_plus_norm * k_plus_norm);
  r.claimed = ClaimedBounds{LowerBound::finite(kappa), cert.b_opt};
  r.metrics.emplace_back("kappa", kappa);
  r.metrics.emplace_back("sigma_min_restricted", restriction.sigma_min);

  const ComplexMatrix s = frame::biframe_operator(p);
  const auto& q = restriction.basis;
  const double compression_min =
      linalg::min_eig_hermitian(frame::hermitian_part(restriction.compression), opt.tol.ktol);
  r.metrics.emplace_back("compression_min_eig", compression_min);

  const double slack = opt.sample_slack * std::max(1.0, op_norm(s));
  gen::Rng rng(opt.seed);
  const auto samples = sample_unit_vectors(q, opt.samples, rng);
  r.trials = samples.size();
  for (const auto& x : samples) {
    const double form = inner(s * std::span<const Complex>(x), x).real();
    const double image = norm2(s * std::span<const Complex>(x));
    const double gap = std::max(kappa - form, kappa - image);
    if (gap > slack) {
      ++r.violations;
      if (!r.witness) {
        r.witness = Witness{x, "κ‖x‖² ≤ Re⟨Sx,x⟩ or κ‖x‖ ≤ ‖Sx‖ fails on R(K)", gap};
      }
    }
  }
  bool ok = r.violations == 0;
  if (restriction.sigma_min < kappa - slack) {
    ok = false;
    if (!r.witness) {
      r.witness = Witness{{}, "σ_min(S restricted to R(K)) < κ", kappa - restriction.sigma_min};
    }
  }
  if (compression_min < kappa - slack) {
    ok = false;
    if (!r.witness) {
      r.witness = Witness{{}, "λ_min(Q*HQ) < κ", kappa - compression_min};
    }
  }
  r.claim_valid = ok;
  return r;
}

AuditReport audit_surjectivity_necessity(const BiframePair& p, const ComplexMatrix& k,
                                         const ComplexMatrix& t, const AuditOptions& opt) {
  auto r = start(Statement::SurjectivityNecessity);
  const std::size_t n = p.dim();
  const std::size_t k_rank = linalg::numerical_rank(k);
  add_hypothesis(r, "K is surjective", k_rank == n, static_cast<double>(k_rank));
  require_k_biframe(r, "pair is a K-biframe", p, k, opt.tol);
  r.notes.emplace_back("dense range is read as surjective in finite dimension");

  const BiframePair moved(frame::apply_operator_to_sequence(t, p.x()),
                          frame::apply_operator_to_sequence(t, p.y()));
  const auto cert_t = certify::certify_k_biframe(moved, k, opt.tol);
  r.certificate = cert_t;
  const std::size_t t_rank = linalg::numerical_rank(t);
  r.metrics.emplace_back("t_rank", static_cast<double>(t_rank));
  r.intermediate_valid = cert_t.is_k_biframe;
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  r.claim_valid = !cert_t.is_k_biframe || t_rank == n;
  if (!cert_t.is_k_biframe) {
    r.notes.emplace_back("(TX, TY) is not a K-biframe; the implication holds vacuously");
  }
  if (!r.claim_valid) {
    r.witness = Witness{{}, "(TX, TY) is a K-biframe but T is not surjective",
                        static_cast<double>(n - t_rank)};
  }
  return r;
}

AuditReport audit_commuting_transfer(const BiframePair& p, const ComplexMatrix& k,
                                     const ComplexMatrix& t, const AuditOptions& opt) {
  auto r = start(Statement::CommutingTransfer);
  const double t_norm = op_norm(t);
  const double comm = ops::commutation_residual(t, k);
  add_hypothesis(r, "TK = KT", comm <= opt.tol.herm_tol * std::max(1.0, t_norm * op_norm(k)),
                 comm);
  const auto cert = require_k_biframe(r, "pair is a K-biframe", p, k, opt.tol);
  r.notes.emplace_back("R(T) is closed in finite dimension");

  const BiframePair moved(frame::apply_operator_to_sequence(t, p.x()),
                          frame::apply_operator_to_sequence(t, p.y()));
  r.certificate = certify::certify_k_biframe(moved, k, opt.tol);
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  const auto tsvd = linalg::svd(t);
  const double cut = tsvd.singulars.empty() ? 0.0 : linalg::default_rtol(t.rows(), t.cols()) *
                                                         tsvd.singulars.front();
  double sigma_plus = 0.0;
  for (double sv : tsvd.singulars) {
    if (sv > cut) {
      sigma_plus = sv;
    }
  }
  if (sigma_plus == 0.0) {
    r.notes.emplace_back("T = 0; R(T) = {0}");
    return r;
  }
  // ‖(T⁺)*‖ = 1/σ⁺_min(T).
  ClaimedBounds cb;
  cb.lower = cert.a_opt.unbounded ? LowerBound::infinite()
                                  : LowerBound::finite(cert.a_opt.value * sigma_plus * sigma_plus);
  cb.upper = cert.b_opt * t_norm * t_norm;
  r.claimed = cb;

  const ComplexMatrix h_t = frame::hermitian_part(frame::biframe_operator(moved));
  const ComplexMatrix k_adj = adjoint(k);
  const ComplexMatrix q = linalg::range_basis(t);
  const double a = cb.lower.unbounded ? 0.0 : cb.lower.value;
  const double tau = claim_tolerance(h_t, opt.tol);

  // Exact check on R(T) through the compression Q*(·)Q.
  ComplexMatrix lower_op = h_t;
  lower_op -= a * (k * k_adj);
  const double lower_margin =
      linalg::min_eig_hermitian(frame::hermitian_part(adjoint(q) * lower_op * q), opt.tol.ktol);
  const double upper_margin =
      *cb.upper -
      linalg::max_eig_hermitian(frame::hermitian_part(adjoint(q) * h_t * q), opt.tol.ktol);
  r.metrics.emplace_back("lower_margin", lower_margin);
  r.metrics.emplace_back("upper_margin", upper_margin);
  bool ok = lower_margin >= -tau && upper_margin >= -tau;

  const double slack = opt.sample_slack * std::max(1.0, op_norm(h_t));
  gen::Rng rng(opt.seed);
  const auto samples = sample_unit_vectors(q, opt.samples, rng);
  r.trials = samples.size();
  for (const auto& x : samples) {
    const double phi = frame::pair_form(moved, x).real();
    const double lower_gap = a * lower_side(k_adj, x) - phi;
    const double upper_gap = phi - *cb.upper;
    if (lower_gap > slack || upper_gap > slack) {
      ++r.violations;
      if (!r.witness) {
        r.witness = Witness{x, "bound fails for (TX, TY) on R(T)", std::max(lower_gap, upper_gap)};
      }
    }
  }
  ok = ok && r.violations == 0;
  if (!ok && !r.witness) {
    r.witness = Witness{{}, "compressed bound on R(T) fails", -std::min(lower_margin, upper_margin)};
  }
  r.claim_valid = ok;
  return r;
}

AuditReport audit_two_sided_invertibility(const BiframePair& p, const ComplexMatrix& k,
                                          const ComplexMatrix& t, const AuditOptions& opt) {
  auto r = start(Statement::TwoSidedInvertibility);
  const std::size_t n = p.dim();
  const std::size_t k_rank = linalg::numerical_rank(k);
  add_hypothesis(r, "K is surjective", k_rank == n, static_cast<double>(k_rank));
  require_k_biframe(r, "pair is a K-biframe", p, k, opt.tol);
  r.notes.emplace_back("dense range is read as surjective in finite dimension");

  const ComplexMatrix t_adj = adjoint(t);
  const BiframePair by_t(frame::apply_operator_to_sequence(t, p.x()),
                         frame::apply_operator_to_sequence(t, p.y()));
  const BiframePair by_t_adj(frame::apply_operator_to_sequence(t_adj, p.x()),
                             frame::apply_operator_to_sequence(t_adj, p.y()));
  const auto c1 = certify::certify_k_biframe(by_t, k, opt.tol);
  const auto c2 = certify::certify_k_biframe(by_t_adj, k, opt.tol);
  r.certificate = c1;
  const std::size_t t_rank = linalg::numerical_rank(t);
  r.metrics.emplace_back("t_rank", static_cast<double>(t_rank));
  r.metrics.emplace_back("t_pair_certified", c1.is_k_biframe ? 1.0 : 0.0);
  r.metrics.emplace_back("t_adjoint_pair_certified", c2.is_k_biframe ? 1.0 : 0.0);
  r.intermediate_valid = c1.is_k_biframe && c2.is_k_biframe;
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  const bool premise = c1.is_k_biframe && c2.is_k_biframe;
  r.claim_valid = !premise || t_rank == n;
  if (!premise) {
    r.notes.emplace_back("at least one transferred pair is not a K-biframe; vacuous");
  }
  if (!r.claim_valid) {
    r.witness = Witness{{}, "both transferred pairs are K-biframes but T is singular",
                        static_cast<double>(n - t_rank)};
  }
  return r;
}

AuditReport audit_coisometry_transfer(const BiframePair& p, const ComplexMatrix& k,
                                      const ComplexMatrix& t, const AuditOptions& opt) {
  auto r = start(Statement::CoisometryTransfer);
  const double coiso = op_norm(t * adjoint(t) - ComplexMatrix::identity(t.rows()));
  add_hypothesis(r, "TT* = I", ops::is_coisometry(t, opt.tol.herm_tol), coiso);
  const double t_norm = op_norm(t);
  const double comm = ops::commutation_residual(t, k);
  add_hypothesis(r, "TK = KT", comm <= opt.tol.herm_tol * std::max(1.0, t_norm * op_norm(k)),
                 comm);
  const auto cert = require_k_biframe(r, "pair is a K-biframe", p, k, opt.tol);

  const BiframePair moved(frame::apply_operator_to_sequence(t, p.x()),
                          frame::apply_operator_to_sequence(t, p.y()));
  r.certificate = certify::certify_k_biframe(moved, k, opt.tol);
  ClaimedBounds cb{cert.a_opt, cert.b_opt * t_norm * t_norm};
  r.claimed = cb;
  const auto check = check_claimed_bounds(moved, k, cb, opt.tol);
  record_bounds(r, check, cb);
  if (!r.hypotheses_ok) {
    mark_vacuous(r);
    return r;
  }
  r.claim_valid = check.lower_ok && check.upper_ok;
  if (!r.claim_valid) {
    r.witness = check.witness;
  }
  return r;
}

namespace {

const ComplexMatrix& require_t(const gen::Instance& inst, Statement s) {
  if (!inst.t) {
    throw BadParameters("statement " + std::string(to_string(s)) +
                        " needs an operator t in the instance");
  }
  return *inst.t;
}

} // namespace

AuditReport run_audit(Statement s, const gen::Instance& inst, const AuditOptions& opt) {
  const auto& p = inst.pair;
  const auto& k = inst.k;
  switch (s) {
  case Statement::Swap:
    return audit_swap(p, k, opt);
  case Statement::Sum:
    if (!inst.z) {
      throw BadParameters("statement sum needs z_vectors in the instance");
    }
    return audit_sum(p.x(), p.y(), *inst.z, k, opt);
  case Statement::LinearCombination: {
    const std::vector<ComplexMatrix> ks = inst.factors.empty() ? std::vector{k} : inst.factors;
    std::vector<CombinationTerm> terms;
    for (std::size_t j = 0; j < ks.size(); ++j) {
      terms.push_back({j < inst.alphas.size() ? inst.alphas[j] : Complex{1.0, 0.0}, ks[j]});
    }
    return audit_linear_combination(p, terms, opt);
  }
  case Statement::Product:
    return audit_product(p, inst.factors.empty() ? std::vector{k} : inst.factors, opt);
  case Statement::NormPromotion:
    return audit_norm_promotion(p, k, opt);
  case Statement::OperatorInequality:
    return audit_operator_inequality(p, k, opt);
  case Statement::SqrtFactorization:
    return audit_sqrt_factorization(p, k, opt);
  case Statement::RangeTransfer:
    return audit_range_transfer(p, k, require_t(inst, s), opt);
  case Statement::PositivePerturbation:
    return audit_positive_perturbation(p, k, require_t(inst, s), inst.power.value_or(1), opt);
  case Statement::InvertibilityOnRange:
    return audit_invertibility_on_range(p, k, opt);
  case Statement::SurjectivityNecessity:
    return audit_surjectivity_necessity(p, k, require_t(inst, s), opt);
  case Statement::CommutingTransfer:
    return audit_commuting_transfer(p, k, require_t(inst, s), opt);
  case Statement::TwoSidedInvertibility:
    return audit_two_sided_invertibility(p, k, require_t(inst, s), opt);
  case Statement::CoisometryTransfer:
    return audit_coisometry_transfer(p, k, require_t(inst, s), opt);
  }
  throw BadParameters("unhandled statement");
}

AuditReport falsification_search(Statement s, const gen::Instance& inst, std::size_t trials,
                                 const AuditOptions& opt) {
  if (s != Statement::SurjectivityNecessity && s != Statement::TwoSidedInvertibility) {
    throw BadParameters("falsification search applies to implication statements only");
  }
  const std::size_t n = inst.dim();
  gen::Rng rng(opt.seed);
  AuditReport summary = start(s);
  summary.claimed.reset();
  bool first = true;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t rank = rng.index(n + 1);
    const ComplexMatrix t = gen::random_operator(n, rank, rng);
    AuditOptions trial_opt = opt;
    trial_opt.seed = opt.seed + trial + 1;
    const auto rep = s == Statement::SurjectivityNecessity
                         ? audit_surjectivity_necessity(inst.pair, inst.k, t, trial_opt)
                         : audit_two_sided_invertibility(inst.pair, inst.k, t, trial_opt);
    if (first) {
      summary.hypotheses = rep.hypotheses;
      summary.hypotheses_ok = rep.hypotheses_ok;
      first = false;
    }
    ++summary.trials;
    if (!rep.claim_valid) {
      ++summary.violations;
      if (!summary.witness) {
        summary.witness = rep.witness;
        summary.witness->description += " (trial " + std::to_string(trial) + ")";
      }
    }
  }
  summary.claim_valid = summary.violations == 0;
  summary.notes.push_back(summary.violations == 0
                              ? "no violation found in " + std::to_string(summary.trials) +
                                    " trials"
                              : std::to_string(summary.violations) + " violations in " +
                                    std::to_string(summary.trials) + " trials");
  return summary;
}

} // namespace kbf::audit
