#include "kbiframe/certifier.hpp"

#include "kbiframe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace kbf::certify {

namespace {

constexpr int kMaxBisectionSteps = 400;

double eigen_scale(const linalg::EigenDecomposition& e) {
  if (e.eigenvalues.empty()) {
    return 0.0;
  }
  return std::max(std::abs(e.eigenvalues.front()), std::abs(e.eigenvalues.back()));
}

ComplexMatrix shifted(const ComplexMatrix& h, double a, const ComplexMatrix& g) {
  ComplexMatrix m = h;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      m(i, j) -= a * g(i, j);
    }
  }
  return m;
}

double quadratic_form(const ComplexMatrix& m, std::span<const Complex> w) {
  return inner(m * w, w).real();
}

} // namespace

Tolerances tolerances_from_environment() {
  Tolerances tol;
  if (const char* raw = std::getenv("KBIFRAME_TOL"); raw != nullptr && *raw != '\0') {
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
      throw BadParameters(std::string("KBIFRAME_TOL is not a positive decimal: ") + raw);
    }
    tol.herm_tol = v;
    tol.bis_tol = v / 10.0;
  }
  return tol;
}

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::KBiframe:
    return "k_biframe";
  case Verdict::NonHermitian:
    return "non_hermitian";
  case Verdict::NotPsd:
    return "not_psd";
  case Verdict::NoLowerBound:
    return "no_lower_bound";
  }
  return "unknown";
}

bool passes_psd(const ComplexMatrix& m, double scale, double ktol) {
  const auto e = linalg::hermitian_eigen(m, ktol);
  return e.eigenvalues.empty() || e.eigenvalues.front() >= -ktol * scale;
}

double optimal_upper_bound(const ComplexMatrix& h, double ktol) {
  return linalg::max_eig_hermitian(h, ktol);
}

LowerBound optimal_lower_bound(const BoundProblem& bp, double bis_tol, double ktol) {
  const auto& h = bp.h;
  const auto& g = bp.g;
  if (!h.is_square() || !g.is_square() || h.rows() != g.rows()) {
    throw DimensionMismatch("bound problem needs square h and g of equal size");
  }
  if (!(bis_tol > 0.0)) {
    throw BadParameters("bisection tolerance must be positive");
  }
  const auto he = linalg::hermitian_eigen(h, ktol);
  const auto ge = linalg::hermitian_eigen(g, ktol);
  const double hnorm = eigen_scale(he);
  if (!he.eigenvalues.empty() && he.eigenvalues.front() < -ktol * hnorm) {
    return LowerBound::finite(0.0);
  }
  if (max_abs_entry(g) == 0.0) {
    return LowerBound::infinite();
  }

  const double gmax = ge.eigenvalues.back();

  // Some A > 0 works iff R(g) ⊆ R(h). The tolerant PSD test alone would accept
  // A ≈ ktol·‖h‖/(w*gw) along a null direction w of h, so test the null space.
  double null_weight = 0.0;
  for (std::size_t i = 0; i < he.eigenvalues.size(); ++i) {
    if (he.eigenvalues[i] > ktol * hnorm) {
      break;
    }
    null_weight += quadratic_form(g, he.eigenvectors.column(i));
  }
  if (null_weight > ktol * gmax) {
    return LowerBound::finite(0.0);
  }
  const double cutoff = linalg::default_rtol(g.rows(), g.cols()) * gmax;
  double smallest_positive = gmax;
  for (double l : ge.eigenvalues) {
    if (l > cutoff) {
      smallest_positive = l;
      break;
    }
  }

  auto passes = [&](double a) { return passes_psd(shifted(h, a, g), hnorm, ktol); };

  double lo = 0.0;
  double hi = std::max(he.eigenvalues.back(), 0.0) / smallest_positive + 1.0;
  while (passes(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      return LowerBound::infinite();
    }
  }
  for (int step = 0; step < kMaxBisectionSteps && hi - lo > bis_tol; ++step) {
    const double mid = lo + 0.5 * (hi - lo);
    (passes(mid) ? lo : hi) = mid;
  }

  // The most negative direction at the failing end carries the generalized
  // Rayleigh quotient of the active constraint.
  const auto edge = linalg::hermitian_eigen(shifted(h, hi, g), ktol);
  const auto w = edge.eigenvectors.column(0);
  const double gw = quadratic_form(g, w);
  if (gw > 0.0) {
    const double candidate = quadratic_form(h, w) / gw;
    if (candidate > lo && candidate < hi && passes(candidate)) {
      lo = candidate;
    }
  }
  return LowerBound::finite(lo);
}

KBiframeCertificate certify_k_biframe(const frame::BiframePair& p, const ComplexMatrix& k,
                                      const Tolerances& tol) {
  if (!k.is_square() || k.rows() != p.dim()) {
    throw DimensionMismatch("K is " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                            " but the pair lives in dimension " + std::to_string(p.dim()));
  }
  KBiframeCertificate cert;
  cert.tolerances = tol;

  const ComplexMatrix s = frame::biframe_operator(p);
  cert.hermitian_residual =
      linalg::spectral_norm(s - adjoint(s)) / std::max(1.0, linalg::spectral_norm(s));

  const ComplexMatrix h = frame::hermitian_part(s);
  const ComplexMatrix g = k * adjoint(k);
  const auto he = linalg::hermitian_eigen(h, tol.ktol);
  const double hnorm = eigen_scale(he);
  cert.psd_margin = he.eigenvalues.empty() ? 0.0 : he.eigenvalues.front();
  cert.b_opt = he.eigenvalues.empty() ? 0.0 : he.eigenvalues.back();
  cert.a_opt = optimal_lower_bound({h, g}, tol.bis_tol, tol.ktol);

  const bool psd_ok = cert.psd_margin >= -tol.ktol * hnorm;
  if (cert.hermitian_residual > tol.herm_tol) {
    cert.verdict = Verdict::NonHermitian;
  } else if (!psd_ok) {
    cert.verdict = Verdict::NotPsd;
  } else if (!cert.a_opt.positive()) {
    cert.verdict = Verdict::NoLowerBound;
  } else {
    cert.verdict = Verdict::KBiframe;
  }
  cert.is_k_biframe = cert.verdict == Verdict::KBiframe;

  const double trace_g = trace(g).real();
  if (trace_g > 0.0) {
    cert.a_estimate = trace(h).real() / trace_g;
  }
  if (cert.is_k_biframe && trace_g > 0.0) {
    const double defect = linalg::spectral_norm(shifted(h, cert.a_estimate, g));
    cert.is_tight = defect <= tol.herm_tol * std::max(1.0, hnorm);
    cert.is_parseval = cert.is_tight && std::abs(cert.a_estimate - 1.0) <= tol.herm_tol;
  }

  if (cert.verdict == Verdict::NotPsd || cert.verdict == Verdict::NoLowerBound) {
    const auto e = linalg::hermitian_eigen(shifted(h, tol.bis_tol, g), tol.ktol);
    if (!e.eigenvalues.empty()) {
      cert.witness_lower = e.eigenvectors.column(0);
    }
  }
  return cert;
}

KBiframeCertificate certify_k_frame(const frame::FrameSequence& x, const ComplexMatrix& k,
                                    const Tolerances& tol) {
  return certify_k_biframe({x, x}, k, tol);
}

KBiframeCertificate certify_biframe(const frame::BiframePair& p, const Tolerances& tol) {
  return certify_k_biframe(p, ComplexMatrix::identity(p.dim()), tol);
}

} // namespace kbf::certify
