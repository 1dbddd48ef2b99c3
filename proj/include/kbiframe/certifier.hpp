#pragma once

#include "kbiframe/frame.hpp"
#include "kbiframe/linalg.hpp"
#include "kbiframe/matrix.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace kbf::certify {

/// Lower frame constant; `unbounded` when every A ≥ 0 is admissible (K = 0).
struct LowerBound {
  double value = 0.0;
  bool unbounded = false;

  static LowerBound finite(double v) { return {v, false}; }
  static LowerBound infinite() { return {0.0, true}; }

  bool positive() const { return unbounded || value > 0.0; }
  bool operator==(const LowerBound&) const = default;
};

struct Tolerances {
  double herm_tol = 1e-8;
  double bis_tol = 1e-9;
  double ktol = linalg::kDefaultKtol;
};

/// Defaults, with KBIFRAME_TOL (when set to a positive decimal) replacing
/// herm_tol and bis_tol = herm_tol / 10.
Tolerances tolerances_from_environment();

enum class Verdict {
  KBiframe,
  NonHermitian,
  NotPsd,
  NoLowerBound,
};

std::string_view to_string(Verdict v);

struct KBiframeCertificate {
  double hermitian_residual = 0.0; // ‖S − S*‖ / max(1, ‖S‖)
  double psd_margin = 0.0;         // λ_min(H)
  LowerBound a_opt;
  double b_opt = 0.0;
  double a_estimate = 0.0;         // trace(H) / trace(KK*), 0 when K = 0
  bool is_k_biframe = false;
  bool is_tight = false;
  bool is_parseval = false;
  Verdict verdict = Verdict::NoLowerBound;
  std::optional<ComplexVector> witness_lower;
  Tolerances tolerances;
};

/// h: Hermitian part of S; g: the positive operator KK*.
struct BoundProblem {
  ComplexMatrix h;
  ComplexMatrix g;
};

/// λ_max(h), the least valid upper bound.
double optimal_upper_bound(const ComplexMatrix& h, double ktol = linalg::kDefaultKtol);

/// sup{A ≥ 0 : h − A·g ⪰ 0}, bracketed by bisection to width bis_tol and then
/// tightened by a generalized Rayleigh quotient that is kept only if it also
/// passes the PSD test. Returns 0 when h is not PSD or when g does not vanish
/// on the numerical null space of h (eigenvalues ≤ ktol·‖h‖).
LowerBound optimal_lower_bound(const BoundProblem& bp, double bis_tol,
                               double ktol = linalg::kDefaultKtol);

/// PSD test used throughout: λ_min(m) ≥ −ktol·scale.
bool passes_psd(const ComplexMatrix& m, double scale, double ktol);

KBiframeCertificate certify_k_biframe(const frame::BiframePair& p, const ComplexMatrix& k,
                                      const Tolerances& tol = {});
KBiframeCertificate certify_k_frame(const frame::FrameSequence& x, const ComplexMatrix& k,
                                    const Tolerances& tol = {});
KBiframeCertificate certify_biframe(const frame::BiframePair& p, const Tolerances& tol = {});

} // namespace kbf::certify
