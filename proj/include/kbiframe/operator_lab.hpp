#pragma once

#include "kbiframe/linalg.hpp"
#include "kbiframe/matrix.hpp"

#include <optional>

namespace kbf::ops {

/// Outcome of testing R(t1) ⊆ R(t2) three ways: projector residual, the
/// majorization t1·t1* ⪯ λ²·t2·t2*, and the factorization t1 = t2·U.
struct DouglasReport {
  bool range_included = false;
  std::optional<double> lambda_min;
  std::optional<ComplexMatrix> factor_u;

  bool projector_test = false;     // ‖(I − P₂)·t1‖ small
  bool majorization_test = false;  // some λ in the bracket passes the PSD test
  bool factorization_test = false; // ‖t2·(t2⁺·t1) − t1‖ small

  double projector_residual = 0.0;     // ‖(I − P₂)·t1‖
  double factorization_residual = 0.0; // ‖t2·U − t1‖ with U = t2⁺·t1
  double majorization_margin = 0.0;    // λ_min of λ²·t2·t2* − t1·t1* at the returned λ

  /// Unit vector in R(t1) farthest from R(t2), when inclusion fails.
  std::optional<ComplexVector> witness;
};

struct DouglasOptions {
  double rtol = 0.0; // 0 selects linalg::default_rtol(n, n)
  double ktol = linalg::kDefaultKtol;
  double bis_tol = 1e-12; // on λ²
};

DouglasReport douglas_check(const ComplexMatrix& t1, const ComplexMatrix& t2,
                            const DouglasOptions& opt = {});

/// σ_min(t)², the largest c with c‖x‖² ≤ ‖t·x‖².
double injectivity_constant(const ComplexMatrix& t);

bool is_coisometry(const ComplexMatrix& t, double tol);

/// ‖t·k − k·t‖.
double commutation_residual(const ComplexMatrix& t, const ComplexMatrix& k);

struct PseudoInverseResiduals {
  double kernel = 0.0;   // N(t⁺) against R(t)^⊥
  double range = 0.0;    // R(t⁺) against N(t)^⊥
  double identity = 0.0; // ‖t·t⁺·Q − Q‖, Q spanning R(t)

  double max() const;
};

PseudoInverseResiduals pseudo_inverse_verify(const ComplexMatrix& t, const ComplexMatrix& t_plus,
                                             double tol);

struct RangeRestriction {
  ComplexMatrix compression; // Q*·s·Q
  double sigma_min = 0.0;    // σ_min(s·Q); 0 when R(k) = {0}
  ComplexMatrix basis;       // Q
};

RangeRestriction restrict_to_range(const ComplexMatrix& s, const ComplexMatrix& k, double rtol);
RangeRestriction restrict_to_range(const ComplexMatrix& s, const ComplexMatrix& k);

} // namespace kbf::ops
