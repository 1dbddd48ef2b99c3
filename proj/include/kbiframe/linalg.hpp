#pragma once

#include "kbiframe/matrix.hpp"

#include <cstddef>
#include <vector>

namespace kbf::linalg {

/// Relative tolerance for Hermitian/PSD decisions and reconstruction checks.
inline constexpr double kDefaultKtol = 1e-10;

/// Default relative singular-value cutoff for rank decisions.
double default_rtol(std::size_t rows, std::size_t cols);

struct EigenDecomposition {
  std::vector<double> eigenvalues; // ascending
  ComplexMatrix eigenvectors;      // unitary, column k pairs with eigenvalues[k]
};

/// Thin SVD: M = left · diag(singulars) · right*, with p = min(rows, cols).
struct SvdDecomposition {
  ComplexMatrix left;           // rows x p, orthonormal columns
  std::vector<double> singulars; // descending, nonnegative
  ComplexMatrix right;          // cols x p, orthonormal columns
};

/// ‖H − H*‖_F / max(1, ‖H‖_F).
double hermitian_defect(const ComplexMatrix& h);

/// Cyclic complex Jacobi. Throws NotHermitian when the relative defect exceeds
/// ktol and NoConvergence past the sweep cap.
EigenDecomposition hermitian_eigen(const ComplexMatrix& h, double ktol = kDefaultKtol);

/// One-sided (Hestenes) Jacobi on the columns.
SvdDecomposition svd(const ComplexMatrix& m);

/// Inverts singular values above rtol·σ_max, zeroes the rest.
ComplexMatrix pseudo_inverse(const ComplexMatrix& m, double rtol);
ComplexMatrix pseudo_inverse(const ComplexMatrix& m);

/// Hermitian PSD square root. Eigenvalues with |λ| ≤ ktol·‖H‖ are treated as
/// zero; anything more negative raises NotPsd.
ComplexMatrix psd_sqrt(const ComplexMatrix& h, double ktol = kDefaultKtol);

double spectral_norm(const ComplexMatrix& m);
double min_eig_hermitian(const ComplexMatrix& h, double ktol = kDefaultKtol);
double max_eig_hermitian(const ComplexMatrix& h, double ktol = kDefaultKtol);

/// Number of singular values above rtol·σ_max.
std::size_t numerical_rank(const ComplexMatrix& m, double rtol);
std::size_t numerical_rank(const ComplexMatrix& m);

/// Orthonormal columns spanning R(M): left singular vectors above the cutoff.
ComplexMatrix range_basis(const ComplexMatrix& m, double rtol);
ComplexMatrix range_basis(const ComplexMatrix& m);

/// Orthogonal projector Q·Q* onto R(M).
ComplexMatrix range_projector(const ComplexMatrix& m, double rtol);

/// True when the smallest eigenvalue of H is ≥ −ktol·‖H‖.
bool is_psd(const ComplexMatrix& h, double ktol = kDefaultKtol);

} // namespace kbf::linalg
