#include "kbiframe/linalg.hpp"

#include "kbiframe/errors.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

namespace kbf::linalg {

namespace {

constexpr int kMaxSweeps = 100;

/// Unitary G = [[c, s], [−s·conj(w), c·conj(w)]] that diagonalizes the 2x2
/// Hermitian block [[a, b], [conj(b), d]] via G*·A·G.
struct Rotation {
  double c = 1.0;
  double s = 0.0;
  Complex w{1.0, 0.0};

  Complex pp() const { return c; }
  Complex pq() const { return s; }
  Complex qp() const { return -s * std::conj(w); }
  Complex qq() const { return c * std::conj(w); }
};

Rotation jacobi_rotation(double a, double d, Complex b) {
  const double mag = std::abs(b);
  Rotation r;
  r.w = b / mag;
  const double theta = (d - a) / (2.0 * mag);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) {
    t = -t;
  }
  r.c = 1.0 / std::sqrt(t * t + 1.0);
  r.s = t * r.c;
  return r;
}

// M ← M·G on columns p, q.
void rotate_columns(ComplexMatrix& m, std::size_t p, std::size_t q, const Rotation& g) {
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const Complex mp = m(k, p);
    const Complex mq = m(k, q);
    m(k, p) = mp * g.pp() + mq * g.qp();
    m(k, q) = mp * g.pq() + mq * g.qq();
  }
}

// M ← G*·M on rows p, q.
void rotate_rows(ComplexMatrix& m, std::size_t p, std::size_t q, const Rotation& g) {
  for (std::size_t k = 0; k < m.cols(); ++k) {
    const Complex mp = m(p, k);
    const Complex mq = m(q, k);
    m(p, k) = std::conj(g.pp()) * mp + std::conj(g.qp()) * mq;
    m(q, k) = std::conj(g.pq()) * mp + std::conj(g.qq()) * mq;
  }
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) {
        acc += std::norm(a(i, j));
      }
    }
  }
  return std::sqrt(acc);
}

ComplexMatrix symmetrized(const ComplexMatrix& h) {
  ComplexMatrix a(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.rows(); ++i) {
    a(i, i) = h(i, i).real();
    for (std::size_t j = i + 1; j < h.cols(); ++j) {
      const Complex v = 0.5 * (h(i, j) + std::conj(h(j, i)));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  return a;
}

// Extends the orthonormal columns [0, filled) of u to a full orthonormal set,
// drawing candidates from the standard basis.
void complete_orthonormal(ComplexMatrix& u, std::size_t filled) {
  const std::size_t n = u.rows();
  std::size_t next = filled;
  for (std::size_t e = 0; e < n && next < u.cols(); ++e) {
    ComplexVector v(n);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < next; ++j) {
        const auto col = u.column(j);
        const Complex proj = inner(v, col);
        for (std::size_t k = 0; k < n; ++k) {
          v[k] -= proj * col[k];
        }
      }
    }
    const double nv = norm2(v);
    if (nv > 0.5) {
      u.set_column(next++, scaled(v, 1.0 / nv));
    }
  }
}

SvdDecomposition svd_tall(const ComplexMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  ComplexMatrix w = m;
  ComplexMatrix v = ComplexMatrix::identity(cols);

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        Complex gamma{};
        for (std::size_t k = 0; k < rows; ++k) {
          alpha += std::norm(w(k, p));
          beta += std::norm(w(k, q));
          gamma += std::conj(w(k, p)) * w(k, q);
        }
        if (alpha == 0.0 || beta == 0.0 || std::abs(gamma) <= DBL_EPSILON * std::sqrt(alpha * beta)) {
          continue;
        }
        converged = false;
        const Rotation g = jacobi_rotation(alpha, beta, gamma);
        rotate_columns(w, p, q, g);
        rotate_columns(v, p, q, g);
      }
    }
  }
  if (!converged) {
    throw NoConvergence("one-sided Jacobi SVD did not converge in " + std::to_string(kMaxSweeps) +
                        " sweeps");
  }

  std::vector<double> norms(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    norms[j] = norm2(w.column(j));
  }
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  SvdDecomposition out;
  out.left = ComplexMatrix(rows, cols);
  out.right = ComplexMatrix(cols, cols);
  out.singulars.resize(cols);
  const double smax = cols == 0 ? 0.0 : norms[order[0]];
  // Columns this small are not reliably orthogonal to the rest once normalized.
  const double floor = smax * DBL_EPSILON * static_cast<double>(std::max<std::size_t>(rows, 1));
  std::size_t filled = 0;
  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t src = order[j];
    out.singulars[j] = norms[src];
    out.right.set_column(j, v.column(src));
    if (norms[src] > floor && norms[src] > 0.0) {
      out.left.set_column(j, scaled(w.column(src), 1.0 / norms[src]));
      ++filled;
    }
  }
  complete_orthonormal(out.left, filled);
  return out;
}

} // namespace

double default_rtol(std::size_t rows, std::size_t cols) {
  return static_cast<double>(std::max<std::size_t>({rows, cols, 1})) * 1e-12;
}

double hermitian_defect(const ComplexMatrix& h) {
  if (!h.is_square()) {
    throw DimensionMismatch("Hermitian check on non-square matrix");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      acc += std::norm(h(i, j) - std::conj(h(j, i)));
    }
  }
  return std::sqrt(acc) / std::max(1.0, frobenius_norm(h));
}

EigenDecomposition hermitian_eigen(const ComplexMatrix& h, double ktol) {
  if (!h.is_square()) {
    throw DimensionMismatch("hermitian_eigen needs a square matrix");
  }
  const double defect = hermitian_defect(h);
  if (defect > ktol) {
    throw NotHermitian("relative Hermitian defect " + std::to_string(defect) +
                       " exceeds tolerance");
  }
  const std::size_t n = h.rows();
  ComplexMatrix a = symmetrized(h);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = frobenius_norm(a);

  bool converged = n < 2 || scale == 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex b = a(p, q);
        if (std::abs(b) <= 1e-300) {
          continue;
        }
        const Rotation g = jacobi_rotation(a(p, p).real(), a(q, q).real(), b);
        rotate_columns(a, p, q, g);
        rotate_rows(a, p, q, g);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        rotate_columns(v, p, q, g);
      }
    }
    converged = off_diagonal_norm(a) <= 4.0 * DBL_EPSILON * scale;
  }
  if (!converged) {
    throw NoConvergence("Jacobi eigensolver did not converge in " + std::to_string(kMaxSweeps) +
                        " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    out.eigenvectors.set_column(k, v.column(order[k]));
  }
  return out;
}

SvdDecomposition svd(const ComplexMatrix& m) {
  if (m.rows() >= m.cols()) {
    return svd_tall(m);
  }
  auto t = svd_tall(adjoint(m));
  return {std::move(t.right), std::move(t.singulars), std::move(t.left)};
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& m, double rtol) {
  if (!(rtol > 0.0)) {
    throw BadParameters("pseudo_inverse needs rtol > 0");
  }
  const auto d = svd(m);
  ComplexMatrix out(m.cols(), m.rows());
  if (d.singulars.empty() || d.singulars[0] == 0.0) {
    return out;
  }
  const double cutoff = rtol * d.singulars[0];
  for (std::size_t k = 0; k < d.singulars.size(); ++k) {
    if (d.singulars[k] <= cutoff) {
      break;
    }
    const double inv = 1.0 / d.singulars[k];
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const Complex vik = d.right(i, k) * inv;
      for (std::size_t j = 0; j < m.rows(); ++j) {
        out(i, j) += vik * std::conj(d.left(j, k));
      }
    }
  }
  return out;
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& m) {
  return pseudo_inverse(m, default_rtol(m.rows(), m.cols()));
}

ComplexMatrix psd_sqrt(const ComplexMatrix& h, double ktol) {
  const auto e = hermitian_eigen(h, ktol);
  const std::size_t n = h.rows();
  double scale = 0.0;
  for (double l : e.eigenvalues) {
    scale = std::max(scale, std::abs(l));
  }
  if (n > 0 && e.eigenvalues.front() < -ktol * scale) {
    throw NotPsd("minimum eigenvalue " + std::to_string(e.eigenvalues.front()) +
                 " is below the PSD tolerance");
  }
  ComplexMatrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double l = e.eigenvalues[k];
    if (l <= ktol * scale) {
      continue;
    }
    const double root = std::sqrt(l);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = e.eigenvectors(i, k) * root;
      for (std::size_t j = 0; j < n; ++j) {
        r(i, j) += vik * std::conj(e.eigenvectors(j, k));
      }
    }
  }
  return symmetrized(r);
}

double spectral_norm(const ComplexMatrix& m) {
  if (m.empty()) {
    return 0.0;
  }
  return svd(m).singulars.front();
}

double min_eig_hermitian(const ComplexMatrix& h, double ktol) {
  const auto e = hermitian_eigen(h, ktol);
  return e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();
}

double max_eig_hermitian(const ComplexMatrix& h, double ktol) {
  const auto e = hermitian_eigen(h, ktol);
  return e.eigenvalues.empty() ? 0.0 : e.eigenvalues.back();
}

std::size_t numerical_rank(const ComplexMatrix& m, double rtol) {
  const auto d = svd(m);
  if (d.singulars.empty() || d.singulars[0] == 0.0) {
    return 0;
  }
  const double cutoff = rtol * d.singulars[0];
  return static_cast<std::size_t>(
      std::count_if(d.singulars.begin(), d.singulars.end(), [&](double s) { return s > cutoff; }));
}

std::size_t numerical_rank(const ComplexMatrix& m) {
  return numerical_rank(m, default_rtol(m.rows(), m.cols()));
}

ComplexMatrix range_basis(const ComplexMatrix& m, double rtol) {
  const auto d = svd(m);
  std::size_t rank = 0;
  if (!d.singulars.empty() && d.singulars[0] > 0.0) {
    const double cutoff = rtol * d.singulars[0];
    while (rank < d.singulars.size() && d.singulars[rank] > cutoff) {
      ++rank;
    }
  }
  return d.left.leading_columns(rank);
}

ComplexMatrix range_basis(const ComplexMatrix& m) {
  return range_basis(m, default_rtol(m.rows(), m.cols()));
}

ComplexMatrix range_projector(const ComplexMatrix& m, double rtol) {
  const auto q = range_basis(m, rtol);
  return q * adjoint(q);
}

bool is_psd(const ComplexMatrix& h, double ktol) {
  const auto e = hermitian_eigen(h, ktol);
  if (e.eigenvalues.empty()) {
    return true;
  }
  const double scale = std::max(std::abs(e.eigenvalues.front()), std::abs(e.eigenvalues.back()));
  return e.eigenvalues.front() >= -ktol * scale;
}

} // namespace kbf::linalg
