#include "kbiframe/frame.hpp"

#include "kbiframe/errors.hpp"

#include <cmath>
#include <string>

namespace kbf::frame {

FrameSequence::FrameSequence(std::size_t dim, std::vector<ComplexVector> vectors)
    : dim_(dim), vectors_(std::move(vectors)) {
  if (dim_ > kMaxDimension) {
    throw SizeLimitExceeded("sequence dimension " + std::to_string(dim_) + " exceeds limit");
  }
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (vectors_[i].size() != dim_) {
      throw DimensionMismatch("vector " + std::to_string(i) + " has length " +
                              std::to_string(vectors_[i].size()) + ", expected " +
                              std::to_string(dim_));
    }
    for (const auto& z : vectors_[i]) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw NonFiniteEntry("vector " + std::to_string(i) + " has a non-finite entry");
      }
    }
  }
}

FrameSequence FrameSequence::from_columns(const ComplexMatrix& m) {
  std::vector<ComplexVector> v;
  v.reserve(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    v.push_back(m.column(j));
  }
  return {m.rows(), std::move(v)};
}

FrameSequence FrameSequence::standard_basis(std::size_t n) {
  return from_columns(ComplexMatrix::identity(n));
}

ComplexMatrix FrameSequence::synthesis() const {
  return ComplexMatrix::from_columns(vectors_, dim_);
}

FrameSequence operator+(const FrameSequence& a, const FrameSequence& b) {
  if (a.dim() != b.dim() || a.size() != b.size()) {
    throw DimensionMismatch("sequence sum needs equal length and dimension");
  }
  std::vector<ComplexVector> v;
  v.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    v.push_back(add(a[i], b[i]));
  }
  return {a.dim(), std::move(v)};
}

FrameSequence operator*(Complex c, const FrameSequence& a) {
  std::vector<ComplexVector> v;
  v.reserve(a.size());
  for (const auto& x : a.vectors()) {
    v.push_back(scaled(x, c));
  }
  return {a.dim(), std::move(v)};
}

BiframePair::BiframePair(FrameSequence x, FrameSequence y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.dim() != y_.dim()) {
    throw DimensionMismatch("pair dimensions differ: " + std::to_string(x_.dim()) + " vs " +
                            std::to_string(y_.dim()));
  }
  if (x_.size() != y_.size()) {
    throw DimensionMismatch("pair lengths differ: " + std::to_string(x_.size()) + " vs " +
                            std::to_string(y_.size()));
  }
}

ComplexMatrix biframe_operator(const BiframePair& p) {
  const std::size_t n = p.dim();
  ComplexMatrix s(n, n);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& x = p.x()[i];
    const auto& y = p.y()[i];
    for (std::size_t r = 0; r < n; ++r) {
      if (y[r] == Complex{}) {
        continue;
      }
      for (std::size_t c = 0; c < n; ++c) {
        s(r, c) += y[r] * std::conj(x[c]);
      }
    }
  }
  return s;
}

Complex pair_form(const BiframePair& p, std::span<const Complex> v) {
  if (v.size() != p.dim()) {
    throw DimensionMismatch("pair_form vector length " + std::to_string(v.size()) +
                            " != dimension " + std::to_string(p.dim()));
  }
  Complex acc{};
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += inner(v, p.x()[i]) * inner(p.y()[i], v);
  }
  return acc;
}

ComplexMatrix hermitian_part(const ComplexMatrix& s) {
  if (!s.is_square()) {
    throw DimensionMismatch("hermitian_part needs a square matrix");
  }
  const std::size_t n = s.rows();
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = s(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex v = 0.5 * (s(i, j) + std::conj(s(j, i)));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

ComplexMatrix frame_operator(const FrameSequence& x) { return biframe_operator({x, x}); }

FrameSequence apply_operator_to_sequence(const ComplexMatrix& t, const FrameSequence& x) {
  if (t.cols() != x.dim()) {
    throw DimensionMismatch("operator has " + std::to_string(t.cols()) +
                            " columns but sequence dimension is " + std::to_string(x.dim()));
  }
  std::vector<ComplexVector> v;
  v.reserve(x.size());
  for (const auto& xi : x.vectors()) {
    v.push_back(t * std::span<const Complex>(xi));
  }
  return {t.rows(), std::move(v)};
}

} // namespace kbf::frame
