#include "kbiframe/matrix.hpp"

#include "kbiframe/errors.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace kbf {

namespace {

void check_shape(std::size_t rows, std::size_t cols) {
  if (rows > kMaxDimension || cols > kMaxDimension) {
    throw SizeLimitExceeded("matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                            " exceeds the " + std::to_string(kMaxDimension) + "x" +
                            std::to_string(kMaxDimension) + " limit");
  }
}

void check_finite(std::span<const Complex> entries) {
  for (const auto& z : entries) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw NonFiniteEntry("matrix entry is NaN or infinite");
    }
  }
}

} // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  check_shape(rows, cols);
  entries_.assign(rows * cols, Complex{});
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  check_shape(rows, cols);
  if (entries_.size() != rows * cols) {
    throw DimensionMismatch("entry count " + std::to_string(entries_.size()) + " != " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  }
  check_finite(entries_);
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  check_shape(rows_, cols_);
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw DimensionMismatch("ragged initializer list");
    }
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  check_finite(entries_);
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    m(i, i) = d[i];
  }
  check_finite(m.entries_);
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    m(i, i) = d[i];
  }
  check_finite(m.entries_);
  return m;
}

ComplexMatrix ComplexMatrix::from_columns(std::span<const ComplexVector> columns,
                                          std::size_t rows) {
  ComplexMatrix m(rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    m.set_column(j, columns[j]);
  }
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> u, std::span<const Complex> v) {
  ComplexMatrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      m(i, j) = u[i] * std::conj(v[j]);
    }
  }
  return m;
}

ComplexVector ComplexMatrix::column(std::size_t j) const {
  ComplexVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    v[i] = (*this)(i, j);
  }
  return v;
}

void ComplexMatrix::set_column(std::size_t j, std::span<const Complex> v) {
  if (v.size() != rows_) {
    throw DimensionMismatch("column length " + std::to_string(v.size()) + " != rows " +
                            std::to_string(rows_));
  }
  check_finite(v);
  for (std::size_t i = 0; i < rows_; ++i) {
    (*this)(i, j) = v[i];
  }
}

ComplexVector ComplexMatrix::row(std::size_t i) const {
  return {entries_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
          entries_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

ComplexMatrix ComplexMatrix::leading_columns(std::size_t count) const {
  ComplexMatrix m(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      m(i, j) = (*this)(i, j);
    }
  }
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionMismatch("matrix sum of incompatible shapes");
  }
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    entries_[k] += other.entries_[k];
  }
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionMismatch("matrix difference of incompatible shapes");
  }
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    entries_[k] -= other.entries_[k];
  }
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : entries_) {
    z *= scale;
  }
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matrix product " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) {
        continue;
      }
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) {
    throw DimensionMismatch("matrix-vector product: cols " + std::to_string(a.cols()) +
                            " != length " + std::to_string(x.size()));
  }
  ComplexVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < a.cols(); ++j) {
      acc += a(i, j) * x[j];
    }
    y[i] = acc;
  }
  return y;
}

std::ostream& operator<<(std::ostream& os, const ComplexMatrix& m) {
  os << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i == 0 ? "[" : " [");
    for (std::size_t j = 0; j < m.cols(); ++j) {
      os << (j == 0 ? "" : ", ") << m(i, j);
    }
    os << "]" << (i + 1 < m.rows() ? "\n" : "");
  }
  return os << "]";
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix r(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      r(j, i) = std::conj(m(i, j));
    }
  }
  return r;
}

Complex inner(std::span<const Complex> u, std::span<const Complex> v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("inner product of vectors with different lengths");
  }
  Complex acc{};
  for (std::size_t k = 0; k < u.size(); ++k) {
    acc += u[k] * std::conj(v[k]);
  }
  return acc;
}

double norm2(std::span<const Complex> v) {
  double acc = 0.0;
  for (const auto& z : v) {
    acc += std::norm(z);
  }
  return std::sqrt(acc);
}

ComplexVector scaled(std::span<const Complex> v, Complex s) {
  ComplexVector r(v.begin(), v.end());
  for (auto& z : r) {
    z *= s;
  }
  return r;
}

ComplexVector add(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("vector sum of different lengths");
  }
  ComplexVector r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    r[k] = a[k] + b[k];
  }
  return r;
}

double frobenius_norm(const ComplexMatrix& m) { return norm2(m.entries()); }

Complex trace(const ComplexMatrix& m) {
  Complex t{};
  const std::size_t n = std::min(m.rows(), m.cols());
  for (std::size_t i = 0; i < n; ++i) {
    t += m(i, i);
  }
  return t;
}

double max_abs_entry(const ComplexMatrix& m) {
  double r = 0.0;
  for (const auto& z : m.entries()) {
    r = std::max(r, std::abs(z));
  }
  return r;
}

} // namespace kbf
