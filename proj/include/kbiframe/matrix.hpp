#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace kbf {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Largest accepted row or column count.
inline constexpr std::size_t kMaxDimension = 256;

/// Dense row-major complex matrix. Every operator in the toolkit (K, T, S, U,
/// projectors) is carried by this type. Entries are always finite.
class ComplexMatrix {
public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(std::span<const double> d);
  static ComplexMatrix diagonal(std::span<const Complex> d);
  static ComplexMatrix from_columns(std::span<const ComplexVector> columns, std::size_t rows);
  /// Rank-one matrix u·v*.
  static ComplexMatrix outer(std::span<const Complex> u, std::span<const Complex> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<const Complex> entries() const noexcept { return entries_; }

  ComplexVector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const Complex> v);
  ComplexVector row(std::size_t i) const;
  /// First `count` columns.
  ComplexMatrix leading_columns(std::size_t count) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  bool operator==(const ComplexMatrix& other) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x);

std::ostream& operator<<(std::ostream& os, const ComplexMatrix& m);

/// Conjugate transpose.
ComplexMatrix adjoint(const ComplexMatrix& m);

/// ⟨u, v⟩ = Σ u_k·conj(v_k); linear in the first argument.
Complex inner(std::span<const Complex> u, std::span<const Complex> v);
double norm2(std::span<const Complex> v);
ComplexVector scaled(std::span<const Complex> v, Complex s);
ComplexVector add(std::span<const Complex> a, std::span<const Complex> b);

double frobenius_norm(const ComplexMatrix& m);
Complex trace(const ComplexMatrix& m);
double max_abs_entry(const ComplexMatrix& m);

} // namespace kbf
