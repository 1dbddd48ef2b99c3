#pragma once

#include "kbiframe/matrix.hpp"

#include <cstddef>
#include <vector>

namespace kbf::frame {

/// Finite sequence {x_i} of vectors in C^dim. May be empty.
class FrameSequence {
public:
  FrameSequence() = default;
  FrameSequence(std::size_t dim, std::vector<ComplexVector> vectors);

  /// The columns of `m`, in order.
  static FrameSequence from_columns(const ComplexMatrix& m);
  /// Standard basis e_1..e_n.
  static FrameSequence standard_basis(std::size_t n);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  const std::vector<ComplexVector>& vectors() const noexcept { return vectors_; }
  const ComplexVector& operator[](std::size_t i) const { return vectors_[i]; }

  /// dim x size matrix whose columns are the vectors (the synthesis matrix).
  ComplexMatrix synthesis() const;

  bool operator==(const FrameSequence&) const = default;

private:
  std::size_t dim_ = 0;
  std::vector<ComplexVector> vectors_;
};

/// Index-wise sum {x_i + z_i}; both sequences need equal length and dimension.
FrameSequence operator+(const FrameSequence& a, const FrameSequence& b);
/// {c·x_i}.
FrameSequence operator*(Complex c, const FrameSequence& a);

/// Ordered pair (X, Y) of sequences with matching dimension and length.
class BiframePair {
public:
  BiframePair() = default;
  BiframePair(FrameSequence x, FrameSequence y);

  const FrameSequence& x() const noexcept { return x_; }
  const FrameSequence& y() const noexcept { return y_; }
  std::size_t dim() const noexcept { return x_.dim(); }
  std::size_t size() const noexcept { return x_.size(); }

  /// (Y, X).
  BiframePair swapped() const { return {y_, x_}; }

  bool operator==(const BiframePair&) const = default;

private:
  FrameSequence x_;
  FrameSequence y_;
};

/// S = Σ y_i·x_i*, so that S·v = Σ ⟨v, x_i⟩·y_i.
ComplexMatrix biframe_operator(const BiframePair& p);

/// Φ(v) = Σ ⟨v, x_i⟩·⟨y_i, v⟩, evaluated term by term.
Complex pair_form(const BiframePair& p, std::span<const Complex> v);

/// (S + S*) / 2; Hermitian exactly.
ComplexMatrix hermitian_part(const ComplexMatrix& s);

/// Σ x_i·x_i*.
ComplexMatrix frame_operator(const FrameSequence& x);

/// {T·x_i}.
FrameSequence apply_operator_to_sequence(const ComplexMatrix& t, const FrameSequence& x);

} // namespace kbf::frame
