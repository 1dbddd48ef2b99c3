#pragma once

#include "kbiframe/frame.hpp"
#include "kbiframe/matrix.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace kbf::gen {

/// Deterministic source used by every random family: std::mt19937_64 (fully
/// specified by the C++ standard), uniform doubles from the top 53 bits, and
/// complex normals from the Box–Muller transform (re and im each N(0, 1)).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  std::size_t index(std::size_t bound);  // [0, bound)
  Complex normal();
  ComplexVector normal_vector(std::size_t n);
  ComplexMatrix normal_matrix(std::size_t rows, std::size_t cols);
  Complex unit_phase();

private:
  std::mt19937_64 engine_;
};

enum class Provenance { PaperGallery, RandomFamily, File };
std::string_view to_string(Provenance p);

enum class Family { Rescale, Controlled, Skew };
std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

/// A pair together with K and whatever extra operators a statement needs.
struct Instance {
  std::string name;
  frame::BiframePair pair;
  ComplexMatrix k;
  std::optional<ComplexMatrix> t;
  std::vector<ComplexMatrix> factors;
  std::vector<Complex> alphas;
  std::optional<frame::FrameSequence> z;
  std::optional<unsigned> power;
  Provenance provenance = Provenance::File;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> truncation_dim;

  std::size_t dim() const { return pair.dim(); }
};

inline constexpr std::size_t kDefaultTruncation = 8;

/// Names: ex_c4, parseval, shift, ex_s_singular, perturbation_counterexample.
/// `n` is the truncation dimension for parseval and shift; the others are fixed.
Instance gallery(std::string_view name, std::size_t n = kDefaultTruncation);
const std::vector<std::string>& gallery_names();

/// Right shift e_i ↦ e_{i+1} (e_n ↦ 0) and left shift e_i ↦ e_{i−1} (e_1 ↦ 0).
ComplexMatrix right_shift(std::size_t n);
ComplexMatrix left_shift(std::size_t n);

/// rescale: y_i = c_i·x_i with c_i ∈ [0.5, 2]; controlled: y_i = C·x_i with C
/// positive and diagonal in the eigenbasis of S_X; skew: y_i = C·x_i with C a
/// random non-normal matrix. K is the identity. Spanning families need m ≥ n.
Instance random_biframe(std::size_t n, std::size_t m, Family family, std::uint64_t seed);
Instance random_biframe(std::size_t n, std::size_t m, Family family, Rng& rng);

/// X, Y, Z sharing one spanning set {u_i}: x_i = a_i·u_i, y_i = b_i·u_i and
/// z_i = c_i·u_i (rescale), or z_i = C·u_i with C non-normal (skew).
Instance random_triple(std::size_t n, std::size_t m, Family family, Rng& rng);

ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed);
ComplexMatrix random_unitary(std::size_t n, Rng& rng);

/// U·diag(σ)·V* with exactly `rank` singular values drawn from [0.5, 2].
ComplexMatrix random_operator(std::size_t n, std::size_t rank, std::uint64_t seed);
ComplexMatrix random_operator(std::size_t n, std::size_t rank, Rng& rng);

/// V·diag(λ)·V* with λ ∈ [0, 2].
ComplexMatrix random_psd(std::size_t n, std::uint64_t seed);
ComplexMatrix random_psd(std::size_t n, Rng& rng);

struct OperatorPair {
  ComplexMatrix t;
  ComplexMatrix k;
};

/// t = V·D₁·V*, k = V·D₂·V* for one unitary V; complex diagonals, with about a
/// quarter of D₁'s entries zeroed so t covers several ranks.
OperatorPair random_commuting_pair(std::size_t n, std::uint64_t seed);
OperatorPair random_commuting_pair(std::size_t n, Rng& rng);

/// As above with D₁ unit-modulus phases, so t is unitary.
OperatorPair random_commuting_unitary_pair(std::size_t n, Rng& rng);

} // namespace kbf::gen
