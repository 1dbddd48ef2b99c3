#include "kbiframe/instance_gen.hpp"

#include "kbiframe/errors.hpp"
#include "kbiframe/linalg.hpp"

#include <cmath>
#include <numbers>

namespace kbf::gen {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t Rng::index(std::size_t bound) {
  if (bound == 0) {
    throw BadParameters("index bound must be positive");
  }
  return static_cast<std::size_t>(uniform() * static_cast<double>(bound));
}

Complex Rng::normal() {
  const double u1 = 1.0 - uniform(); // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

ComplexVector Rng::normal_vector(std::size_t n) {
  ComplexVector v(n);
  for (auto& z : v) {
    z = normal();
  }
  return v;
}

ComplexMatrix Rng::normal_matrix(std::size_t rows, std::size_t cols) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = normal();
    }
  }
  return m;
}

Complex Rng::unit_phase() { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

std::string_view to_string(Provenance p) {
  switch (p) {
  case Provenance::PaperGallery:
    return "paper_gallery";
  case Provenance::RandomFamily:
    return "random_family";
  case Provenance::File:
    return "file";
  }
  return "file";
}

std::string_view to_string(Family f) {
  switch (f) {
  case Family::Rescale:
    return "rescale";
  case Family::Controlled:
    return "controlled";
  case Family::Skew:
    return "skew";
  }
  return "rescale";
}

Family family_from_string(std::string_view name) {
  if (name == "rescale") {
    return Family::Rescale;
  }
  if (name == "controlled") {
    return Family::Controlled;
  }
  if (name == "skew") {
    return Family::Skew;
  }
  throw UnknownName("unknown random family '" + std::string(name) + "'");
}

ComplexMatrix right_shift(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m(i + 1, i) = 1.0;
  }
  return m;
}

ComplexMatrix left_shift(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 1; i < n; ++i) {
    m(i - 1, i) = 1.0;
  }
  return m;
}

namespace {

ComplexVector basis_vector(std::size_t n, std::size_t i, double scale = 1.0) {
  ComplexVector v(n);
  v[i] = scale;
  return v;
}

Instance make_gallery(std::string name, frame::FrameSequence x, frame::FrameSequence y,
                      ComplexMatrix k) {
  Instance inst;
  inst.name = std::move(name);
  inst.pair = frame::BiframePair(std::move(x), std::move(y));
  inst.k = std::move(k);
  inst.provenance = Provenance::PaperGallery;
  return inst;
}

// K e1 = e1, K e2 = e1, K e3 = c3·e2, K e4 = c4·e3 on C^4.
ComplexMatrix c4_operator(double c3, double c4) {
  ComplexMatrix k(4, 4);
  k(0, 0) = 1.0;
  k(0, 1) = 1.0;
  k(1, 2) = c3;
  k(2, 3) = c4;
  return k;
}

void require_dimension(std::size_t n) {
  if (n == 0 || n > kMaxDimension) {
    throw BadParameters("dimension must be in [1, " + std::to_string(kMaxDimension) + "]");
  }
}

} // namespace

const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"ex_c4", "parseval", "shift", "ex_s_singular",
                                              "perturbation_counterexample"};
  return names;
}

Instance gallery(std::string_view name, std::size_t n) {
  if (name == "ex_c4") {
    frame::FrameSequence x(4, {basis_vector(4, 0), basis_vector(4, 0), basis_vector(4, 1, 2.0),
                               basis_vector(4, 2, 3.0)});
    frame::FrameSequence y(4, {basis_vector(4, 0), basis_vector(4, 0), basis_vector(4, 1),
                               basis_vector(4, 2)});
    return make_gallery("ex_c4", std::move(x), std::move(y), c4_operator(2.0, 3.0));
  }
  if (name == "ex_s_singular") {
    frame::FrameSequence x(4, {basis_vector(4, 0), basis_vector(4, 0), basis_vector(4, 1, 2.0),
                               basis_vector(4, 2, 3.0)});
    frame::FrameSequence y(4, {basis_vector(4, 0), basis_vector(4, 0),
                               basis_vector(4, 1, 1.0 / 2.0), basis_vector(4, 2, 1.0 / 3.0)});
    return make_gallery("ex_s_singular", std::move(x), std::move(y), c4_operator(1.0, 1.0));
  }
  if (name == "parseval") {
    require_dimension(n);
    std::vector<ComplexVector> xs;
    std::vector<ComplexVector> ys;
    for (std::size_t i = 0; i < n; ++i) {
      const double idx = static_cast<double>(i + 1);
      xs.push_back(basis_vector(n, i, idx));
      ys.push_back(basis_vector(n, i, 1.0 / idx));
    }
    auto inst = make_gallery("parseval", {n, std::move(xs)}, {n, std::move(ys)},
                             ComplexMatrix::identity(n));
    inst.truncation_dim = n;
    return inst;
  }
  if (name == "shift") {
    require_dimension(n);
    // ({½·K e_i}, {2·K e_i}) with K the right shift; T is the left shift.
    const ComplexMatrix k = right_shift(n);
    auto ke = frame::FrameSequence::from_columns(k);
    auto inst = make_gallery("shift", 0.5 * ke, 2.0 * ke, k);
    inst.t = left_shift(n);
    inst.truncation_dim = n;
    return inst;
  }
  if (name == "perturbation_counterexample") {
    frame::FrameSequence x(2, {basis_vector(2, 0)});
    ComplexMatrix k(2, 2);
    k(0, 0) = 1.0;
    auto inst = make_gallery("perturbation_counterexample", x, x, k);
    inst.t = ComplexMatrix{{1.0, 1.0}, {1.0, 1.0}};
    inst.power = 1;
    return inst;
  }
  throw UnknownName("unknown gallery instance '" + std::string(name) + "'");
}

ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
  require_dimension(n);
  ComplexMatrix q(n, n);
  std::size_t filled = 0;
  while (filled < n) {
    ComplexVector v = rng.normal_vector(n);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < filled; ++j) {
        const auto col = q.column(j);
        const Complex proj = inner(v, col);
        for (std::size_t k = 0; k < n; ++k) {
          v[k] -= proj * col[k];
        }
      }
    }
    const double nv = norm2(v);
    if (nv > 1e-8) {
      q.set_column(filled++, scaled(v, 1.0 / nv));
    }
  }
  return q;
}

ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(n, rng);
}

ComplexMatrix random_operator(std::size_t n, std::size_t rank, Rng& rng) {
  require_dimension(n);
  if (rank > n) {
    throw BadParameters("rank " + std::to_string(rank) + " exceeds dimension " + std::to_string(n));
  }
  const ComplexMatrix u = random_unitary(n, rng);
  const ComplexMatrix v = random_unitary(n, rng);
  std::vector<double> sigma(n, 0.0);
  for (std::size_t i = 0; i < rank; ++i) {
    sigma[i] = rng.uniform(0.5, 2.0);
  }
  return u * ComplexMatrix::diagonal(std::span<const double>(sigma)) * adjoint(v);
}

ComplexMatrix random_operator(std::size_t n, std::size_t rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_operator(n, rank, rng);
}

ComplexMatrix random_psd(std::size_t n, Rng& rng) {
  const ComplexMatrix v = random_unitary(n, rng);
  std::vector<double> lambda(n);
  for (auto& l : lambda) {
    l = rng.uniform(0.0, 2.0);
  }
  return frame::hermitian_part(v * ComplexMatrix::diagonal(std::span<const double>(lambda)) *
                               adjoint(v));
}

ComplexMatrix random_psd(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return random_psd(n, rng);
}

OperatorPair random_commuting_pair(std::size_t n, Rng& rng) {
  const ComplexMatrix v = random_unitary(n, rng);
  ComplexVector d1(n);
  ComplexVector d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d1[i] = rng.uniform() < 0.25 ? Complex{} : rng.normal();
    d2[i] = rng.normal();
  }
  const ComplexMatrix va = adjoint(v);
  return {v * ComplexMatrix::diagonal(std::span<const Complex>(d1)) * va,
          v * ComplexMatrix::diagonal(std::span<const Complex>(d2)) * va};
}

OperatorPair random_commuting_pair(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return random_commuting_pair(n, rng);
}

OperatorPair random_commuting_unitary_pair(std::size_t n, Rng& rng) {
  const ComplexMatrix v = random_unitary(n, rng);
  ComplexVector d1(n);
  ComplexVector d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d1[i] = rng.unit_phase();
    d2[i] = rng.normal();
  }
  const ComplexMatrix va = adjoint(v);
  return {v * ComplexMatrix::diagonal(std::span<const Complex>(d1)) * va,
          v * ComplexMatrix::diagonal(std::span<const Complex>(d2)) * va};
}

Instance random_biframe(std::size_t n, std::size_t m, Family family, Rng& rng) {
  require_dimension(n);
  if (m == 0) {
    throw BadParameters("sequence length must be positive");
  }
  if (family != Family::Skew && m < n) {
    throw BadParameters("spanning family needs m >= n (m = " + std::to_string(m) +
                        ", n = " + std::to_string(n) + ")");
  }
  std::vector<ComplexVector> xs;
  xs.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs.push_back(rng.normal_vector(n));
  }
  frame::FrameSequence x(n, xs);

  std::vector<ComplexVector> ys;
  ys.reserve(m);
  switch (family) {
  case Family::Rescale:
    for (const auto& xi : xs) {
      ys.push_back(scaled(xi, rng.uniform(0.5, 2.0)));
    }
    break;
  case Family::Controlled: {
    const auto e = linalg::hermitian_eigen(frame::frame_operator(x));
    std::vector<double> d(n);
    for (auto& di : d) {
      di = rng.uniform(0.5, 2.0);
    }
    const ComplexMatrix c = frame::hermitian_part(
        e.eigenvectors * ComplexMatrix::diagonal(std::span<const double>(d)) *
        adjoint(e.eigenvectors));
    for (const auto& xi : xs) {
      ys.push_back(c * std::span<const Complex>(xi));
    }
    break;
  }
  case Family::Skew: {
    const ComplexMatrix c = rng.normal_matrix(n, n);
    for (const auto& xi : xs) {
      ys.push_back(c * std::span<const Complex>(xi));
    }
    break;
  }
  }

  Instance inst;
  inst.name = "random_" + std::string(to_string(family));
  inst.pair = frame::BiframePair(std::move(x), frame::FrameSequence(n, std::move(ys)));
  inst.k = ComplexMatrix::identity(n);
  inst.provenance = Provenance::RandomFamily;
  return inst;
}

Instance random_biframe(std::size_t n, std::size_t m, Family family, std::uint64_t seed) {
  Rng rng(seed);
  auto inst = random_biframe(n, m, family, rng);
  inst.seed = seed;
  return inst;
}

Instance random_triple(std::size_t n, std::size_t m, Family family, Rng& rng) {
  require_dimension(n);
  if (m < n) {
    throw BadParameters("triple family needs m >= n");
  }
  std::vector<ComplexVector> us;
  us.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    us.push_back(rng.normal_vector(n));
  }
  std::vector<ComplexVector> xs;
  std::vector<ComplexVector> ys;
  std::vector<ComplexVector> zs;
  for (const auto& u : us) {
    xs.push_back(scaled(u, rng.uniform(0.5, 2.0)));
    ys.push_back(scaled(u, rng.uniform(0.5, 2.0)));
  }
  if (family == Family::Skew) {
    const ComplexMatrix c = rng.normal_matrix(n, n);
    for (const auto& u : us) {
      zs.push_back(c * std::span<const Complex>(u));
    }
  } else {
    for (const auto& u : us) {
      zs.push_back(scaled(u, rng.uniform(0.5, 2.0)));
    }
  }
  Instance inst;
  inst.name = "random_triple_" + std::string(to_string(family));
  inst.pair = frame::BiframePair({n, std::move(xs)}, {n, std::move(ys)});
  inst.z = frame::FrameSequence(n, std::move(zs));
  inst.k = ComplexMatrix::identity(n);
  inst.provenance = Provenance::RandomFamily;
  return inst;
}

} // namespace kbf::gen
