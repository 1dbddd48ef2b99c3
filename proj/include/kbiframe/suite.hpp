#pragma once

#include "kbiframe/certifier.hpp"
#include "kbiframe/instance_gen.hpp"
#include "kbiframe/io.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kbf::suite {

/// One trial of a property. `applicable` is false when the drawn instance
/// misses the statement's hypotheses; such trials count neither way.
struct TrialOutcome {
  bool applicable = true;
  bool passed = true;
  double margin = 0.0; // property-specific, relative to max(1, ‖H‖) where one applies
};

struct PropertyResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t applicable = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::vector<std::size_t> failing_trials; // first few, by trial index
  double worst_margin = 0.0;

  bool ok() const { return failed == 0; }
};

struct SuiteResult {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<PropertyResult> properties;

  bool all_passed() const;
  const PropertyResult* find(std::string_view name) const;
};

/// Properties in battery order.
const std::vector<std::string>& property_names();

/// Trial i of property p draws from a generator seeded by (seed, p, i) alone,
/// so results do not depend on which other properties or trials run.
PropertyResult run_property(std::string_view name, std::uint64_t seed, std::size_t trials,
                            const certify::Tolerances& tol = {});
SuiteResult run_random_suite(std::uint64_t seed, std::size_t trials,
                             const certify::Tolerances& tol = {});

io::Json suite_to_json(const SuiteResult& r);
std::string summary_table(const SuiteResult& r);

/// Pair with Hermitian positive definite H (rescale or controlled family), n×n K = I.
gen::Instance positive_instance(std::size_t n, gen::Rng& rng);
/// Pair (X, cX) with fewer vectors than the dimension: H is PSD and singular.
gen::Instance deficient_instance(std::size_t n, std::size_t m, gen::Rng& rng);

} // namespace kbf::suite
