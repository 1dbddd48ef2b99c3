#include "kbiframe/suite.hpp"

#include "kbiframe/audit.hpp"
#include "kbiframe/errors.hpp"
#include "kbiframe/linalg.hpp"
#include "kbiframe/operator_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace kbf::suite {

namespace {

using Trial = std::function<TrialOutcome(gen::Rng&, const certify::Tolerances&)>;

constexpr std::size_t kMaxDim = 6;
constexpr std::size_t kRecordedFailures = 5;

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::size_t draw_dim(gen::Rng& rng) { return 1 + rng.index(kMaxDim); }

ComplexMatrix draw_operator(std::size_t n, std::size_t min_rank, gen::Rng& rng) {
  const std::size_t rank = min_rank + rng.index(n - min_rank + 1);
  return gen::random_operator(n, rank, rng);
}

TrialOutcome from_audit(const audit::AuditReport& r) {
  TrialOutcome out;
  out.applicable = r.hypotheses_ok;
  out.passed = !r.hypotheses_ok || r.claim_valid;
  if (auto m = r.metric("lower_margin")) {
    const double scale = r.certificate ? std::max(1.0, std::abs(r.certificate->b_opt)) : 1.0;
    out.margin = *m / scale;
  }
  return out;
}

audit::AuditOptions audit_options(gen::Rng& rng, const certify::Tolerances& tol) {
  audit::AuditOptions opt;
  opt.tol = tol;
  opt.seed = mix(static_cast<std::uint64_t>(rng.uniform() * 9007199254740992.0));
  return opt;
}

TrialOutcome douglas_trial(gen::Rng& rng, const certify::Tolerances&) {
  const std::size_t n = draw_dim(rng);
  const ComplexMatrix t2 = draw_operator(n, 0, rng);
  // Half the draws force inclusion through t1 = t2·C.
  const ComplexMatrix t1 = rng.uniform() < 0.5 ? t2 * gen::random_operator(n, n, rng)
                                               : draw_operator(n, 0, rng);
  const auto rep = ops::douglas_check(t1, t2);
  TrialOutcome out;
  const bool agree = rep.projector_test == rep.factorization_test &&
                     rep.projector_test == rep.majorization_test;
  out.passed = agree;
  if (rep.range_included) {
    out.passed = out.passed && rep.factorization_residual <= 1e-9 &&
                 rep.majorization_margin >= -1e-9;
    out.margin = rep.majorization_margin;
  }
  return out;
}

TrialOutcome swap_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  const std::size_t m = n + rng.index(4);
  const auto family = static_cast<gen::Family>(rng.index(3));
  auto inst = gen::random_biframe(n, m, family, rng);
  const ComplexMatrix k = draw_operator(n, 0, rng);
  return from_audit(audit::audit_swap(inst.pair, k, audit_options(rng, tol)));
}

TrialOutcome bisection_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  auto inst = positive_instance(n, rng);
  const ComplexMatrix k = draw_operator(n, 1, rng);
  const auto cert = certify::certify_k_biframe(inst.pair, k, tol);
  TrialOutcome out;
  if (!cert.is_k_biframe || cert.a_opt.unbounded) {
    out.applicable = false;
    return out;
  }
  const ComplexMatrix h = frame::hermitian_part(frame::biframe_operator(inst.pair));
  const ComplexMatrix g = k * adjoint(k);
  const double scale = linalg::spectral_norm(h);
  const double a = cert.a_opt.value;
  ComplexMatrix below = h;
  below -= std::max(0.0, a - 2e-9) * g;
  ComplexMatrix above = h;
  above -= (a + 2e-9) * g;
  out.passed = certify::passes_psd(below, scale, tol.ktol) &&
               !certify::passes_psd(above, scale, tol.ktol);
  out.margin = linalg::min_eig_hermitian(below);
  return out;
}

TrialOutcome sum_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  const std::size_t m = n + rng.index(4);
  auto inst = gen::random_triple(n, m, gen::Family::Rescale, rng);
  const ComplexMatrix k = draw_operator(n, 0, rng);
  return from_audit(audit::audit_sum(inst.pair.x(), inst.pair.y(), *inst.z, k,
                                     audit_options(rng, tol)));
}

TrialOutcome linear_combination_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  auto inst = positive_instance(n, rng);
  const std::size_t terms = 2 + rng.index(2);
  std::vector<audit::CombinationTerm> ts;
  for (std::size_t j = 0; j < terms; ++j) {
    ts.push_back({rng.normal(), draw_operator(n, 1, rng)});
  }
  return from_audit(audit::audit_linear_combination(inst.pair, ts, audit_options(rng, tol)));
}

TrialOutcome product_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  auto inst = positive_instance(n, rng);
  std::vector<ComplexMatrix> factors;
  const std::size_t count = 2 + rng.index(2);
  for (std::size_t j = 0; j < count; ++j) {
    factors.push_back(draw_operator(n, j == 0 ? 1 : 0, rng));
  }
  return from_audit(audit::audit_product(inst.pair, factors, audit_options(rng, tol)));
}

TrialOutcome norm_promotion_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  auto inst = positive_instance(n, rng);
  ComplexMatrix k = draw_operator(n, 1, rng);
  k *= 1.5 / linalg::spectral_norm(k);
  return from_audit(audit::audit_norm_promotion(inst.pair, k, audit_options(rng, tol)));
}

TrialOutcome range_transfer_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  auto inst = positive_instance(n, rng);
  const ComplexMatrix k = draw_operator(n, 1, rng);
  ComplexMatrix c = draw_operator(n, 0, rng);
  if (const double cn = linalg::spectral_norm(c); cn > 0.0) {
    c *= rng.uniform(0.1, 1.0) / cn;
  }
  return from_audit(audit::audit_range_transfer(inst.pair, k, k * c, audit_options(rng, tol)));
}

TrialOutcome commuting_transfer_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  auto inst = positive_instance(n, rng);
  const auto tk = gen::random_commuting_pair(n, rng);
  return from_audit(audit::audit_commuting_transfer(inst.pair, tk.k, tk.t, audit_options(rng, tol)));
}

TrialOutcome coisometry_transfer_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  auto inst = positive_instance(n, rng);
  const auto tk = gen::random_commuting_unitary_pair(n, rng);
  return from_audit(
      audit::audit_coisometry_transfer(inst.pair, tk.k, tk.t, audit_options(rng, tol)));
}

TrialOutcome operator_inequality_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  gen::Instance inst = rng.uniform() < 0.25
                           ? deficient_instance(n + 1, 1 + rng.index(n), rng)
                           : gen::random_biframe(n, n + rng.index(4),
                                                 static_cast<gen::Family>(rng.index(3)), rng);
  const ComplexMatrix k = draw_operator(inst.dim(), 0, rng);
  const auto r = audit::audit_operator_inequality(inst.pair, k, audit_options(rng, tol));
  return {true, r.claim_valid, 0.0};
}

TrialOutcome invertibility_on_range_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  auto inst = positive_instance(n, rng);
  const ComplexMatrix k = draw_operator(n, 1, rng);
  auto r = audit::audit_invertibility_on_range(inst.pair, k, audit_options(rng, tol));
  auto out = from_audit(r);
  out.margin = r.metric("sigma_min_restricted").value_or(0.0) - r.metric("kappa").value_or(0.0);
  return out;
}

TrialOutcome sqrt_factorization_trial(gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  const bool deficient = n > 1 && rng.uniform() < 0.3;
  auto inst = deficient ? deficient_instance(n, 1 + rng.index(n - 1), rng)
                        : positive_instance(n, rng);
  const ComplexMatrix k = draw_operator(n, 1, rng);
  const auto r = audit::audit_sqrt_factorization(inst.pair, k, audit_options(rng, tol));
  TrialOutcome out = from_audit(r);
  if (r.certificate && r.certificate->is_k_biframe) {
    const double residual = r.metric("factorization_residual").value_or(1.0);
    out.passed = out.passed && residual <= 1e-8;
    out.margin = 1e-8 - residual;
  }
  return out;
}

TrialOutcome implication_trial(audit::Statement s, gen::Rng& rng, const certify::Tolerances& tol) {
  const std::size_t n = draw_dim(rng);
  gen::Instance inst = rng.uniform() < 0.5 ? gen::gallery("parseval", n) : positive_instance(n, rng);
  inst.k = gen::random_operator(n, n, rng);
  const ComplexMatrix t = draw_operator(n, 0, rng);
  const auto opt = audit_options(rng, tol);
  return from_audit(s == audit::Statement::SurjectivityNecessity
                        ? audit::audit_surjectivity_necessity(inst.pair, inst.k, t, opt)
                        : audit::audit_two_sided_invertibility(inst.pair, inst.k, t, opt));
}

struct Property {
  std::string name;
  Trial trial;
};

const std::vector<Property>& battery() {
  static const std::vector<Property> props = {
      {"douglas_equivalence", douglas_trial},
      {"swap_symmetry", swap_trial},
      {"bisection_soundness", bisection_trial},
      {"sum", sum_trial},
      {"linear_combination", linear_combination_trial},
      {"product", product_trial},
      {"norm_promotion", norm_promotion_trial},
      {"range_transfer", range_transfer_trial},
      {"commuting_transfer", commuting_transfer_trial},
      {"coisometry_transfer", coisometry_transfer_trial},
      {"operator_inequality", operator_inequality_trial},
      {"invertibility_on_range", invertibility_on_range_trial},
      {"sqrt_factorization", sqrt_factorization_trial},
      {"surjectivity_necessity",
       [](gen::Rng& rng, const certify::Tolerances& tol) {
         return implication_trial(audit::Statement::SurjectivityNecessity, rng, tol);
       }},
      {"two_sided_invertibility",
       [](gen::Rng& rng, const certify::Tolerances& tol) {
         return implication_trial(audit::Statement::TwoSidedInvertibility, rng, tol);
       }},
  };
  return props;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

} // namespace

bool SuiteResult::all_passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.ok(); });
}

const PropertyResult* SuiteResult::find(std::string_view name) const {
  for (const auto& p : properties) {
    if (p.name == name) {
      return &p;
    }
  }
  return nullptr;
}

const std::vector<std::string>& property_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& p : battery()) {
      v.push_back(p.name);
    }
    return v;
  }();
  return names;
}

gen::Instance positive_instance(std::size_t n, gen::Rng& rng) {
  const auto family = rng.uniform() < 0.5 ? gen::Family::Rescale : gen::Family::Controlled;
  return gen::random_biframe(n, n + rng.index(4), family, rng);
}

gen::Instance deficient_instance(std::size_t n, std::size_t m, gen::Rng& rng) {
  if (m == 0 || m >= n) {
    throw BadParameters("deficient instance needs 0 < m < n");
  }
  std::vector<ComplexVector> xs;
  std::vector<ComplexVector> ys;
  for (std::size_t i = 0; i < m; ++i) {
    auto x = rng.normal_vector(n);
    ys.push_back(scaled(x, rng.uniform(0.5, 2.0)));
    xs.push_back(std::move(x));
  }
  gen::Instance inst;
  inst.name = "deficient";
  inst.pair = frame::BiframePair({n, std::move(xs)}, {n, std::move(ys)});
  inst.k = ComplexMatrix::identity(n);
  inst.provenance = gen::Provenance::RandomFamily;
  return inst;
}

PropertyResult run_property(std::string_view name, std::uint64_t seed, std::size_t trials,
                            const certify::Tolerances& tol) {
  const auto& props = battery();
  const auto it = std::find_if(props.begin(), props.end(),
                               [&](const Property& p) { return p.name == name; });
  if (it == props.end()) {
    throw UnknownName("unknown property '" + std::string(name) + "'");
  }
  const auto index = static_cast<std::uint64_t>(it - props.begin());
  PropertyResult res;
  res.name = it->name;
  res.trials = trials;
  bool first_margin = true;
  for (std::size_t i = 0; i < trials; ++i) {
    gen::Rng rng(mix(mix(seed) ^ mix(index + 1) ^ (i + 1)));
    const TrialOutcome o = it->trial(rng, tol);
    if (!o.applicable) {
      continue;
    }
    ++res.applicable;
    if (o.passed) {
      ++res.passed;
    } else {
      ++res.failed;
      if (res.failing_trials.size() < kRecordedFailures) {
        res.failing_trials.push_back(i);
      }
    }
    if (first_margin || o.margin < res.worst_margin) {
      res.worst_margin = o.margin;
      first_margin = false;
    }
  }
  return res;
}

SuiteResult run_random_suite(std::uint64_t seed, std::size_t trials,
                             const certify::Tolerances& tol) {
  SuiteResult out;
  out.seed = seed;
  out.trials = trials;
  for (const auto& name : property_names()) {
    out.properties.push_back(run_property(name, seed, trials, tol));
  }
  return out;
}

io::Json suite_to_json(const SuiteResult& r) {
  io::Json props = io::Json::array();
  for (const auto& p : r.properties) {
    props.push_back({{"name", p.name},
                     {"trials", p.trials},
                     {"applicable", p.applicable},
                     {"passed", p.passed},
                     {"failed", p.failed},
                     {"failing_trials", p.failing_trials},
                     {"worst_margin", p.worst_margin}});
  }
  return {{"schema_version", std::string(io::kSchemaVersion)},
          {"kind", "random_suite"},
          {"seed", r.seed},
          {"trials", r.trials},
          {"all_passed", r.all_passed()},
          {"properties", props}};
}

std::string summary_table(const SuiteResult& r) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-26s %7s %10s %7s %7s  %s\n", "property", "trials",
                "applicable", "passed", "failed", "worst margin");
  os << line;
  for (const auto& p : r.properties) {
    std::snprintf(line, sizeof line, "%-26s %7zu %10zu %7zu %7zu  %s%s\n", p.name.c_str(),
                  p.trials, p.applicable, p.passed, p.failed,
                  format_double(p.worst_margin).c_str(), p.ok() ? "" : "  FAIL");
    os << line;
  }
  os << (r.all_passed() ? "all properties passed\n" : "some properties failed\n");
  return os.str();
}

} // namespace kbf::suite
