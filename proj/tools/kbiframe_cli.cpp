#include "kbiframe/audit.hpp"
#include "kbiframe/certifier.hpp"
#include "kbiframe/errors.hpp"
#include "kbiframe/instance_gen.hpp"
#include "kbiframe/io.hpp"
#include "kbiframe/operator_lab.hpp"
#include "kbiframe/suite.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

using kbf::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;

void emit(const Json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    kbf::io::write_document(doc, std::cout);
  } else {
    kbf::io::write_document(doc, std::filesystem::path(out_path));
  }
}

struct TolFlags {
  std::optional<double> herm_tol;
  std::optional<double> bis_tol;

  kbf::certify::Tolerances resolve() const {
    auto tol = kbf::certify::tolerances_from_environment();
    if (herm_tol) {
      tol.herm_tol = *herm_tol;
    }
    if (bis_tol) {
      tol.bis_tol = *bis_tol;
    }
    if (!(tol.herm_tol > 0.0) || !(tol.bis_tol > 0.0)) {
      throw kbf::BadParameters("tolerances must be positive");
    }
    return tol;
  }
};

void add_tol_flags(CLI::App* cmd, TolFlags& flags) {
  cmd->add_option("--herm-tol", flags.herm_tol, "Hermitian-residual tolerance");
  cmd->add_option("--bis-tol", flags.bis_tol, "bisection width for a_opt");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-biframe certification and audit toolkit"};
  app.require_subcommand(1);

  std::string in_path;
  std::string out_path;
  TolFlags tol_flags;

  auto* certify_cmd = app.add_subcommand("certify", "certify an instance as a K-biframe");
  certify_cmd->add_option("--in", in_path, "InstanceFile")->required()->check(CLI::ExistingFile);
  bool as_k_frame = false;
  bool as_biframe = false;
  auto* kf = certify_cmd->add_flag("--k-frame", as_k_frame, "certify X alone as a K-frame");
  auto* bf = certify_cmd->add_flag("--biframe", as_biframe, "ignore k and certify against I");
  kf->excludes(bf);
  certify_cmd->add_option("--out", out_path, "write the certificate here instead of stdout");
  add_tol_flags(certify_cmd, tol_flags);

  auto* bounds_cmd = app.add_subcommand("bounds", "print the optimal bounds a_opt and b_opt");
  bounds_cmd->add_option("--in", in_path, "InstanceFile")->required()->check(CLI::ExistingFile);
  add_tol_flags(bounds_cmd, tol_flags);

  std::string t1_path;
  std::string t2_path;
  auto* douglas_cmd = app.add_subcommand("douglas", "test R(T1) ⊆ R(T2) three ways");
  douglas_cmd->add_option("--t1", t1_path, "matrix file")->required()->check(CLI::ExistingFile);
  douglas_cmd->add_option("--t2", t2_path, "matrix file")->required()->check(CLI::ExistingFile);
  douglas_cmd->add_option("--out", out_path, "write the report here instead of stdout");

  std::string statement_id;
  std::uint64_t seed = 0;
  std::optional<std::size_t> trials;
  auto* audit_cmd = app.add_subcommand("audit", "audit one statement on an instance");
  audit_cmd->add_option("--statement", statement_id, "statement id")->required();
  audit_cmd->add_option("--in", in_path, "InstanceFile")->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--seed", seed, "sampling seed");
  audit_cmd->add_option("--trials", trials,
                        "falsification trials (implication statements) or sampled vectors");
  audit_cmd->add_option("--out", out_path, "write the report here instead of stdout");
  add_tol_flags(audit_cmd, tol_flags);

  std::string gallery_name;
  std::size_t gallery_n = kbf::gen::kDefaultTruncation;
  auto* gallery_cmd = app.add_subcommand("gallery", "write a gallery instance as an InstanceFile");
  gallery_cmd->add_option("--name", gallery_name, "gallery name")->required();
  gallery_cmd->add_option("--n", gallery_n, "truncation dimension (parseval, shift)");
  gallery_cmd->add_option("--out", out_path, "output path (stdout if omitted)");

  std::uint64_t suite_seed = 0;
  std::size_t suite_trials = 50;
  auto* suite_cmd = app.add_subcommand("random-suite", "run the seeded property battery");
  suite_cmd->add_option("--seed", suite_seed, "base seed")->required();
  suite_cmd->add_option("--trials", suite_trials, "trials per property")->required();
  suite_cmd->add_option("--out", out_path, "write the summary JSON here instead of stdout");
  add_tol_flags(suite_cmd, tol_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (certify_cmd->parsed()) {
      const auto inst = kbf::io::load_instance(in_path);
      const auto tol = tol_flags.resolve();
      std::string mode = "k_biframe";
      kbf::certify::KBiframeCertificate cert;
      if (as_k_frame) {
        mode = "k_frame";
        cert = kbf::certify::certify_k_frame(inst.pair.x(), inst.k, tol);
      } else if (as_biframe) {
        mode = "biframe";
        cert = kbf::certify::certify_biframe(inst.pair, tol);
      } else {
        cert = kbf::certify::certify_k_biframe(inst.pair, inst.k, tol);
      }
      emit(kbf::io::certificate_document(cert, kbf::io::input_digest(inst), mode), out_path);
      return cert.is_k_biframe ? kExitOk : kExitNegative;
    }
    if (bounds_cmd->parsed()) {
      const auto inst = kbf::io::load_instance(in_path);
      const auto cert = kbf::certify::certify_k_biframe(inst.pair, inst.k, tol_flags.resolve());
      emit({{"a_opt", kbf::io::lower_bound_to_json(cert.a_opt)}, {"b_opt", cert.b_opt}}, "");
      return kExitOk;
    }
    if (douglas_cmd->parsed()) {
      const auto rep = kbf::ops::douglas_check(kbf::io::load_matrix(t1_path),
                                               kbf::io::load_matrix(t2_path));
      emit(kbf::io::douglas_fields(rep), out_path);
      return rep.range_included ? kExitOk : kExitNegative;
    }
    if (audit_cmd->parsed()) {
      const auto statement = kbf::audit::statement_from_string(statement_id);
      const auto inst = kbf::io::load_instance(in_path);
      kbf::audit::AuditOptions opt;
      opt.tol = tol_flags.resolve();
      opt.seed = seed;
      const bool implication = statement == kbf::audit::Statement::SurjectivityNecessity ||
                               statement == kbf::audit::Statement::TwoSidedInvertibility;
      kbf::audit::AuditReport rep;
      if (implication && trials) {
        rep = kbf::audit::falsification_search(statement, inst, *trials, opt);
      } else {
        if (trials) {
          opt.samples = *trials;
        }
        rep = kbf::audit::run_audit(statement, inst, opt);
      }
      emit(kbf::io::audit_document(rep, kbf::io::input_digest(inst), opt.tol), out_path);
      if (rep.witness) {
        std::cerr << "witness: " << rep.witness->description << " (margin "
                  << rep.witness->margin << ")\n";
      }
      return rep.claim_valid ? kExitOk : kExitNegative;
    }
    if (gallery_cmd->parsed()) {
      emit(kbf::io::instance_to_json(kbf::gen::gallery(gallery_name, gallery_n)), out_path);
      return kExitOk;
    }
    if (suite_cmd->parsed()) {
      const auto result =
          kbf::suite::run_random_suite(suite_seed, suite_trials, tol_flags.resolve());
      std::cerr << kbf::suite::summary_table(result);
      emit(kbf::suite::suite_to_json(result), out_path);
      return result.all_passed() ? kExitOk : kExitNegative;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
