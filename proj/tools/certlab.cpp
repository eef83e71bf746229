// SPDX-License-Identifier: Apache-2.0
//
// certlab: command-line front door for the state-certification lab.
// Exit codes: 0 success / verdict equal, 1 verdict far, 2 input error,
// 3 internal check failure.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "certlab/corpus.hpp"
#include "certlab/io.hpp"
#include "certlab/verify.hpp"

namespace {

using namespace certlab;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CERTLAB_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 20250809ULL;
}

std::string timestamp_now() {
  char buf[32];
  const std::time_t t = std::time(nullptr);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct OutputSink {
  std::string command;
  std::vector<std::string> args;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;

  void note_input(const std::string& path) { inputs.emplace_back(path, file_digest(path)); }

  /// Writes JSON to `path` (or stdout when empty) plus a sibling manifest.
  void deliver(const Json& j, const std::string& path) const {
    if (path.empty()) {
      std::cout << j.dump(2) << "\n";
      return;
    }
    emit_json(j, path);
    write_manifest_for({path});
  }

  void write_manifest_for(const std::vector<std::string>& outputs) const {
    if (outputs.empty()) return;
    RunManifest m;
    m.command = command;
    m.args = args;
    m.seed = seed;
    m.version = kToolVersion;
    m.timestamp = timestamp_now();
    m.inputs = inputs;
    m.outputs = outputs;
    write_manifest(m, outputs.front() + ".manifest.json");
  }
};

HSOracleSpec parse_oracle(const std::string& text) {
  if (text == "ideal") return {HSOracleSpec::Kind::ideal, 0.0};
  if (text == "statistical") return {HSOracleSpec::Kind::statistical, 0.0};
  if (text.rfind("noisy:", 0) == 0) {
    return {HSOracleSpec::Kind::noisy, std::stod(text.substr(6))};
  }
  fail(ErrorKind::ConfigInvalid, "oracle must be ideal, statistical or noisy:p");
}

int run(int argc, char** argv) {
  CLI::App app{"state-certification lab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = default_seed();
  double tol = kDefaultTol;
  app.add_option("--seed", seed, "rng seed (env CERTLAB_SEED overrides the default)");
  app.add_option("--tol", tol, "validation tolerance");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "copy-complexity report for a state");
  std::string analyze_in, analyze_out, sweep, analyze_format = "json";
  double analyze_eps = 1.0 / 24.0;
  analyze_cmd->add_option("--in", analyze_in, "sigma (spectrum or density json)")->required();
  analyze_cmd->add_option("--eps", analyze_eps, "certification distance");
  analyze_cmd->add_option("--out", analyze_out, "output path (stdout if absent)");
  analyze_cmd->add_option("--format", analyze_format, "json|csv");
  analyze_cmd->add_option("--sweep", sweep, "emit CSV sweeping 'd' (flat states) or 'eps'");

  // bucket
  auto* bucket_cmd = app.add_subcommand("bucket", "dump a bucketing scheme");
  std::string bucket_scheme = "lower", bucket_in, bucket_out;
  double bucket_eps = 0.05;
  bucket_cmd->add_option("--scheme", bucket_scheme, "lower|upper")->required();
  bucket_cmd->add_option("--eps", bucket_eps, "epsilon")->required();
  bucket_cmd->add_option("--in", bucket_in, "spectrum json")->required();
  bucket_cmd->add_option("--out", bucket_out, "output path");

  // instance
  auto* instance_cmd = app.add_subcommand("instance", "generate hard-instance states");
  std::string inst_family, inst_sigma, inst_dir = ".";
  int inst_dim = 4, inst_count = 1;
  double inst_eps = 0.1;
  instance_cmd
      ->add_option("--family", inst_family,
                   "paninski|nearly-mixed|bucketed|rotation|two-by-two|classical")
      ->required();
  instance_cmd->add_option("--dim", inst_dim, "dimension (families without --sigma)");
  instance_cmd->add_option("--sigma", inst_sigma, "base state file");
  instance_cmd->add_option("--eps", inst_eps, "farness parameter")->required();
  instance_cmd->add_option("--count", inst_count, "number of samples");
  instance_cmd->add_option("--out", inst_dir, "output directory")->required();

  // divergence
  auto* div_cmd = app.add_subcommand("divergence", "chi-square divergence estimates");
  std::string div_family, div_sigma, div_mode = "exact", div_out;
  int div_dim = 4, div_n = 1;
  std::size_t div_samples = 100000;
  double div_eps = 0.2;
  div_cmd->add_option("--family", div_family, "family kind")->required();
  div_cmd->add_option("--sigma", div_sigma, "base state file");
  div_cmd->add_option("--dim", div_dim, "dimension");
  div_cmd->add_option("--eps", div_eps, "family parameter");
  div_cmd->add_option("--n", div_n, "copies")->required();
  div_cmd->add_option("--mode", div_mode, "exact|mc");
  div_cmd->add_option("--samples", div_samples, "MC pair samples");
  div_cmd->add_option("--out", div_out, "output path");

  // certify
  auto* cert_cmd = app.add_subcommand("certify", "run the certification simulation");
  std::string cert_sigma, cert_rho, cert_oracle = "ideal", cert_out;
  double cert_eps = 0.2, cert_delta = 0.05;
  cert_cmd->add_option("--sigma", cert_sigma, "hypothesis state")->required();
  cert_cmd->add_option("--rho", cert_rho, "unknown state")->required();
  cert_cmd->add_option("--eps", cert_eps, "distance parameter");
  cert_cmd->add_option("--delta", cert_delta, "failure probability");
  cert_cmd->add_option("--oracle", cert_oracle, "ideal|noisy:p|statistical");
  cert_cmd->add_option("--out", cert_out, "output path");

  // haar verify
  auto* haar_cmd = app.add_subcommand("haar", "haar-measure utilities");
  auto* haar_verify = haar_cmd->add_subcommand("verify", "check the mgf concentration bound");
  int haar_dim = 8;
  std::size_t haar_samples = 100000;
  double haar_t = 0.2;
  std::string haar_out;
  haar_verify->add_option("--dim", haar_dim, "dimension");
  haar_verify->add_option("--samples", haar_samples, "sample count");
  haar_verify->add_option("--t", haar_t, "statistic scale");
  haar_verify->add_option("--out", haar_out, "output path");

  // corpus run
  auto* corpus_cmd = app.add_subcommand("corpus", "acceptance corpus");
  auto* corpus_run_cmd = corpus_cmd->add_subcommand("run", "run the frozen corpus");
  int corpus_seeds = 20;
  double corpus_eps = 0.2, corpus_delta = 0.02;
  std::string corpus_out;
  corpus_run_cmd->add_option("--seeds", corpus_seeds, "seeds per cell");
  corpus_run_cmd->add_option("--eps", corpus_eps, "epsilon");
  corpus_run_cmd->add_option("--delta", corpus_delta, "delta");
  corpus_run_cmd->add_option("--out", corpus_out, "CSV output path");

  // verify-all
  auto* verify_cmd = app.add_subcommand("verify-all", "run the whole verification battery");
  std::string verify_level = "quick", verify_out;
  verify_cmd->add_option("--level", verify_level, "quick|full");
  verify_cmd->add_option("--out", verify_out, "output path");

  CLI11_PARSE(app, argc, argv);

  OutputSink sink;
  sink.seed = seed;
  for (int i = 1; i < argc; ++i) sink.args.push_back(argv[i]);

  if (analyze_cmd->parsed()) {
    sink.command = "analyze";
    sink.note_input(analyze_in);
    const Spectrum spec = parse_spectrum(analyze_in, tol);
    if (sweep.empty()) {
      const ComplexityReport report = analyze(spec, analyze_eps);
      if (analyze_format == "csv") {
        if (analyze_out.empty()) fail(ErrorKind::ConfigInvalid, "--format csv needs --out");
        emit_csv({"lower_tuned", "lower_classical", "lower_corner", "lower_nearly_mixed",
                  "lower_best", "upper"},
                 {{report.lower_tuned.value_or(0.0), report.lower_classical.value_or(0.0),
                   report.lower_corner.value_or(0.0),
                   report.lower_nearly_mixed.value_or(0.0), report.lower_best,
                   report.upper.value_or(0.0)}},
                 analyze_out);
        sink.write_manifest_for({analyze_out});
      } else {
        sink.deliver(report_to_json(report), analyze_out);
      }
      return 0;
    }
    std::vector<std::vector<double>> rows;
    if (sweep == "d") {
      for (int d : {4, 8, 16, 32, 64}) {
        std::vector<double> flat(d, 1.0 / d);
        const ComplexityReport r = analyze(Spectrum{flat, SpectrumOrder::unspecified},
                                           analyze_eps);
        rows.push_back({static_cast<double>(d), r.lower_best, r.upper.value_or(0.0)});
      }
    } else if (sweep == "eps") {
      for (double e : {1.0 / 96.0, 1.0 / 72.0, 1.0 / 48.0, 1.0 / 36.0, 1.0 / 24.0}) {
        const ComplexityReport r = analyze(spec, e);
        rows.push_back({e, r.lower_best, r.upper.value_or(0.0)});
      }
    } else {
      fail(ErrorKind::ConfigInvalid, "--sweep must be d or eps");
    }
    if (analyze_out.empty()) fail(ErrorKind::ConfigInvalid, "--sweep needs --out");
    emit_csv({"parameter", "lower_best", "upper"}, rows, analyze_out);
    sink.write_manifest_for({analyze_out});
    return 0;
  }

  if (bucket_cmd->parsed()) {
    sink.command = "bucket";
    sink.note_input(bucket_in);
    const Spectrum spec = parse_spectrum(bucket_in, tol);
    Json j;
    if (bucket_scheme == "lower") {
      const LowerBucketing b = lower_bucketing(spec, bucket_eps);
      Json buckets = Json::object();
      for (const auto& [jj, members] : b.buckets) buckets[std::to_string(jj)] = members;
      j["scheme"] = "lower";
      j["buckets"] = buckets;
      j["tail"] = b.tail;
      j["d_prime"] = b.d_prime;
      j["singletons"] = b.singletons;
      j["many"] = b.many;
      j["i_max"] = b.i_max;
      j["peripheral"] = b.peripheral;
      j["sort_permutation"] = b.sort_permutation;
      j["sigma_star_half"] = quasinorm_half(b.sigma_star);
      j["sigma_prime_half"] = quasinorm_half(b.sigma_prime);
      j["J_star"] = b.J_star;
      j["J_prime"] = b.J_prime;
    } else if (bucket_scheme == "upper") {
      const UpperBucketing b = upper_bucketing(spec, bucket_eps);
      Json buckets = Json::object();
      for (const auto& [jj, members] : b.buckets) buckets[std::to_string(jj)] = members;
      j["scheme"] = "upper";
      j["buckets"] = buckets;
      j["tail"] = b.tail;
      j["d_star"] = b.d_star;
      j["m"] = b.m;
      j["sigma_star_half"] = quasinorm_half(b.sigma_star);
    } else {
      fail(ErrorKind::ConfigInvalid, "--scheme must be lower or upper");
    }
    sink.deliver(j, bucket_out);
    return 0;
  }

  if (instance_cmd->parsed()) {
    sink.command = "instance";
    std::filesystem::create_directories(inst_dir);
    DensityMatrix sigma;
    if (!inst_sigma.empty()) {
      sink.note_input(inst_sigma);
      sigma = load_density(inst_sigma, tol);
      inst_dim = sigma.dim();
    }
    PerturbationFamily family = [&]() {
      if (inst_family == "paninski") {
        return PerturbationFamily::make_quantum_paninski(inst_dim, inst_eps);
      }
      if (inst_family == "nearly-mixed") {
        return PerturbationFamily::make_nearly_mixed(sigma, inst_eps);
      }
      if (inst_family == "bucketed") {
        const LowerBucketing b = lower_bucketing(sigma.spectrum_descending(), inst_eps);
        return PerturbationFamily::make_bucketed(b, tune_perturbations(b, inst_eps).eps_j);
      }
      if (inst_family == "rotation") return PerturbationFamily::make_rotation_pair(sigma, inst_eps);
      if (inst_family == "two-by-two") return PerturbationFamily::make_two_by_two(sigma, inst_eps);
      if (inst_family == "classical") {
        return PerturbationFamily::make_classical_paninski(inst_dim, inst_eps);
      }
      fail(ErrorKind::ConfigInvalid, "unknown family " + inst_family);
    }();

    RngStream rng(seed, 0);
    Json cert = Json::array();
    std::vector<std::string> outputs;
    for (int k = 0; k < inst_count; ++k) {
      const DensityMatrix rho = family.sample(rng);
      const std::string path = inst_dir + "/rho_" + std::to_string(k) + ".json";
      save_density(rho, path);
      outputs.push_back(path);
      cert.push_back({{"path", path},
                      {"farness_certificate", family.farness()},
                      {"trace_distance_x2", 2.0 * trace_distance(rho, family.base())}});
    }
    Json manifest_extra;
    manifest_extra["family"] = family.name();
    manifest_extra["eps"] = inst_eps;
    manifest_extra["certificates"] = cert;
    const std::string summary_path = inst_dir + "/instances.json";
    emit_json(manifest_extra, summary_path);
    outputs.insert(outputs.begin(), summary_path);
    sink.write_manifest_for(outputs);
    return 0;
  }

  if (div_cmd->parsed()) {
    sink.command = "divergence";
    DensityMatrix sigma;
    if (!div_sigma.empty()) {
      sink.note_input(div_sigma);
      sigma = load_density(div_sigma, tol);
      div_dim = sigma.dim();
    } else {
      std::vector<double> flat(div_dim, 1.0 / div_dim);
      sigma = diagonal_density(flat);
    }
    PerturbationFamily family = [&]() {
      if (div_family == "paninski") {
        return PerturbationFamily::make_quantum_paninski(div_dim, div_eps);
      }
      if (div_family == "nearly-mixed") {
        return PerturbationFamily::make_nearly_mixed(sigma, div_eps);
      }
      if (div_family == "rotation") return PerturbationFamily::make_rotation_pair(sigma, div_eps);
      if (div_family == "two-by-two") return PerturbationFamily::make_two_by_two(sigma, div_eps);
      if (div_family == "classical") {
        return PerturbationFamily::make_classical_paninski(div_dim, div_eps);
      }
      fail(ErrorKind::ConfigInvalid, "unknown family " + div_family);
    }();

    DivergenceEstimate est;
    if (div_mode == "exact") {
      est = chi2_kernel_exact(family, sigma, div_n);
    } else if (div_mode == "mc") {
      est = chi2_kernel_mc(family, sigma, div_n, div_samples, RngSeed{seed, 0});
    } else {
      fail(ErrorKind::ConfigInvalid, "--mode must be exact or mc");
    }
    sink.deliver(divergence_to_json(est), div_out);
    return 0;
  }

  if (cert_cmd->parsed()) {
    sink.command = "certify";
    sink.note_input(cert_sigma);
    sink.note_input(cert_rho);
    const DensityMatrix sigma = load_density(cert_sigma, tol);
    const DensityMatrix rho = load_density(cert_rho, tol);
    CertifierConfig config;
    config.eps = cert_eps;
    config.delta = cert_delta;
    config.oracle = parse_oracle(cert_oracle);
    config.seed = RngSeed{seed, 0};
    const CertifyResult result = certify(rho, sigma, config);
    sink.deliver(certify_to_json(result), cert_out);
    return result.verdict == Verdict::far ? 1 : 0;
  }

  if (haar_verify->parsed()) {
    sink.command = "haar verify";
    RngStream rng(seed, 0);
    const SignedDiagonal sd = SignedDiagonal::make(haar_dim, 1.0);
    const MgfCheck check = verify_mgf_bound(haar_dim, sd.entries, haar_t, haar_samples, rng);
    Json j;
    j["empirical"] = check.empirical_mgf;
    j["bound"] = check.bound;
    j["std_error"] = check.std_error;
    j["pass"] = check.pass;
    sink.deliver(j, haar_out);
    return check.pass ? 0 : 3;
  }

  if (corpus_run_cmd->parsed()) {
    sink.command = "corpus run";
    const CorpusRun run =
        corpus_run(corpus_eps, corpus_delta, corpus_seeds, RngSeed{seed, 0}, UnitConstants{});
    std::cout << "min cell accuracy: " << run.min_cell_accuracy() << "\n";
    std::cout << "ledger slope: " << run.ledger_slope() << "\n";
    std::cout << "trichotomy: " << (run.trichotomy_ok ? "ok" : "VIOLATED") << " over "
              << run.trichotomy_checked << " instances\n";
    if (!corpus_out.empty()) {
      std::vector<std::vector<double>> rows;
      std::ofstream out(corpus_out);
      if (!out) fail(ErrorKind::IoError, "cannot write " + corpus_out);
      out << "state,family,correct,runs\n";
      for (const auto& cell : run.cells) {
        out << cell.state << "," << cell.family << "," << cell.correct << "," << cell.runs
            << "\n";
      }
      sink.write_manifest_for({corpus_out});
    }
    return run.min_cell_accuracy() >= 0.95 && run.trichotomy_ok ? 0 : 3;
  }

  if (verify_cmd->parsed()) {
    sink.command = "verify-all";
    const VerifyLevel level = verify_level == "full" ? VerifyLevel::full : VerifyLevel::quick;
    const std::vector<CheckResult> results = run_battery(seed, level);
    bool all = true;
    Json rows = Json::array();
    for (const auto& r : results) {
      all = all && r.pass;
      std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "  (" << r.detail << ")\n";
      rows.push_back({{"name", r.name}, {"pass", r.pass}, {"margin", r.margin},
                      {"detail", r.detail}});
    }
    if (!verify_out.empty()) {
      Json j;
      j["level"] = verify_level;
      j["checks"] = rows;
      sink.deliver(j, verify_out);
    }
    std::cout << (all ? "all checks passed" : "CHECK FAILURES PRESENT") << "\n";
    return all ? 0 : 3;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const certlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case certlab::ErrorKind::IoError:
      case certlab::ErrorKind::ParseError:
      case certlab::ErrorKind::InvariantViolation:
      case certlab::ErrorKind::ConfigInvalid:
        return 2;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
