#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hops/ensemble.hpp"
#include "hops/fock.hpp"
#include "hops/io_util.hpp"
#include "hops/measurement.hpp"
#include "hops/pcmi.hpp"
#include "hops/polarization.hpp"
#include "hops/version.hpp"

namespace {

using hops::Complex;
using nlohmann::json;

std::string threshold_text(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1e", value);
  return buf;
}

std::string value_text(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", value);
  return buf;
}

struct GenerateOpts {
  std::string kind;
  double chi = 0.0, delta = 0.0;
  double chi_h = 0.0, delta_h = 0.0;
  double a0 = 1.0;
  std::vector<double> a0_uniform;
  double a0_rayleigh = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct ReportOpts {
  std::string in;
  bool json_out = false;
};

struct PcmiOpts {
  std::string in, out;
  double delta_m = 0.0, delta_pcm = 0.0;
  bool json_out = false;
};

struct VerifyOpts {
  int cutoff = 6;
  bool json_out = false;
  std::string dump_dir;
};

struct MeasureOpts {
  std::string in, out, trace, scheme = "direct";
  double efficiency = 1.0;
  std::size_t shots = 1000;
  std::uint64_t seed = 0;
  bool json_out = false;
};

void run_generate(const GenerateOpts& opts, const CLI::App& cmd) {
  const bool has_pol = cmd.count("--chi") || cmd.count("--delta");
  const bool has_hid = cmd.count("--chi-h") || cmd.count("--delta-h");

  hops::EnsembleKind kind = hops::EnsembleKind::unpolarized();
  if (opts.kind == "polarized") {
    if (!cmd.count("--chi") || !cmd.count("--delta") || has_hid)
      throw CLI::ValidationError(
          "--kind polarized takes --chi and --delta, no hidden angles");
    kind = hops::EnsembleKind::polarized(opts.chi, opts.delta);
  } else if (opts.kind == "hops") {
    if (!cmd.count("--chi-h") || !cmd.count("--delta-h") || has_pol)
      throw CLI::ValidationError(
          "--kind hops takes --chi-h and --delta-h, no polarized angles");
    kind = hops::EnsembleKind::hops(opts.chi_h, opts.delta_h);
  } else if (has_pol || has_hid) {
    throw CLI::ValidationError("--kind unpolarized takes no angle flags");
  }

  hops::AmplitudeDist dist = hops::AmplitudeDist::constant(opts.a0);
  if (cmd.count("--a0-uniform"))
    dist = hops::AmplitudeDist::uniform(opts.a0_uniform[0],
                                        opts.a0_uniform[1]);
  else if (cmd.count("--a0-rayleigh"))
    dist = hops::AmplitudeDist::rayleigh(opts.a0_rayleigh);

  const hops::FieldEnsemble ensemble =
      hops::generate_ensemble(kind, {dist, opts.seed}, opts.n);
  hops::write_ensemble_csv(ensemble, std::filesystem::path(opts.out));

  json meta;
  meta["artifact"] = hops::kArtifactName;
  meta["command"] = "generate";
  meta["kind"] = opts.kind;
  meta["n"] = opts.n;
  json params;
  if (opts.kind == "polarized") {
    params["chi"] = opts.chi;
    params["delta"] = opts.delta;
  } else if (opts.kind == "hops") {
    params["chi_h"] = opts.chi_h;
    params["delta_h"] = opts.delta_h;
  }
  switch (dist.law) {
    case hops::AmplitudeDist::Law::Constant:
      params["a0"] = dist.a0;
      break;
    case hops::AmplitudeDist::Law::Uniform:
      params["a0_uniform"] = {dist.lo, dist.hi};
      break;
    case hops::AmplitudeDist::Law::Rayleigh:
      params["a0_rayleigh"] = dist.scale;
      break;
  }
  meta["params"] = params;
  meta["seed"] = opts.seed;
  meta["version"] = hops::kArtifactVersion;
  hops::atomic_write_file(opts.out + ".meta.json", meta.dump(2) + "\n");

  std::cout << "wrote " << ensemble.samples.size() << " " << opts.kind
            << " samples to " << opts.out << "\n";
}

void run_stokes(const ReportOpts& opts) {
  const auto ensemble = hops::read_ensemble_csv(std::filesystem::path(opts.in));
  const auto stokes = hops::classical_stokes(ensemble);
  if (opts.json_out)
    std::cout << hops::to_json(stokes) << "\n";
  else
    std::cout << hops::to_text(stokes);
}

void run_hidden(const ReportOpts& opts) {
  const auto ensemble = hops::read_ensemble_csv(std::filesystem::path(opts.in));
  const auto hidden = hops::classical_hidden(ensemble);
  if (opts.json_out)
    std::cout << hops::to_json(hidden) << "\n";
  else
    std::cout << hops::to_text(hidden);
}

int run_pcmi(const PcmiOpts& opts) {
  const auto input = hops::read_ensemble_csv(std::filesystem::path(opts.in));
  if (input.kind.tag == hops::EnsembleKind::Tag::Unpolarized)
    throw std::invalid_argument(
        "pcmi: input ensemble must be polarized or hidden-polarized");

  hops::DeviceConfig config;
  config.delta_m = opts.delta_m;
  config.delta_pcm = opts.delta_pcm;
  const hops::FieldEnsemble output = hops::pcmi_run(input, config);
  if (!opts.out.empty()) {
    hops::write_ensemble_csv(output, std::filesystem::path(opts.out));
    json meta;
    meta["artifact"] = hops::kArtifactName;
    meta["command"] = "pcmi";
    meta["delta_m"] = opts.delta_m;
    meta["delta_pcm"] = opts.delta_pcm;
    meta["input"] = opts.in;
    meta["n"] = output.samples.size();
    meta["version"] = hops::kArtifactVersion;
    hops::atomic_write_file(opts.out + ".meta.json", meta.dump(2) + "\n");
  }

  if (input.kind.tag == hops::EnsembleKind::Tag::Polarized) {
    const auto cert = hops::hops_certificate(output, input.kind.chi,
                                             input.kind.delta, config);
    if (opts.json_out)
      std::cout << hops::to_json(cert) << "\n";
    else
      std::cout << hops::to_text(cert);
    return cert.pass ? 0 : 1;
  }
  // hidden-polarized input: the device undoes the conjugation, so audit the
  // restored ensemble for ordinary polarization instead
  const auto audit = hops::randomness_audit(output);
  if (opts.json_out)
    std::cout << hops::to_json(audit) << "\n";
  else
    std::cout << hops::to_text(audit);
  return audit.classification == hops::PolarizationClass::Polarized ? 0 : 1;
}

int run_verify(const VerifyOpts& opts) {
  const hops::FockSpace space(opts.cutoff);
  const auto algebra = hops::verify_algebra(space);
  const auto detection = hops::identity_audit(space);

  if (!opts.dump_dir.empty()) {
    const std::filesystem::path dir(opts.dump_dir);
    const auto S = hops::stokes_ops(space);
    const auto H = hops::hidden_ops(space);
    for (int k = 0; k < 4; ++k) {
      const std::string id = std::to_string(k);
      hops::write_matrix_csv(S[k].matrix, space, "S" + id,
                             dir / ("s" + id + ".csv"));
      hops::write_matrix_csv(H[k].matrix, space, "H" + id,
                             dir / ("h" + id + ".csv"));
    }
  }

  // fixed reference states, roomy cutoff so truncation sits far below the
  // thresholds
  const int scenario_cutoff = 12;
  const hops::FockSpace big(scenario_cutoff);

  struct Criterion {
    std::string label;
    double value;
    double threshold;
    bool pass;
  };
  std::vector<Criterion> criteria;
  auto push = [&criteria](std::string label, double value, double threshold) {
    criteria.push_back({std::move(label), value, threshold,
                        value <= threshold});
  };

  const Complex ratio{0.5, 0.3};
  const Complex alpha_x{0.8, 0.0};
  const auto coherent =
      hops::coherent_state(alpha_x, ratio * alpha_x, big);
  push("polarized coherent: criterion residual",
       hops::check_polarization_criterion(coherent, ratio), 1e-8);
  push("polarized coherent: factorization residual, order 2",
       hops::check_factorization(coherent, ratio,
                                 hops::CriterionKind::Polarized, 2)
           .worst_residual,
       1e-6);

  const auto mixture =
      hops::hops_mixture(0.5 * hops::pi, 0.0, 0.7, 64, big);
  const Complex hidden_index{1.0, 0.0};  // tan(chi_h/2) e^{i delta_h}
  push("hops mixture: criterion residual",
       hops::check_hops_criterion(mixture, hidden_index), 1e-8);
  push("hops mixture: factorization residual, order 2",
       hops::check_factorization(mixture, hidden_index,
                                 hops::CriterionKind::Hops, 2)
           .worst_residual,
       1e-6);
  const auto S = hops::stokes_ops(big);
  for (int k = 1; k <= 3; ++k)
    push("hops mixture: |<S" + std::to_string(k) + ">|",
         std::abs(hops::expectation(mixture, S[k])), 1e-8);

  struct UncRow {
    std::string label;
    hops::UncertaintyCheck check;
  };
  std::vector<UncRow> uncertainty;
  uncertainty.push_back(
      {"vacuum", hops::uncertainty_check(hops::vacuum_state(big), 2, 3)});
  uncertainty.push_back(
      {"coherent(0.5, 0.5)",
       hops::uncertainty_check(
           hops::coherent_state({0.5, 0.0}, {0.5, 0.0}, big), 2, 3)});
  uncertainty.push_back(
      {"hops mixture", hops::uncertainty_check(mixture, 2, 3)});

  bool all_pass = algebra.all_pass && detection.all_pass;
  for (const auto& c : criteria) all_pass = all_pass && c.pass;
  for (const auto& u : uncertainty) all_pass = all_pass && u.check.satisfied;

  if (opts.json_out) {
    json j;
    j["algebra"] = json::parse(hops::to_json(algebra));
    j["all_pass"] = all_pass;
    j["criteria"] = json::array();
    for (const auto& c : criteria)
      j["criteria"].push_back({{"label", c.label},
                               {"value", c.value},
                               {"threshold", c.threshold},
                               {"pass", c.pass}});
    j["detection"] = json::parse(hops::to_json(detection));
    j["scenario_cutoff"] = scenario_cutoff;
    j["uncertainty"] = json::array();
    for (const auto& u : uncertainty)
      j["uncertainty"].push_back({{"label", u.label},
                                  {"var_j", u.check.var_j},
                                  {"var_k", u.check.var_k},
                                  {"bound", u.check.bound},
                                  {"satisfied", u.check.satisfied}});
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << hops::to_text(algebra);
    std::cout << hops::to_text(detection);
    std::cout << "state criteria at cutoff " << scenario_cutoff << "\n";
    for (const auto& c : criteria)
      std::cout << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.label
                << " = " << value_text(c.value) << "  (threshold "
                << threshold_text(c.threshold) << ")\n";
    std::cout << "uncertainty product Var(H2) Var(H3) vs |<[H2,H3]>/2|^2\n";
    for (const auto& u : uncertainty)
      std::cout << "  " << (u.check.satisfied ? "pass" : "FAIL") << "  "
                << u.label << ": " << value_text(u.check.var_j) << " * "
                << value_text(u.check.var_k) << " >= "
                << value_text(u.check.bound) << "\n";
    std::cout << "overall: " << (all_pass ? "PASS" : "FAIL") << "\n";
  }
  return all_pass ? 0 : 1;
}

void run_measure(const MeasureOpts& opts) {
  const auto ensemble = hops::read_ensemble_csv(std::filesystem::path(opts.in));
  hops::Scheme scheme = hops::Scheme::Direct;
  if (opts.scheme == "rotated45")
    scheme = hops::Scheme::Rotated45;
  else if (opts.scheme == "phase-shifted-rotated45")
    scheme = hops::Scheme::PhaseShiftedRotated;

  const hops::DetectorModel det{opts.efficiency};
  const auto records =
      hops::simulate_counts(ensemble, scheme, det, opts.shots, opts.seed);
  hops::write_counts_csv(records, scheme, std::filesystem::path(opts.out));
  const auto trace = hops::estimate_trace(records, scheme);
  const std::string trace_path =
      opts.trace.empty() ? opts.out + ".trace.csv" : opts.trace;
  hops::write_trace_csv(trace, std::filesystem::path(trace_path));

  json meta;
  meta["artifact"] = hops::kArtifactName;
  meta["command"] = "measure";
  meta["efficiency"] = opts.efficiency;
  meta["input"] = opts.in;
  meta["scheme"] = opts.scheme;
  meta["seed"] = opts.seed;
  meta["shots_per_sample"] = opts.shots;
  meta["trace"] = trace_path;
  meta["version"] = hops::kArtifactVersion;
  hops::atomic_write_file(opts.out + ".meta.json", meta.dump(2) + "\n");

  const auto report = hops::estimate(records, scheme);
  if (opts.json_out)
    std::cout << hops::to_json(report) << "\n";
  else
    std::cout << hops::to_text(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hidden optical-polarization workbench"};
  app.set_version_flag("--version", std::string(hops::kArtifactVersion));
  app.set_config("--config", "", "read options from a key=value file");
  app.require_subcommand(1);

  int rc = 0;

  GenerateOpts gen_opts;
  auto* gen = app.add_subcommand(
      "generate", "draw a field ensemble and write it as CSV");
  gen->add_option("--kind", gen_opts.kind,
                  "ensemble kind: polarized, hops, or unpolarized")
      ->required()
      ->check(CLI::IsMember({"polarized", "hops", "unpolarized"}));
  gen->add_option("--chi", gen_opts.chi,
                  "polar angle in [0, pi] (polarized kind)");
  gen->add_option("--delta", gen_opts.delta,
                  "phase difference in (-pi, pi] (polarized kind)");
  gen->add_option("--chi-h", gen_opts.chi_h,
                  "hidden polar angle in [0, pi] (hops kind)");
  gen->add_option("--delta-h", gen_opts.delta_h,
                  "hidden phase sum in (-pi, pi] (hops kind)");
  auto* a0_opt =
      gen->add_option("--a0", gen_opts.a0, "fixed overall amplitude")
          ->capture_default_str();
  auto* a0u_opt = gen->add_option("--a0-uniform", gen_opts.a0_uniform,
                                  "amplitude uniform on [LO, HI]")
                      ->expected(2);
  auto* a0r_opt = gen->add_option("--a0-rayleigh", gen_opts.a0_rayleigh,
                                  "amplitude Rayleigh with scale SIGMA");
  a0_opt->excludes(a0u_opt)->excludes(a0r_opt);
  a0u_opt->excludes(a0r_opt);
  gen->add_option("--n", gen_opts.n, "number of samples")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_opts.seed, "RNG seed")->capture_default_str();
  gen->add_option("--out", gen_opts.out, "output CSV path")->required();
  gen->callback([&] { run_generate(gen_opts, *gen); });

  ReportOpts stokes_opts;
  auto* stokes = app.add_subcommand(
      "stokes", "classical Stokes parameters of an ensemble");
  stokes->add_option("--in", stokes_opts.in, "input ensemble CSV")
      ->required();
  stokes->add_flag("--json", stokes_opts.json_out, "emit JSON");
  stokes->callback([&] { run_stokes(stokes_opts); });

  ReportOpts hidden_opts;
  auto* hidden = app.add_subcommand(
      "hidden", "classical hidden-polarization parameters of an ensemble");
  hidden->add_option("--in", hidden_opts.in, "input ensemble CSV")
      ->required();
  hidden->add_flag("--json", hidden_opts.json_out, "emit JSON");
  hidden->callback([&] { run_hidden(hidden_opts); });

  PcmiOpts pcmi_opts;
  auto* pcmi = app.add_subcommand(
      "pcmi", "run an ensemble through the conjugating interferometer");
  pcmi->add_option("--in", pcmi_opts.in, "input ensemble CSV")->required();
  pcmi->add_option("--out", pcmi_opts.out, "output ensemble CSV");
  pcmi->add_option("--delta-m", pcmi_opts.delta_m,
                   "mirror reflection phase in (-pi, pi]")
      ->capture_default_str();
  pcmi->add_option("--delta-pcm", pcmi_opts.delta_pcm,
                   "conjugating-mirror phase in (-pi, pi]")
      ->capture_default_str();
  pcmi->add_flag("--json", pcmi_opts.json_out, "emit JSON");
  pcmi->callback([&] { rc = run_pcmi(pcmi_opts); });

  VerifyOpts verify_opts;
  auto* verify = app.add_subcommand(
      "verify", "operator algebra, detection identities, state criteria");
  verify->add_option("--cutoff", verify_opts.cutoff,
                     "Fock cutoff for the algebra checks")
      ->capture_default_str()
      ->check(CLI::Range(3, 10));
  verify->add_option("--dump-operators", verify_opts.dump_dir,
                     "write the operator matrices as CSVs into this directory");
  verify->add_flag("--json", verify_opts.json_out, "emit JSON");
  verify->callback([&] { rc = run_verify(verify_opts); });

  MeasureOpts measure_opts;
  auto* measure = app.add_subcommand(
      "measure", "simulate photon counting on an ensemble");
  measure->add_option("--in", measure_opts.in, "input ensemble CSV")
      ->required();
  measure->add_option("--scheme", measure_opts.scheme,
                      "direct, rotated45, or phase-shifted-rotated45")
      ->capture_default_str()
      ->check(CLI::IsMember(
          {"direct", "rotated45", "phase-shifted-rotated45"}));
  measure->add_option("--efficiency", measure_opts.efficiency,
                      "detector efficiency in (0, 1]")
      ->capture_default_str();
  measure->add_option("--shots-per-sample", measure_opts.shots,
                      "counting shots per ensemble sample")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  measure->add_option("--seed", measure_opts.seed, "RNG seed")
      ->capture_default_str();
  measure->add_option("--out", measure_opts.out, "output counts CSV")
      ->required();
  measure->add_option("--trace", measure_opts.trace,
                      "convergence trace CSV (default: OUT.trace.csv)");
  measure->add_flag("--json", measure_opts.json_out, "emit JSON");
  measure->callback([&] { run_measure(measure_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const hops::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hops::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}
