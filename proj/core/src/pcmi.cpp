#include "hops/pcmi.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "stat_util.hpp"

namespace hops {

using nlohmann::json;

void validate(const DeviceConfig& config) {
  if (!(config.delta_m > -pi && config.delta_m <= pi))
    throw std::invalid_argument(
        "DeviceConfig: delta_m must lie in (-pi, pi]");
  if (!(config.delta_pcm > -pi && config.delta_pcm <= pi))
    throw std::invalid_argument(
        "DeviceConfig: delta_pcm must lie in (-pi, pi]");
  if (config.basis.tag.empty())
    throw std::invalid_argument("DeviceConfig: basis tag must be nonempty");
}

ModeAmplitudes polarizer_output(const FieldSample& sample,
                                const DeviceConfig& config) {
  if (sample.amplitudes.basis_tag == config.basis.tag)
    return sample.amplitudes;  // already expressed in the device basis
  return project_amplitudes(sample.amplitudes, config.basis);
}

ArmSignal mirror_reflect(const ArmSignal& signal, double delta_m) {
  if (signal.arm != ArmSignal::Arm::MirrorArm)
    throw std::logic_error("mirror_reflect: signal is not in the mirror arm");
  if (signal.stage != ArmSignal::Stage::AfterSplit)
    throw std::logic_error("mirror_reflect: signal already reflected");
  return {signal.amplitude * std::polar(1.0, delta_m), signal.arm,
          ArmSignal::Stage::AfterReflect};
}

ArmSignal pcm_reflect(const ArmSignal& signal, double delta_pcm) {
  if (signal.arm != ArmSignal::Arm::PcmArm)
    throw std::logic_error(
        "pcm_reflect: signal is not in the conjugating arm");
  if (signal.stage != ArmSignal::Stage::AfterSplit)
    throw std::logic_error("pcm_reflect: signal already reflected");
  return {std::conj(signal.amplitude) * std::polar(1.0, delta_pcm),
          signal.arm, ArmSignal::Stage::AfterReflect};
}

FieldEnsemble pcmi_run(const FieldEnsemble& ensemble,
                       const DeviceConfig& config) {
  validate(config);

  FieldEnsemble out;
  out.spec = ensemble.spec;
  switch (ensemble.kind.tag) {
    case EnsembleKind::Tag::Polarized:
      out.kind = EnsembleKind::hops(
          ensemble.kind.chi,
          wrap_to_pi(-ensemble.kind.delta + config.delta_m +
                     config.delta_pcm));
      break;
    case EnsembleKind::Tag::Hops:
      out.kind = EnsembleKind::polarized(
          ensemble.kind.chi,
          wrap_to_pi(-ensemble.kind.delta + config.delta_pcm -
                     config.delta_m));
      break;
    case EnsembleKind::Tag::Unpolarized:
      out.kind = EnsembleKind::unpolarized();
      break;
  }

  out.samples.reserve(ensemble.samples.size());
  for (const auto& sample : ensemble.samples) {
    const ModeAmplitudes split = polarizer_output(sample, config);
    const ArmSignal mirror_in{split.primary, ArmSignal::Arm::MirrorArm,
                              ArmSignal::Stage::AfterSplit};
    const ArmSignal pcm_in{split.orthogonal, ArmSignal::Arm::PcmArm,
                           ArmSignal::Stage::AfterSplit};
    const ArmSignal mirror_out = mirror_reflect(mirror_in, config.delta_m);
    const ArmSignal pcm_out = pcm_reflect(pcm_in, config.delta_pcm);
    ModeAmplitudes recombined{mirror_out.amplitude, pcm_out.amplitude,
                              config.basis.tag};
    out.samples.push_back({std::move(recombined), sample.draw_index});
  }
  return out;
}

HopsCertificate hops_certificate(const FieldEnsemble& ensemble,
                                 double expected_chi, double expected_delta,
                                 const DeviceConfig& config) {
  validate(config);
  if (!(expected_chi >= 0.0 && expected_chi <= pi))
    throw std::invalid_argument(
        "hops_certificate: expected_chi must lie in [0, pi]");
  if (!(expected_delta > -pi && expected_delta <= pi))
    throw std::invalid_argument(
        "hops_certificate: expected_delta must lie in (-pi, pi]");
  if (ensemble.samples.size() < 2)
    throw std::invalid_argument("hops_certificate: need at least 2 samples");

  std::vector<double> ratios;
  std::vector<double> phase_sums;
  ratios.reserve(ensemble.samples.size());
  phase_sums.reserve(ensemble.samples.size());
  for (const auto& sample : ensemble.samples) {
    const Complex p = sample.amplitudes.primary;
    const Complex o = sample.amplitudes.orthogonal;
    if (std::abs(p) > 0.0) ratios.push_back(std::abs(o) / std::abs(p));
    phase_sums.push_back(wrap_to_pi(phase_of(o) + phase_of(p)));
  }

  HopsCertificate cert;
  cert.phase_sum_target =
      wrap_to_pi(-expected_delta + config.delta_m + config.delta_pcm);
  cert.audit = randomness_audit(ensemble);

  constexpr double var_tol = 1e-12;
  constexpr double mean_tol = 1e-10;

  const bool ratios_usable = ratios.size() >= 2;
  const double ratio_mean = ratios_usable ? detail::mean_of(ratios) : 0.0;
  const double ratio_var =
      ratios_usable ? detail::sample_variance(ratios, ratio_mean) : 0.0;
  const auto sum_stats = detail::circular_stats(phase_sums);

  cert.checks.push_back({"amplitude-ratio variance", ratio_var, 0.0, var_tol,
                         ratios_usable && ratio_var <= var_tol});
  cert.checks.push_back({"phase-sum circular variance", sum_stats.variance,
                         0.0, var_tol, sum_stats.variance <= var_tol});
  const double expected_ratio = std::tan(0.5 * expected_chi);
  cert.checks.push_back(
      {"amplitude ratio", ratio_mean, expected_ratio, mean_tol,
       ratios_usable && std::abs(ratio_mean - expected_ratio) <= mean_tol});
  const double sum_error =
      std::abs(wrap_to_pi(sum_stats.mean_angle - cert.phase_sum_target));
  cert.checks.push_back({"phase sum", sum_stats.mean_angle,
                         cert.phase_sum_target, mean_tol,
                         sum_error <= mean_tol});

  cert.pass = true;
  for (const auto& check : cert.checks) cert.pass = cert.pass && check.pass;
  return cert;
}

std::string to_json(const HopsCertificate& cert) {
  json j;
  j["audit"] = json::parse(to_json(cert.audit));
  j["checks"] = json::array();
  for (const auto& check : cert.checks) {
    j["checks"].push_back({{"label", check.label},
                           {"value", check.value},
                           {"expected", check.expected},
                           {"tolerance", check.tolerance},
                           {"pass", check.pass}});
  }
  j["pass"] = cert.pass;
  j["phase_sum_target"] = cert.phase_sum_target;
  return j.dump(2);
}

std::string to_text(const HopsCertificate& cert) {
  std::ostringstream out;
  out << "hidden-polarization certificate\n";
  char buf[64];
  for (const auto& check : cert.checks) {
    std::snprintf(buf, sizeof(buf), "%.6g (expected %.6g, tolerance %.1e)",
                  check.value, check.expected, check.tolerance);
    out << "  " << (check.pass ? "pass" : "FAIL") << "  " << check.label
        << ": " << buf << "\n";
  }
  std::snprintf(buf, sizeof(buf), "%.6g", cert.phase_sum_target);
  out << "  phase-sum target: " << buf << "\n";
  out << to_text(cert.audit);
  out << "  overall: " << (cert.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace hops
