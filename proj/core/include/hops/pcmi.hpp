#pragma once

#include <string>
#include <vector>

#include "hops/ensemble.hpp"
#include "hops/polarization.hpp"

namespace hops {

/// Interferometer settings: the constant phases picked up on reflection in
/// the ordinary-mirror arm and the phase-conjugating arm, and the working
/// polarization basis of the splitter.
struct DeviceConfig {
  double delta_m = 0.0;    ///< mirror phase, in (-pi, pi]
  double delta_pcm = 0.0;  ///< phase-conjugating mirror phase, in (-pi, pi]
  PolarizationBasis basis = linear_basis();
};

void validate(const DeviceConfig& config);

/// One beam between elements of the interferometer.
struct ArmSignal {
  enum class Arm { MirrorArm, PcmArm };
  enum class Stage { AfterSplit, AfterReflect, AtRecombiner };
  Complex amplitude{0.0, 0.0};
  Arm arm = Arm::MirrorArm;
  Stage stage = Stage::AfterSplit;
};

/// Project one sample onto the device basis (the polarizer + first
/// splitter). Both components are retained.
ModeAmplitudes polarizer_output(const FieldSample& sample,
                                const DeviceConfig& config);

/// Ordinary reflection: amplitude *= e^{i delta_m}. Requires a MirrorArm
/// signal at stage AfterSplit; anything else throws std::logic_error.
ArmSignal mirror_reflect(const ArmSignal& signal, double delta_m);

/// Phase-conjugating reflection: amplitude -> conj(amplitude) e^{i
/// delta_pcm}, magnitude unchanged. Requires a PcmArm signal at stage
/// AfterSplit.
ArmSignal pcm_reflect(const ArmSignal& signal, double delta_pcm);

/// Run every sample through the device: project onto config.basis, send the
/// primary component through the mirror arm and the orthogonal component
/// through the conjugating arm, recombine. A polarized input ensemble comes
/// out hidden-polarized (the conjugation turns the random mean phase into a
/// random phase difference while the phase sum freezes at
/// -delta + delta_m + delta_pcm); feeding the output through a second
/// device undoes the conjugation and restores a polarized ensemble.
/// Samples already tagged with the device basis pass through unprojected,
/// which is what makes the second pass possible.
FieldEnsemble pcmi_run(const FieldEnsemble& ensemble,
                       const DeviceConfig& config);

struct CertificateCheck {
  std::string label;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct HopsCertificate {
  std::vector<CertificateCheck> checks;
  RandomnessAudit audit;
  double phase_sum_target = 0.0;  ///< -expected_delta + delta_m + delta_pcm
  bool pass = false;
};

/// Certify that an ensemble is hidden-polarized with the stated angles:
/// amplitude ratio constant (variance <= 1e-12) and equal to
/// tan(expected_chi/2) within 1e-10; phase sum constant (circular variance
/// <= 1e-12) and equal to -expected_delta + delta_m + delta_pcm within
/// 1e-10. Failures are entries in the report, not exceptions; fewer than 2
/// samples is a precondition error. The device config supplies the mirror
/// phases that enter the phase-sum target.
HopsCertificate hops_certificate(const FieldEnsemble& ensemble,
                                 double expected_chi, double expected_delta,
                                 const DeviceConfig& config);

std::string to_json(const HopsCertificate& cert);
std::string to_text(const HopsCertificate& cert);

}  // namespace hops
