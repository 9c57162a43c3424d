#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include <hops/pcmi.hpp>

using hops::Complex;
using doctest::Approx;

namespace {

using Arm = hops::ArmSignal::Arm;
using Stage = hops::ArmSignal::Stage;

hops::FieldEnsemble polarized_input(double chi, double delta, std::size_t n,
                                    std::uint64_t seed = 7,
                                    hops::AmplitudeDist dist =
                                        hops::AmplitudeDist::constant(1.0)) {
  return hops::generate_ensemble(hops::EnsembleKind::polarized(chi, delta),
                                 {dist, seed}, n);
}

bool same_angle(double a, double b, double tol = 1e-12) {
  return std::abs(hops::wrap_to_pi(a - b)) <= tol;
}

}  // namespace

TEST_CASE("mirror reflection adds its phase and nothing else") {
  const hops::ArmSignal in{std::polar(1.0, hops::pi / 3), Arm::MirrorArm,
                           Stage::AfterSplit};
  const auto out = hops::mirror_reflect(in, hops::pi / 6);
  CHECK(std::abs(out.amplitude) == Approx(1.0));
  CHECK(same_angle(hops::phase_of(out.amplitude), hops::pi / 2));
  CHECK(out.stage == Stage::AfterReflect);
  CHECK(out.arm == Arm::MirrorArm);

  SUBCASE("wrong arm or stage is a wiring bug") {
    const hops::ArmSignal pcm_signal{Complex{1, 0}, Arm::PcmArm,
                                     Stage::AfterSplit};
    CHECK_THROWS_AS(hops::mirror_reflect(pcm_signal, 0.0), std::logic_error);
    CHECK_THROWS_AS(hops::mirror_reflect(out, 0.0), std::logic_error);
  }
}

TEST_CASE("phase-conjugating reflection negates the stochastic phase") {
  const hops::ArmSignal in{0.5 * std::polar(1.0, 1.2), Arm::PcmArm,
                           Stage::AfterSplit};
  const auto out = hops::pcm_reflect(in, 0.4);
  CHECK(std::abs(out.amplitude) == Approx(0.5));
  CHECK(same_angle(hops::phase_of(out.amplitude), -1.2 + 0.4));

  SUBCASE("a second reflection with the same phase is the identity") {
    const hops::ArmSignal mid{out.amplitude, Arm::PcmArm, Stage::AfterSplit};
    const auto back = hops::pcm_reflect(mid, 0.4);
    // conj(conj(z) e^{i d}) e^{i d} = z: the device phase cancels itself
    CHECK(std::abs(back.amplitude - in.amplitude) < 1e-15);
  }
  SUBCASE("wrong arm is rejected") {
    const hops::ArmSignal mirror_signal{Complex{1, 0}, Arm::MirrorArm,
                                        Stage::AfterSplit};
    CHECK_THROWS_AS(hops::pcm_reflect(mirror_signal, 0.0), std::logic_error);
  }
}

TEST_CASE("device config validation") {
  hops::DeviceConfig config;
  CHECK_NOTHROW(hops::validate(config));
  config.delta_m = 4.0;
  CHECK_THROWS_AS(hops::validate(config), std::invalid_argument);
  config.delta_m = -hops::pi;  // outside (-pi, pi]
  CHECK_THROWS_AS(hops::validate(config), std::invalid_argument);
  config.delta_m = hops::pi;
  CHECK_NOTHROW(hops::validate(config));
  config.basis.tag.clear();
  CHECK_THROWS_AS(hops::validate(config), std::invalid_argument);
}

TEST_CASE("a pass through the device hides the polarization") {
  const auto input = polarized_input(hops::pi / 2, 0.0, 1000);
  const hops::DeviceConfig config;
  const auto output = hops::pcmi_run(input, config);

  REQUIRE(output.samples.size() == input.samples.size());
  CHECK(output.kind.tag == hops::EnsembleKind::Tag::Hops);

  const auto audit = hops::randomness_audit(output);
  CHECK(audit.classification == hops::PolarizationClass::HiddenPolarized);

  SUBCASE("per-sample energy is conserved") {
    for (std::size_t i = 0; i < input.samples.size(); ++i)
      CHECK(hops::intensity(output.samples[i].amplitudes) ==
            Approx(hops::intensity(input.samples[i].amplitudes)));
  }
  SUBCASE("each arm stamps exactly its reflection phase") {
    const double dm = 0.3, dp = -0.7;
    hops::DeviceConfig shifted;
    shifted.delta_m = dm;
    shifted.delta_pcm = dp;
    const auto out = hops::pcmi_run(input, shifted);
    for (std::size_t i = 0; i < input.samples.size(); ++i) {
      const auto& a = input.samples[i].amplitudes;
      const auto& b = out.samples[i].amplitudes;
      CHECK(same_angle(hops::phase_of(b.primary),
                       hops::phase_of(a.primary) + dm));
      CHECK(same_angle(hops::phase_of(b.orthogonal),
                       -hops::phase_of(a.orthogonal) + dp));
    }
  }
}

TEST_CASE("conversion certificate") {
  const double chi = hops::pi / 2;
  const double delta = hops::pi / 4;
  const hops::DeviceConfig config;

  SUBCASE("device output certifies with the advertised phase sum") {
    const auto input = polarized_input(chi, delta, 1000, 7,
                                       hops::AmplitudeDist::rayleigh(1.0));
    const auto output = hops::pcmi_run(input, config);
    const auto cert = hops::hops_certificate(output, chi, delta, config);
    CHECK(cert.pass);
    CHECK(same_angle(cert.phase_sum_target, -hops::pi / 4));
    for (const auto& check : cert.checks) {
      INFO(check.label);
      CHECK(check.pass);
    }
    // the random overall amplitude drops out of the ratio entirely
    CHECK(cert.audit.ratio_variance <= 1e-12);
  }
  SUBCASE("device phases shift the target") {
    hops::DeviceConfig shifted;
    shifted.delta_m = 0.3;
    shifted.delta_pcm = -0.7;
    const auto input = polarized_input(hops::pi / 3, delta, 500);
    const auto output = hops::pcmi_run(input, shifted);
    const auto cert = hops::hops_certificate(output, hops::pi / 3, delta,
                                             shifted);
    CHECK(cert.pass);
    CHECK(same_angle(cert.phase_sum_target, -delta + 0.3 - 0.7));
  }
  SUBCASE("unconverted polarized light fails on the phase sum") {
    const auto input = polarized_input(chi, delta, 500);
    const auto cert = hops::hops_certificate(input, chi, delta, config);
    CHECK_FALSE(cert.pass);
    bool found = false;
    for (const auto& check : cert.checks)
      if (check.label.find("phase-sum") != std::string::npos) {
        found = true;
        CHECK_FALSE(check.pass);
      }
    CHECK(found);
  }
  SUBCASE("fewer than two samples cannot be certified") {
    const auto input = polarized_input(chi, delta, 1);
    const auto output = hops::pcmi_run(input, config);
    CHECK_THROWS_AS(hops::hops_certificate(output, chi, delta, config),
                    std::invalid_argument);
  }
}

TEST_CASE("a second pass undoes the conversion") {
  const auto input = polarized_input(1.1, -0.6, 400, 21,
                                     hops::AmplitudeDist::rayleigh(0.9));
  hops::DeviceConfig config;
  config.delta_pcm = 0.9;  // delta_m = 0 so the mirror arm is untouched

  const auto once = hops::pcmi_run(input, config);
  const auto twice = hops::pcmi_run(once, config);

  CHECK(hops::randomness_audit(once).classification ==
        hops::PolarizationClass::HiddenPolarized);
  CHECK(hops::randomness_audit(twice).classification ==
        hops::PolarizationClass::Polarized);
  CHECK(twice.kind.tag == hops::EnsembleKind::Tag::Polarized);

  // conj(conj(A) e^{i d}) e^{i d} = A: the conjugating arm cancels its own
  // phase, and the mirror arm adds 2 delta_m = 0
  for (std::size_t i = 0; i < input.samples.size(); ++i) {
    const auto& a = input.samples[i].amplitudes;
    const auto& b = twice.samples[i].amplitudes;
    CHECK(std::abs(b.primary - a.primary) < 1e-15);
    CHECK(std::abs(b.orthogonal - a.orthogonal) < 1e-15);
  }
}

TEST_CASE("polarizer projection respects the device basis") {
  const double r = 1.0 / std::sqrt(2.0);
  hops::DeviceConfig config;
  config.basis =
      hops::basis_from_primary({Complex{r, 0}, Complex{0, r}}, "circular");

  SUBCASE("linear input gets projected") {
    const hops::FieldSample sample{{Complex{r, 0}, Complex{0, r}, "linear"},
                                   0};
    const auto out = hops::polarizer_output(sample, config);
    CHECK(out.basis_tag == "circular");
    CHECK(out.primary.real() == Approx(1.0));
    CHECK(std::abs(out.orthogonal) < 1e-14);
  }
  SUBCASE("input already in the device basis passes through") {
    const hops::FieldSample sample{{Complex{0.4, 0.1}, Complex{-0.2, 0.3},
                                    "circular"},
                                   0};
    const auto out = hops::polarizer_output(sample, config);
    CHECK(out.primary == sample.amplitudes.primary);
    CHECK(out.orthogonal == sample.amplitudes.orthogonal);
  }
}
