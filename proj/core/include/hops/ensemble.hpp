#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hops/polarization.hpp"

namespace hops {

/// Law for the random overall amplitude a0. Phases are always drawn
/// uniformly on [0, 2*pi); only the amplitude law is configurable.
struct AmplitudeDist {
  enum class Law { Constant, Uniform, Rayleigh };
  Law law = Law::Constant;
  double a0 = 1.0;     ///< Constant value
  double lo = 0.0;     ///< Uniform lower bound, >= 0
  double hi = 1.0;     ///< Uniform upper bound, > lo
  double scale = 1.0;  ///< Rayleigh scale, > 0

  static AmplitudeDist constant(double a0);
  static AmplitudeDist uniform(double lo, double hi);
  static AmplitudeDist rayleigh(double scale);
};

struct RandomnessSpec {
  AmplitudeDist amplitude_dist;
  std::uint64_t seed = 0;
};

void validate(const AmplitudeDist& dist);

/// Statistical family of an ensemble. `chi` and `delta` hold (chi, delta)
/// for Polarized and (chi_h, delta_h) for Hops; Unpolarized ignores both.
struct EnsembleKind {
  enum class Tag { Polarized, Hops, Unpolarized };
  Tag tag = Tag::Unpolarized;
  double chi = 0.0;
  double delta = 0.0;

  static EnsembleKind polarized(double chi, double delta);
  static EnsembleKind hops(double chi_h, double delta_h);
  static EnsembleKind unpolarized();
};

std::string to_string(EnsembleKind::Tag tag);

struct FieldSample {
  ModeAmplitudes amplitudes;
  std::uint64_t draw_index = 0;
};

struct FieldEnsemble {
  EnsembleKind kind;
  RandomnessSpec spec;
  std::vector<FieldSample> samples;
};

/// Draw `n` samples. Polarized: random (a0, phi_bar) with fixed (chi,
/// delta). Hops: random (a0, phi) with fixed (chi_h, delta_h). Unpolarized:
/// independent amplitude and phase per mode. Sample i comes from substream
/// (seed, i); within a stream the amplitude draw precedes the phase draw(s).
/// Changing either convention silently breaks stored-seed reproducibility,
/// so both are part of the contract.
FieldEnsemble generate_ensemble(const EnsembleKind& kind,
                                const RandomnessSpec& spec, std::size_t n);

/// Ensemble means with per-component standard errors. All reductions use a
/// fixed-order chunked accumulation so results do not depend on how the
/// samples were produced.
struct ClassicalStokes {
  double s0 = 0.0;  ///< mean(|A_y|^2 + |A_x|^2)
  double s1 = 0.0;  ///< mean(|A_y|^2 - |A_x|^2)
  double s2 = 0.0;  ///< Re mean(2 A_y conj(A_x))
  double s3 = 0.0;  ///< Im mean(2 A_y conj(A_x))
  std::array<double, 4> std_error{};
  std::size_t n = 0;
};

struct ClassicalHidden {
  double h0 = 0.0;  ///< mean(|A_y|^2 + |A_x|^2)
  double h1 = 0.0;  ///< mean(|A_y|^2 - |A_x|^2)
  double h2 = 0.0;  ///< Re mean(2 A_y A_x)   (no conjugate)
  double h3 = 0.0;  ///< Im mean(2 A_y A_x)
  std::array<double, 4> std_error{};
  std::size_t n = 0;
};

ClassicalStokes classical_stokes(const FieldEnsemble& ensemble);
ClassicalHidden classical_hidden(const FieldEnsemble& ensemble);

std::string to_json(const ClassicalStokes& stokes);
std::string to_text(const ClassicalStokes& stokes);
std::string to_json(const ClassicalHidden& hidden);
std::string to_text(const ClassicalHidden& hidden);

/// Which single-mode structure, if any, the per-sample statistics certify.
enum class PolarizationClass { Polarized, HiddenPolarized, Neither };

std::string to_string(PolarizationClass c);

struct RandomnessAudit {
  double ratio_mean = 0.0;       ///< mean of |A_y| / |A_x|
  double ratio_variance = 0.0;   ///< sample variance of the ratio
  double diff_circular_variance = 0.0;  ///< of arg A_y - arg A_x
  double sum_circular_variance = 0.0;   ///< of arg A_y + arg A_x
  std::size_t infinite_ratio_count = 0; ///< samples with A_x = 0, excluded
  std::size_t n = 0;
  double threshold = 0.0;        ///< non-randomness cutoff used
  PolarizationClass classification = PolarizationClass::Neither;
};

/// Classify by which of (ratio, phase difference, phase sum) are constant
/// across samples: ratio and difference -> Polarized; ratio and sum ->
/// HiddenPolarized; anything else -> Neither. Constructed ensembles sit
/// around 1e-30 on their constant statistics and O(1) on the random ones,
/// so any threshold in that gap works; 1e-10 is the default. Requires
/// n >= 2; if fewer than 2 samples have A_x != 0 the ratio cannot be
/// certified and the classification is Neither.
RandomnessAudit randomness_audit(const FieldEnsemble& ensemble,
                                 double nonrandom_threshold = 1e-10);

std::string to_json(const RandomnessAudit& audit);
std::string to_text(const RandomnessAudit& audit);

/// CSV round trip. Layout: a `# hops-ensemble` comment line carrying kind,
/// parameters, basis tag, seed and row count; a column header; then one row
/// per sample as re(A_x), im(A_x), re(A_y), im(A_y) printed with 17
/// significant digits (exact double round trip). Path overloads write
/// atomically (temp file + rename). Read failures throw CsvError with the
/// offending line number.
void write_ensemble_csv(const FieldEnsemble& ensemble, std::ostream& out);
void write_ensemble_csv(const FieldEnsemble& ensemble,
                        const std::filesystem::path& path);
FieldEnsemble read_ensemble_csv(std::istream& in);
FieldEnsemble read_ensemble_csv(const std::filesystem::path& path);

}  // namespace hops
