#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hops/ensemble.hpp"
#include "hops/fock.hpp"

namespace hops {

/// Optical arrangement in front of the two detectors.
///   Direct:               nothing; ports carry (A_x, A_y).
///   Rotated45:            half-wave rotator at 45 degrees,
///                         A_x' = (A_x + A_y)/sqrt2, A_y' = (-A_x + A_y)/sqrt2.
///   PhaseShiftedRotated:  quarter-wave shifter then the rotator,
///                         A_x' = (A_x + iA_y)/sqrt2, A_y' = -(A_x - iA_y)/sqrt2.
enum class Scheme { Direct, Rotated45, PhaseShiftedRotated };

std::string to_string(Scheme scheme);

struct DetectorModel {
  double efficiency = 1.0;  ///< in (0, 1]; counts are Poissonian
};

void validate(const DetectorModel& det);

struct CountRecord {
  std::uint64_t shot_index = 0;
  std::uint64_t n1 = 0;  ///< detector on the first output port
  std::uint64_t n2 = 0;  ///< detector on the second output port
};

/// Apply the scheme's unitary to linear-basis amplitudes. Intensity is
/// preserved; the output carries the scheme's basis tag.
ModeAmplitudes scheme_transform(const ModeAmplitudes& amps, Scheme scheme);

/// For each sample and each shot, draw n1 ~ Poisson(eff |A_x'|^2) and
/// n2 ~ Poisson(eff |A_y'|^2). Shot (i, j) uses substream
/// (seed, i * shots_per_sample + j), so records are reproducible
/// bit-exactly and independent of evaluation order.
std::vector<CountRecord> simulate_counts(const FieldEnsemble& ensemble,
                                         Scheme scheme,
                                         const DetectorModel& det,
                                         std::size_t shots_per_sample,
                                         std::uint64_t seed);

struct EstimateReport {
  Scheme scheme = Scheme::Direct;
  double mean_sum = 0.0;   ///< mean(n1 + n2)
  double mean_diff = 0.0;  ///< Direct: mean(n2 - n1); rotated schemes: mean(n1 - n2)
  double std_error_sum = 0.0;
  double std_error_diff = 0.0;
  std::size_t shots = 0;
};

/// Sample means of the sum and difference signals with standard errors.
/// The difference is oriented per scheme: n2 - n1 under Direct (the
/// intensity imbalance), n1 - n2 under the rotated schemes (the signal the
/// rotator arrangements are built to extract).
EstimateReport estimate(const std::vector<CountRecord>& records,
                        Scheme scheme);

std::string to_json(const EstimateReport& report);
std::string to_text(const EstimateReport& report);

/// Running estimate at shot counts 1, 2, 5, 10, 20, 50, ... and at the full
/// record count; plot-ready convergence data.
std::vector<EstimateReport> estimate_trace(
    const std::vector<CountRecord>& records, Scheme scheme);

struct SchemeIdentityCheck {
  std::string label;
  double residual = 0.0;
  bool expect_zero = false;  ///< otherwise expected > 0.5
  double threshold = 0.0;
  bool pass = false;
};

struct MeasurementIdentityReport {
  int cutoff = 0;
  int safe_total = 0;
  std::vector<SchemeIdentityCheck> checks;
  double d3_minus_s3_residual = 0.0;  ///< ||D3 - S3||
  double d3_plus_s3_residual = 0.0;   ///< ||D3 + S3||
  std::string d3_resolved_sign;       ///< "+", "-", or "ambiguous"
  bool d3_sign_unambiguous = false;
  std::string note;
  bool all_pass = false;
};

/// What do the difference signals actually measure? Build the detection
/// operators D2 (Rotated45) and D3 (PhaseShiftedRotated) as n_x' - n_y'
/// under the scheme unitaries and compare them, on the safe subspace,
/// against both the hidden-polarization operators H2, H3 and the Stokes
/// operators S2, S3. The rotator arrangements reproduce the Stokes pair
/// exactly and sit a finite distance from the hidden pair: photon counting
/// after passive linear optics conserves total photon number, while H2/H3
/// create and destroy pairs. Requires cutoff >= 3.
MeasurementIdentityReport identity_audit(const FockSpace& space);

std::string to_json(const MeasurementIdentityReport& report);
std::string to_text(const MeasurementIdentityReport& report);

/// Counts CSV: `# hops-counts` header line, `shot_index,n1,n2` columns, one
/// row per shot. Trace CSV: columns shots, mean_sum, std_error_sum,
/// mean_diff, std_error_diff. Path overloads write atomically; read
/// failures throw CsvError with the line number.
void write_counts_csv(const std::vector<CountRecord>& records, Scheme scheme,
                      std::ostream& out);
void write_counts_csv(const std::vector<CountRecord>& records, Scheme scheme,
                      const std::filesystem::path& path);
std::vector<CountRecord> read_counts_csv(std::istream& in);
std::vector<CountRecord> read_counts_csv(const std::filesystem::path& path);

void write_trace_csv(const std::vector<EstimateReport>& trace,
                     std::ostream& out);
void write_trace_csv(const std::vector<EstimateReport>& trace,
                     const std::filesystem::path& path);

}  // namespace hops
