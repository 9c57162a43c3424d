#pragma once

#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Core>

namespace hops {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wrap an angle to (-pi, pi]; the lower boundary maps to +pi.
double wrap_to_pi(double angle);

/// Wrap an angle to [0, 2*pi).
double wrap_to_two_pi(double angle);

/// Principal argument with the convention arg(0) := 0, so phases of
/// vanishing components are deterministic.
double phase_of(Complex z);

/// Two complex field amplitudes expressed in some polarization basis.
/// `primary` multiplies the basis' first vector, `orthogonal` the second.
struct ModeAmplitudes {
  Complex primary{0.0, 0.0};
  Complex orthogonal{0.0, 0.0};
  std::string basis_tag = "linear";
};

/// Intensity |primary|^2 + |orthogonal|^2.
double intensity(const ModeAmplitudes& amps);

/// An orthonormal pair of complex 2-vectors. Only the ratio of the second
/// vector's components is physical; the overall phase is gauge-fixed to
/// eps_perp = (-conj(eps_y), conj(eps_x)) so dumps are reproducible.
struct PolarizationBasis {
  Eigen::Vector2cd eps;
  Eigen::Vector2cd eps_perp;
  std::string tag = "linear";
};

/// The Cartesian (e_x, e_y) basis.
PolarizationBasis linear_basis();

/// Build the orthonormal basis completing `eps`. A nonzero input is
/// renormalized; a zero or non-finite input is rejected.
PolarizationBasis basis_from_primary(const Eigen::Vector2cd& eps,
                                     std::string tag = "custom");

/// Re-express linear-basis amplitudes (A_x, A_y) in `basis`:
///   primary    = conj(eps_x) A_x + conj(eps_y) A_y
///   orthogonal = -eps_y A_x + eps_x A_y
/// Unitary, so |A_x|^2 + |A_y|^2 is preserved. Requires basis_tag "linear".
ModeAmplitudes project_amplitudes(const ModeAmplitudes& linear,
                                  const PolarizationBasis& basis);

/// Amplitude/angle split with a random mean phase and a fixed phase
/// difference between the two components.
struct PolarParams {
  double a0 = 0.0;       ///< overall amplitude, >= 0
  double chi = 0.0;      ///< amplitude-ratio angle, in [0, pi]
  double delta = 0.0;    ///< phase difference, in (-pi, pi]
  double phi_bar = 0.0;  ///< mean phase, in [0, 2*pi)
};

/// Amplitude/angle split with a fixed phase *sum* and a random
/// phase-difference carrier; this is what makes a field hidden-polarized.
struct HopsParams {
  double a0 = 0.0;       ///< overall amplitude, >= 0
  double chi_h = 0.0;    ///< amplitude-ratio angle, in [0, pi]
  double delta_h = 0.0;  ///< phase sum, in (-pi, pi]
  double phi = 0.0;      ///< phase-difference carrier, in [0, 2*pi)
};

/// Throw std::invalid_argument naming the offending field if a parameter
/// lies outside its documented range.
void validate(const PolarParams& params);
void validate(const HopsParams& params);

/// Ratio of mode amplitudes characterizing the polarization class.
/// Iop:  orthogonal / primary           (ordinary polarization)
/// Ihop: orthogonal / conj(primary)     (hidden polarization)
struct PolarizationIndex {
  enum class Kind { Iop, Ihop };
  Complex value{0.0, 0.0};
  Kind kind = Kind::Iop;
  bool infinite = false;  ///< set when the denominator amplitude is zero
};

/// Ordinary polarization index orthogonal/primary. Zero denominator with a
/// nonzero numerator yields the infinite marker; a vanishing field is an
/// error because no ratio exists.
PolarizationIndex iop(const ModeAmplitudes& amps);

/// Hidden-polarization index tan(chi_h/2) e^{i delta_h}. chi_h = pi maps to
/// the infinite marker.
PolarizationIndex ihop_from_angles(double chi_h, double delta_h);

/// primary = a0 cos(chi/2) e^{i(phi_bar - delta/2)},
/// orthogonal = a0 sin(chi/2) e^{i(phi_bar + delta/2)}.
ModeAmplitudes amplitudes_from_polar(const PolarParams& params);

/// Inverse of amplitudes_from_polar on the open domain a0 > 0, chi in
/// (0, pi). The half-angle phase recovery is only determined modulo pi by
/// principal arguments; the branch is fixed so that re-synthesizing the
/// amplitudes reproduces the input phases.
PolarParams polar_from_amplitudes(const ModeAmplitudes& amps);

/// primary = a0 cos(chi_h/2) e^{i(phi + delta_h/2)},
/// orthogonal = a0 sin(chi_h/2) e^{i(-phi + delta_h/2)}.
ModeAmplitudes amplitudes_from_hops(const HopsParams& params);

/// Inverse of amplitudes_from_hops, with the same branch handling as
/// polar_from_amplitudes.
HopsParams hops_from_amplitudes(const ModeAmplitudes& amps);

}  // namespace hops
