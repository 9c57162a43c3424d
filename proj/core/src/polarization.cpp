#include "hops/polarization.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hops {

double wrap_to_pi(double angle) {
  double w = std::remainder(angle, two_pi);
  if (w <= -pi) w = pi;
  return w;
}

double wrap_to_two_pi(double angle) {
  double w = std::fmod(angle, two_pi);
  if (w < 0.0) w += two_pi;
  // adding two_pi to a tiny negative value can round up to exactly two_pi
  if (w >= two_pi) w = 0.0;
  return w;
}

double phase_of(Complex z) {
  if (z.real() == 0.0 && z.imag() == 0.0) return 0.0;
  double a = std::atan2(z.imag(), z.real());
  if (a <= -pi) a = pi;  // atan2(-0.0, x<0) returns -pi
  return a;
}

double intensity(const ModeAmplitudes& amps) {
  return std::norm(amps.primary) + std::norm(amps.orthogonal);
}

PolarizationBasis linear_basis() {
  PolarizationBasis basis;
  basis.eps = Eigen::Vector2cd(1.0, 0.0);
  basis.eps_perp = Eigen::Vector2cd(0.0, 1.0);
  basis.tag = "linear";
  return basis;
}

PolarizationBasis basis_from_primary(const Eigen::Vector2cd& eps,
                                     std::string tag) {
  const double norm2 = eps.squaredNorm();
  if (norm2 == 0.0 || !std::isfinite(norm2)) {
    throw std::invalid_argument(
        "basis_from_primary: primary vector must be nonzero and finite");
  }
  PolarizationBasis basis;
  basis.eps = eps / std::sqrt(norm2);
  basis.eps_perp = Eigen::Vector2cd(-std::conj(basis.eps(1)),
                                    std::conj(basis.eps(0)));
  basis.tag = std::move(tag);
  return basis;
}

ModeAmplitudes project_amplitudes(const ModeAmplitudes& linear,
                                  const PolarizationBasis& basis) {
  if (linear.basis_tag != "linear") {
    throw std::invalid_argument(
        "project_amplitudes: input must carry linear-basis amplitudes");
  }
  ModeAmplitudes out;
  out.primary = std::conj(basis.eps(0)) * linear.primary +
                std::conj(basis.eps(1)) * linear.orthogonal;
  out.orthogonal = std::conj(basis.eps_perp(0)) * linear.primary +
                   std::conj(basis.eps_perp(1)) * linear.orthogonal;
  out.basis_tag = basis.tag;
  return out;
}

void validate(const PolarParams& params) {
  if (!(params.a0 >= 0.0) || !std::isfinite(params.a0))
    throw std::invalid_argument("PolarParams: a0 must be finite and >= 0");
  if (!(params.chi >= 0.0 && params.chi <= pi))
    throw std::invalid_argument("PolarParams: chi must lie in [0, pi]");
  if (!(params.delta > -pi && params.delta <= pi))
    throw std::invalid_argument("PolarParams: delta must lie in (-pi, pi]");
  if (!(params.phi_bar >= 0.0 && params.phi_bar < two_pi))
    throw std::invalid_argument("PolarParams: phi_bar must lie in [0, 2*pi)");
}

void validate(const HopsParams& params) {
  if (!(params.a0 >= 0.0) || !std::isfinite(params.a0))
    throw std::invalid_argument("HopsParams: a0 must be finite and >= 0");
  if (!(params.chi_h >= 0.0 && params.chi_h <= pi))
    throw std::invalid_argument("HopsParams: chi_h must lie in [0, pi]");
  if (!(params.delta_h > -pi && params.delta_h <= pi))
    throw std::invalid_argument("HopsParams: delta_h must lie in (-pi, pi]");
  if (!(params.phi >= 0.0 && params.phi < two_pi))
    throw std::invalid_argument("HopsParams: phi must lie in [0, 2*pi)");
}

PolarizationIndex iop(const ModeAmplitudes& amps) {
  PolarizationIndex out;
  out.kind = PolarizationIndex::Kind::Iop;
  if (amps.primary == Complex(0.0, 0.0)) {
    if (amps.orthogonal == Complex(0.0, 0.0)) {
      throw std::invalid_argument(
          "iop: index undefined for a vanishing field");
    }
    out.infinite = true;
    return out;
  }
  out.value = amps.orthogonal / amps.primary;
  return out;
}

PolarizationIndex ihop_from_angles(double chi_h, double delta_h) {
  if (!(chi_h >= 0.0 && chi_h <= pi))
    throw std::invalid_argument(
        "ihop_from_angles: chi_h must lie in [0, pi]");
  if (!(delta_h > -pi && delta_h <= pi))
    throw std::invalid_argument(
        "ihop_from_angles: delta_h must lie in (-pi, pi]");
  PolarizationIndex out;
  out.kind = PolarizationIndex::Kind::Ihop;
  if (chi_h == pi) {
    out.infinite = true;
    return out;
  }
  out.value = std::polar(std::tan(0.5 * chi_h), delta_h);
  return out;
}

ModeAmplitudes amplitudes_from_polar(const PolarParams& params) {
  validate(params);
  ModeAmplitudes out;
  out.primary = std::polar(params.a0 * std::cos(0.5 * params.chi),
                           params.phi_bar - 0.5 * params.delta);
  out.orthogonal = std::polar(params.a0 * std::sin(0.5 * params.chi),
                              params.phi_bar + 0.5 * params.delta);
  return out;
}

namespace {

// Half-angle phase recovery is only determined modulo pi from principal
// arguments (and wrapping the two-phase combination can shift it by another
// pi). Both effects land on the same lattice, so one conditional pi shift
// restores the branch in which `candidate` reproduces `reference`.
double fix_half_angle_branch(double candidate, double reference) {
  if (std::abs(wrap_to_pi(candidate - reference)) > 0.5 * pi) return pi;
  return 0.0;
}

}  // namespace

PolarParams polar_from_amplitudes(const ModeAmplitudes& amps) {
  const double mag_p = std::abs(amps.primary);
  const double mag_o = std::abs(amps.orthogonal);
  if (mag_p == 0.0 && mag_o == 0.0) {
    throw std::invalid_argument(
        "polar_from_amplitudes: parameters undefined for a vanishing field");
  }
  PolarParams out;
  out.a0 = std::hypot(mag_p, mag_o);
  out.chi = 2.0 * std::atan2(mag_o, mag_p);
  const double arg_p = phase_of(amps.primary);
  const double arg_o = phase_of(amps.orthogonal);
  out.delta = wrap_to_pi(arg_o - arg_p);
  double phi_bar = 0.5 * (arg_o + arg_p);
  if (mag_p > 0.0) {
    phi_bar += fix_half_angle_branch(phi_bar - 0.5 * out.delta, arg_p);
  } else {
    phi_bar += fix_half_angle_branch(phi_bar + 0.5 * out.delta, arg_o);
  }
  out.phi_bar = wrap_to_two_pi(phi_bar);
  return out;
}

ModeAmplitudes amplitudes_from_hops(const HopsParams& params) {
  validate(params);
  ModeAmplitudes out;
  out.primary = std::polar(params.a0 * std::cos(0.5 * params.chi_h),
                           params.phi + 0.5 * params.delta_h);
  out.orthogonal = std::polar(params.a0 * std::sin(0.5 * params.chi_h),
                              -params.phi + 0.5 * params.delta_h);
  return out;
}

HopsParams hops_from_amplitudes(const ModeAmplitudes& amps) {
  const double mag_p = std::abs(amps.primary);
  const double mag_o = std::abs(amps.orthogonal);
  if (mag_p == 0.0 && mag_o == 0.0) {
    throw std::invalid_argument(
        "hops_from_amplitudes: parameters undefined for a vanishing field");
  }
  HopsParams out;
  out.a0 = std::hypot(mag_p, mag_o);
  out.chi_h = 2.0 * std::atan2(mag_o, mag_p);
  const double arg_p = phase_of(amps.primary);
  const double arg_o = phase_of(amps.orthogonal);
  out.delta_h = wrap_to_pi(arg_o + arg_p);
  double phi = -0.5 * (arg_o - arg_p);
  if (mag_p > 0.0) {
    phi += fix_half_angle_branch(phi + 0.5 * out.delta_h, arg_p);
  } else {
    phi += fix_half_angle_branch(-phi + 0.5 * out.delta_h, arg_o);
  }
  out.phi = wrap_to_two_pi(phi);
  return out;
}

}  // namespace hops
