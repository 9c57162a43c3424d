#include "hops/fock.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "hops/io_util.hpp"

namespace hops {

using nlohmann::json;

FockSpace::FockSpace(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 1)
    throw std::invalid_argument("FockSpace: cutoff must be >= 1");
}

namespace {

void require_same_space(const TwoModeOperator& a, const TwoModeOperator& b) {
  if (!(a.space == b.space))
    throw std::logic_error(
        "two-mode operators live on different Fock spaces");
}

Complex trace_product(const Eigen::MatrixXcd& rho,
                      const Eigen::MatrixXcd& op) {
  // Tr[rho op] = sum_ij rho_ij op_ji without forming the product
  return rho.cwiseProduct(op.transpose()).sum();
}

Complex ipow(Complex z, int k) {
  Complex r{1.0, 0.0};
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

}  // namespace

TwoModeOperator operator+(const TwoModeOperator& a, const TwoModeOperator& b) {
  require_same_space(a, b);
  return {a.space, a.matrix + b.matrix};
}

TwoModeOperator operator-(const TwoModeOperator& a, const TwoModeOperator& b) {
  require_same_space(a, b);
  return {a.space, a.matrix - b.matrix};
}

TwoModeOperator operator*(const TwoModeOperator& a, const TwoModeOperator& b) {
  require_same_space(a, b);
  return {a.space, a.matrix * b.matrix};
}

TwoModeOperator operator*(Complex scale, const TwoModeOperator& a) {
  return {a.space, scale * a.matrix};
}

TwoModeOperator adjoint(const TwoModeOperator& a) {
  return {a.space, a.matrix.adjoint()};
}

TwoModeOperator commutator(const TwoModeOperator& a, const TwoModeOperator& b) {
  require_same_space(a, b);
  return {a.space, a.matrix * b.matrix - b.matrix * a.matrix};
}

TwoModeOperator identity_op(const FockSpace& space) {
  return {space, Eigen::MatrixXcd::Identity(space.dim(), space.dim())};
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  // largest singular value via the top eigenvalue of m^ m; accurate far
  // below the tolerances used here and robust for complex matrices
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      m.adjoint() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
}

TwoModeOperator ladder(Mode mode, const FockSpace& space) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (int nx = 0; nx <= space.cutoff(); ++nx) {
    for (int ny = 0; ny <= space.cutoff(); ++ny) {
      if (mode == Mode::X && nx > 0)
        m(space.index(nx - 1, ny), space.index(nx, ny)) =
            std::sqrt(static_cast<double>(nx));
      if (mode == Mode::Y && ny > 0)
        m(space.index(nx, ny - 1), space.index(nx, ny)) =
            std::sqrt(static_cast<double>(ny));
    }
  }
  return {space, std::move(m)};
}

std::array<TwoModeOperator, 4> stokes_ops(const FockSpace& space) {
  const auto ax = ladder(Mode::X, space);
  const auto ay = ladder(Mode::Y, space);
  const auto axd = adjoint(ax);
  const auto ayd = adjoint(ay);
  auto s0 = ayd * ay + axd * ax;
  auto s1 = ayd * ay - axd * ax;
  auto s2 = ayd * ax + axd * ay;
  auto s3 = Complex(0.0, 1.0) * (axd * ay - ayd * ax);
  return {std::move(s0), std::move(s1), std::move(s2), std::move(s3)};
}

std::array<TwoModeOperator, 4> hidden_ops(const FockSpace& space) {
  const auto ax = ladder(Mode::X, space);
  const auto ay = ladder(Mode::Y, space);
  const auto axd = adjoint(ax);
  const auto ayd = adjoint(ay);
  const auto pair_down = ay * ax;          // H2 + iH3 = 2 ay ax
  const auto pair_up = adjoint(pair_down);
  auto h0 = ayd * ay + axd * ax;
  auto h1 = ayd * ay - axd * ax;
  auto h2 = pair_down + pair_up;
  auto h3 = Complex(0.0, -1.0) * (pair_down - pair_up);
  return {std::move(h0), std::move(h1), std::move(h2), std::move(h3)};
}

TwoModeOperator safe_projector(const FockSpace& space) {
  if (space.cutoff() < 2)
    throw std::invalid_argument(
        "safe_projector: cutoff must be >= 2 for a nonempty safe subspace");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  const int max_total = space.cutoff() - 2;
  for (int nx = 0; nx <= space.cutoff(); ++nx)
    for (int ny = 0; ny <= space.cutoff(); ++ny)
      if (nx + ny <= max_total)
        m(space.index(nx, ny), space.index(nx, ny)) = 1.0;
  return {space, std::move(m)};
}

AlgebraReport verify_algebra(const FockSpace& space) {
  if (space.cutoff() < 3)
    throw std::invalid_argument("verify_algebra: cutoff must be >= 3");
  constexpr double tol = 1e-10;

  const auto S = stokes_ops(space);
  const auto H = hidden_ops(space);
  const auto P = safe_projector(space);
  const auto I = identity_op(space);
  const Complex i2{0.0, 2.0};

  AlgebraReport report;
  report.cutoff = space.cutoff();
  report.safe_total = space.cutoff() - 2;

  auto residual = [&](const TwoModeOperator& expr) {
    return operator_norm((P * expr * P).matrix);
  };
  auto add = [&](std::string relation, const TwoModeOperator& expr) {
    const double r = residual(expr);
    report.checks.push_back({std::move(relation), r, tol, r < tol});
  };

  add("[H1, H0]", commutator(H[1], H[0]));
  add("[H1, H2]", commutator(H[1], H[2]));
  add("[H1, H3]", commutator(H[1], H[3]));
  add("[H0, H3] - 2i H2", commutator(H[0], H[3]) - i2 * H[2]);
  add("[H2, H3] - 2i (1 + H0)", commutator(H[2], H[3]) - i2 * (I + H[0]));
  add("H1^2 + H2^2 + H3^2 - H0^2 - 2 (1 + H0)",
      H[1] * H[1] + H[2] * H[2] + H[3] * H[3] - H[0] * H[0] -
          Complex(2.0, 0.0) * (I + H[0]));
  add("[S1, S2] - 2i S3", commutator(S[1], S[2]) - i2 * S[3]);
  add("[S2, S3] - 2i S1", commutator(S[2], S[3]) - i2 * S[1]);
  add("[S3, S1] - 2i S2", commutator(S[3], S[1]) - i2 * S[2]);

  const auto h0h2 = commutator(H[0], H[2]);
  report.h0h2_minus_residual = residual(h0h2 + i2 * H[3]);
  report.h0h2_plus_residual = residual(h0h2 - i2 * H[3]);
  const bool minus_zero = report.h0h2_minus_residual < tol;
  const bool plus_zero = report.h0h2_plus_residual < tol;
  report.sign_unambiguous = minus_zero != plus_zero;
  if (minus_zero && !plus_zero) {
    report.resolved_sign = "-";
    report.sign_note =
        "[H0, H2] closes with the minus sign: ||[H0,H2] + 2i H3|| = " +
        format_double(report.h0h2_minus_residual) +
        " while the '+' variant leaves ||[H0,H2] - 2i H3|| = " +
        format_double(report.h0h2_plus_residual) +
        ". This follows from [H0, ay ax] = -2 ay ax.";
  } else if (plus_zero && !minus_zero) {
    report.resolved_sign = "+";
    report.sign_note =
        "[H0, H2] closes with the plus sign: ||[H0,H2] - 2i H3|| = " +
        format_double(report.h0h2_plus_residual) +
        " while the '-' variant leaves ||[H0,H2] + 2i H3|| = " +
        format_double(report.h0h2_minus_residual) + ".";
  } else if (minus_zero && plus_zero) {
    report.resolved_sign = "ambiguous";
    report.sign_note =
        "both sign candidates vanish: on total photon number <= " +
        std::to_string(report.safe_total) +
        " the pair operators have no matrix elements, so this cutoff "
        "cannot resolve the sign; use cutoff >= 4";
  } else {
    report.resolved_sign = "ambiguous";
    report.sign_note =
        "neither sign of [H0, H2] = -/+ 2i H3 closes at tolerance " +
        format_double(tol) + " (residuals " +
        format_double(report.h0h2_minus_residual) + " / " +
        format_double(report.h0h2_plus_residual) + ")";
  }

  report.all_pass = report.sign_unambiguous;
  for (const auto& check : report.checks)
    report.all_pass = report.all_pass && check.pass;
  return report;
}

std::string to_json(const AlgebraReport& report) {
  json j;
  j["all_pass"] = report.all_pass;
  j["checks"] = json::array();
  for (const auto& check : report.checks) {
    j["checks"].push_back({{"relation", check.relation},
                           {"residual", check.residual},
                           {"tolerance", check.tolerance},
                           {"pass", check.pass}});
  }
  j["cutoff"] = report.cutoff;
  j["h0h2_sign"] = {{"minus_residual", report.h0h2_minus_residual},
                    {"plus_residual", report.h0h2_plus_residual},
                    {"resolved_sign", report.resolved_sign},
                    {"unambiguous", report.sign_unambiguous},
                    {"note", report.sign_note}};
  j["safe_total"] = report.safe_total;
  return j.dump(2);
}

namespace {

std::string residual_text(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", value);
  return buf;
}

}  // namespace

std::string to_text(const AlgebraReport& report) {
  std::ostringstream out;
  out << "operator algebra at cutoff " << report.cutoff
      << " (identities on total photons <= " << report.safe_total << ")\n";
  for (const auto& check : report.checks) {
    out << "  " << (check.pass ? "pass" : "FAIL") << "  residual "
        << residual_text(check.residual) << "  " << check.relation << "\n";
  }
  out << "  [H0, H2] sign: '" << report.resolved_sign
      << "'  (||[H0,H2]+2iH3|| = "
      << residual_text(report.h0h2_minus_residual)
      << ", ||[H0,H2]-2iH3|| = "
      << residual_text(report.h0h2_plus_residual) << ")\n";
  out << "  " << report.sign_note << "\n";
  out << "  overall: " << (report.all_pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

DensityState vacuum_state(const FockSpace& space) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  rho(space.index(0, 0), space.index(0, 0)) = 1.0;
  return {space, std::move(rho)};
}

namespace {

// c(n) = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built by stable recurrence
Eigen::VectorXcd coherent_coeffs(Complex alpha, int cutoff) {
  Eigen::VectorXcd c(cutoff + 1);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= cutoff; ++n)
    c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

}  // namespace

DensityState coherent_state(Complex alpha_x, Complex alpha_y,
                            const FockSpace& space,
                            double* tail_probability) {
  const auto cx = coherent_coeffs(alpha_x, space.cutoff());
  const auto cy = coherent_coeffs(alpha_y, space.cutoff());
  Eigen::VectorXcd v(space.dim());
  for (int nx = 0; nx <= space.cutoff(); ++nx)
    for (int ny = 0; ny <= space.cutoff(); ++ny)
      v(space.index(nx, ny)) = cx(nx) * cy(ny);
  const double kept = v.squaredNorm();
  if (!(kept > 0.0))
    throw std::invalid_argument(
        "coherent_state: cutoff far too small for the requested amplitudes");
  if (tail_probability) *tail_probability = std::max(0.0, 1.0 - kept);
  v /= std::sqrt(kept);
  return {space, v * v.adjoint()};
}

DensityState hops_mixture(double chi_h, double delta_h, double amp,
                          int phase_grid, const FockSpace& space,
                          double* max_tail_probability) {
  if (!(chi_h >= 0.0 && chi_h <= pi))
    throw std::invalid_argument("hops_mixture: chi_h must lie in [0, pi]");
  if (!(delta_h > -pi && delta_h <= pi))
    throw std::invalid_argument(
        "hops_mixture: delta_h must lie in (-pi, pi]");
  if (!(amp >= 0.0) || !std::isfinite(amp))
    throw std::invalid_argument("hops_mixture: amp must be finite and >= 0");
  if (phase_grid < 1)
    throw std::invalid_argument("hops_mixture: phase_grid must be >= 1");

  const double mag_x = amp * std::cos(0.5 * chi_h);
  const double mag_y = amp * std::sin(0.5 * chi_h);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  double worst_tail = 0.0;
  for (int k = 0; k < phase_grid; ++k) {
    const double phi = two_pi * static_cast<double>(k) / phase_grid;
    const Complex alpha_x = std::polar(mag_x, phi + 0.5 * delta_h);
    const Complex alpha_y = std::polar(mag_y, -phi + 0.5 * delta_h);
    double tail = 0.0;
    rho += coherent_state(alpha_x, alpha_y, space, &tail).rho;
    worst_tail = std::max(worst_tail, tail);
  }
  rho /= static_cast<double>(phase_grid);
  if (max_tail_probability) *max_tail_probability = worst_tail;
  return {space, std::move(rho)};
}

Complex expectation(const DensityState& rho, const TwoModeOperator& op) {
  if (!(rho.space == op.space))
    throw std::logic_error(
        "expectation: state and operator live on different Fock spaces");
  return trace_product(rho.rho, op.matrix);
}

double variance(const DensityState& rho, const TwoModeOperator& op) {
  const double mean = expectation(rho, op).real();
  const double second = expectation(rho, op * op).real();
  return second - mean * mean;
}

UncertaintyCheck uncertainty_check(const DensityState& rho, int j, int k) {
  if (j < 0 || j > 3 || k < 0 || k > 3 || j == k)
    throw std::invalid_argument(
        "uncertainty_check: indices must be distinct and in 0..3");
  const auto H = hidden_ops(rho.space);
  UncertaintyCheck out;
  out.var_j = variance(rho, H[j]);
  out.var_k = variance(rho, H[k]);
  out.bound = std::norm(expectation(rho, commutator(H[j], H[k])) / 2.0);
  out.satisfied = out.var_j * out.var_k >= out.bound - 1e-10;
  return out;
}

Complex coherence(const DensityState& rho, int m_x, int m_y, int n_x,
                  int n_y) {
  if (m_x < 0 || m_y < 0 || n_x < 0 || n_y < 0)
    throw std::invalid_argument("coherence: orders must be >= 0");
  if (m_x + m_y + n_x + n_y > rho.space.cutoff())
    throw std::invalid_argument(
        "coherence: total order exceeds the cutoff");
  const auto ax = ladder(Mode::X, rho.space).matrix;
  const auto ay = ladder(Mode::Y, rho.space).matrix;
  Eigen::MatrixXcd acc =
      Eigen::MatrixXcd::Identity(rho.space.dim(), rho.space.dim());
  const Eigen::MatrixXcd axd = ax.adjoint();
  const Eigen::MatrixXcd ayd = ay.adjoint();
  for (int i = 0; i < m_x; ++i) acc = acc * axd;
  for (int i = 0; i < m_y; ++i) acc = acc * ayd;
  for (int i = 0; i < n_x; ++i) acc = acc * ax;
  for (int i = 0; i < n_y; ++i) acc = acc * ay;
  return trace_product(rho.rho, acc);
}

double check_polarization_criterion(const DensityState& rho, Complex p) {
  const auto P = safe_projector(rho.space).matrix;
  const auto ax = ladder(Mode::X, rho.space).matrix;
  const auto ay = ladder(Mode::Y, rho.space).matrix;
  return operator_norm(P * (ay * rho.rho - p * (ax * rho.rho)) * P);
}

double check_hops_criterion(const DensityState& rho, Complex p_h) {
  const auto P = safe_projector(rho.space).matrix;
  const auto ax = ladder(Mode::X, rho.space).matrix;
  const auto ay = ladder(Mode::Y, rho.space).matrix;
  return operator_norm(
      P * (ay * rho.rho - p_h * (rho.rho * ax.adjoint())) * P);
}

FactorizationReport check_factorization(const DensityState& rho,
                                        Complex index, CriterionKind kind,
                                        int max_order) {
  if (max_order < 1)
    throw std::invalid_argument("check_factorization: max_order must be >= 1");
  if (max_order > rho.space.cutoff())
    throw std::invalid_argument(
        "check_factorization: max_order exceeds the cutoff");

  FactorizationReport report;
  report.max_order = max_order;
  // Regularizer for tuples where both sides legitimately vanish (phase
  // averaging kills most of them). States are unit trace, so coherences
  // below this floor are numerical zeros, not signal.
  constexpr double eps = 1e-9;
  for (int m_x = 0; m_x <= max_order; ++m_x) {
    for (int m_y = 0; m_y + m_x <= max_order; ++m_y) {
      for (int n_x = 0; n_x + m_y + m_x <= max_order; ++n_x) {
        for (int n_y = 0; n_y + n_x + m_y + m_x <= max_order; ++n_y) {
          const Complex lhs = coherence(rho, m_x, m_y, n_x, n_y);
          // conjugating the index relation swaps which side the y-orders
          // recombine on in the hidden case
          const Complex base =
              kind == CriterionKind::Polarized
                  ? coherence(rho, m_x + m_y, 0, n_x + n_y, 0)
                  : coherence(rho, m_x + n_y, 0, n_x + m_y, 0);
          const Complex rhs =
              ipow(std::conj(index), m_y) * ipow(index, n_y) * base;
          const double rel =
              std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + eps);
          if (rel > report.worst_residual) {
            report.worst_residual = rel;
            report.worst_tuple = {m_x, m_y, n_x, n_y};
          }
        }
      }
    }
  }
  return report;
}

void write_matrix_csv(const Eigen::MatrixXcd& m, const FockSpace& space,
                      const std::string& label, std::ostream& out) {
  out << "# two-mode-fock label=" << label << " cutoff=" << space.cutoff()
      << " dim=" << space.dim()
      << " ordering=nx-major layout=row-major entries=re,im\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c).real()) << ','
          << format_double(m(r, c).imag());
    }
    out << '\n';
  }
}

void write_matrix_csv(const Eigen::MatrixXcd& m, const FockSpace& space,
                      const std::string& label,
                      const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_matrix_csv(m, space, label, buffer);
  atomic_write_file(path, buffer.str());
}

}  // namespace hops
