#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hops/polarization.hpp"

namespace hops {

/// Two-mode Fock space truncated at `cutoff` photons per mode.
/// States are indexed n_x-major: index = n_x * (cutoff + 1) + n_y.
class FockSpace {
 public:
  explicit FockSpace(int cutoff);

  int cutoff() const { return cutoff_; }
  int dim() const { return (cutoff_ + 1) * (cutoff_ + 1); }
  int index(int n_x, int n_y) const { return n_x * (cutoff_ + 1) + n_y; }

  friend bool operator==(const FockSpace&, const FockSpace&) = default;

 private:
  int cutoff_;
};

struct TwoModeOperator {
  FockSpace space;
  Eigen::MatrixXcd matrix;
};

/// Arithmetic on operators over the same space (mismatched spaces throw
/// std::logic_error), so operator identities read like the algebra they
/// verify.
TwoModeOperator operator+(const TwoModeOperator& a, const TwoModeOperator& b);
TwoModeOperator operator-(const TwoModeOperator& a, const TwoModeOperator& b);
TwoModeOperator operator*(const TwoModeOperator& a, const TwoModeOperator& b);
TwoModeOperator operator*(Complex scale, const TwoModeOperator& a);
TwoModeOperator adjoint(const TwoModeOperator& a);
TwoModeOperator commutator(const TwoModeOperator& a, const TwoModeOperator& b);
TwoModeOperator identity_op(const FockSpace& space);

/// Largest singular value.
double operator_norm(const Eigen::MatrixXcd& m);

enum class Mode { X, Y };

/// Annihilation operator for one mode (identity on the other): matrix
/// elements sqrt(n) coupling n -> n-1 in that mode.
TwoModeOperator ladder(Mode mode, const FockSpace& space);

/// Stokes operators:
///   S0 = ay^ ay + ax^ ax,  S1 = ay^ ay - ax^ ax,  S2 + iS3 = 2 ay^ ax.
std::array<TwoModeOperator, 4> stokes_ops(const FockSpace& space);

/// Hidden-polarization operators:
///   H0 = S0,  H1 = S1,  H2 + iH3 = 2 ay ax.
/// The free-evolution phase on H2/H3 is a rigid rotation of the (H2, H3)
/// pair and is dropped; everything here is evaluated at a fixed time.
std::array<TwoModeOperator, 4> hidden_ops(const FockSpace& space);

/// Projector onto total photon number <= cutoff - 2. The pair-creation part
/// of H2/H3 couples into the truncation edge, so operator identities only
/// close away from it; every residual in this module is evaluated as
/// ||P (expr) P||. Requires cutoff >= 2 for the subspace to be nonempty.
TwoModeOperator safe_projector(const FockSpace& space);

struct AlgebraCheck {
  std::string relation;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct AlgebraReport {
  int cutoff = 0;
  int safe_total = 0;  ///< identities verified on total photons <= this
  std::vector<AlgebraCheck> checks;  ///< expected-zero relations

  /// Both sign candidates for [H0, H2] = -/+ 2i H3. Exactly one should
  /// vanish; the report states which, rather than assuming either.
  double h0h2_minus_residual = 0.0;  ///< || [H0,H2] + 2i H3 ||
  double h0h2_plus_residual = 0.0;   ///< || [H0,H2] - 2i H3 ||
  std::string resolved_sign;         ///< "-", "+", or "ambiguous"
  bool sign_unambiguous = false;
  std::string sign_note;

  bool all_pass = false;
};

/// Evaluate the closure relations of the hidden-polarization algebra (and
/// the Stokes algebra for reference) on the safe subspace. Requires
/// cutoff >= 3.
AlgebraReport verify_algebra(const FockSpace& space);

std::string to_json(const AlgebraReport& report);
std::string to_text(const AlgebraReport& report);

struct DensityState {
  FockSpace space;
  Eigen::MatrixXcd rho;
};

/// |0,0><0,0|.
DensityState vacuum_state(const FockSpace& space);

/// Truncation tail above which coherent-state preparation should be
/// flagged; keep |alpha|^2 <= cutoff/4 to stay well clear of it.
inline constexpr double kCoherentTailWarn = 1e-8;

/// Product coherent state, renormalized after truncation. The probability
/// weight lost to truncation is reported through `tail_probability` when
/// provided; compare against kCoherentTailWarn.
DensityState coherent_state(Complex alpha_x, Complex alpha_y,
                            const FockSpace& space,
                            double* tail_probability = nullptr);

/// Equal-weight mixture over the phase grid phi_k = 2 pi k / phase_grid of
/// coherent states with
///   alpha_x = amp cos(chi_h/2) e^{i(phi_k + delta_h/2)}
///   alpha_y = amp sin(chi_h/2) e^{i(-phi_k + delta_h/2)}.
/// Every component satisfies alpha_y = p_h conj(alpha_x) with
/// p_h = tan(chi_h/2) e^{i delta_h}, which is what makes the mixture
/// hidden-polarized. `max_tail_probability` reports the worst component
/// truncation tail.
DensityState hops_mixture(double chi_h, double delta_h, double amp,
                          int phase_grid, const FockSpace& space,
                          double* max_tail_probability = nullptr);

/// Tr[rho op].
Complex expectation(const DensityState& rho, const TwoModeOperator& op);

/// <op^2> - <op>^2 for a hermitian op (real parts taken).
double variance(const DensityState& rho, const TwoModeOperator& op);

struct UncertaintyCheck {
  double var_j = 0.0;
  double var_k = 0.0;
  double bound = 0.0;  ///< |<[H_j, H_k]>/2|^2
  bool satisfied = false;
};

/// Heisenberg inequality var(H_j) var(H_k) >= |<[H_j,H_k]>/2|^2, with a
/// 1e-10 slack so saturating states (the vacuum saturates the (2,3) pair
/// exactly) do not fail on rounding. Indices j, k in 0..3, j != k.
UncertaintyCheck uncertainty_check(const DensityState& rho, int j, int k);

/// Normally ordered coherence Tr[rho ax^^m_x ay^^m_y ax^n_x ay^n_y].
/// Total order m_x + m_y + n_x + n_y must not exceed the cutoff.
Complex coherence(const DensityState& rho, int m_x, int m_y, int n_x, int n_y);

/// || P (ay rho - p ax rho) P ||: zero iff the state is perfectly polarized
/// with ordinary index p (on the safe subspace).
double check_polarization_criterion(const DensityState& rho, Complex p);

/// || P (ay rho - p_h rho ax^) P ||: the hidden-polarization analogue; note
/// the density operator sits *between* the two mode operators.
double check_hops_criterion(const DensityState& rho, Complex p_h);

enum class CriterionKind { Polarized, Hops };

struct FactorizationReport {
  double worst_residual = 0.0;
  std::array<int, 4> worst_tuple{};  ///< (m_x, m_y, n_x, n_y)
  int max_order = 0;
};

/// Check that every coherence of total order <= max_order factorizes into a
/// single-mode coherence times powers of the index:
///   Polarized: G(m_x,m_y,n_x,n_y) = conj(p)^m_y p^n_y G(m_x+m_y,0,n_x+n_y,0)
///   Hops:      G(m_x,m_y,n_x,n_y) = conj(p_h)^m_y p_h^n_y G(m_x+n_y,0,n_x+m_y,0)
/// In the hidden case the conjugation swaps which side the y-orders attach
/// to: pushing ay through rho with ay rho = p_h rho ax^ turns creation
/// orders into annihilation orders and vice versa. Residuals are relative,
/// |LHS-RHS| / (|LHS|+|RHS|+1e-9); the regularizer keeps tuples where both
/// sides legitimately vanish from amplifying roundoff (states are unit
/// trace, so coherences below it are numerical zeros). The worst tuple is
/// returned.
FactorizationReport check_factorization(const DensityState& rho,
                                        Complex index, CriterionKind kind,
                                        int max_order);

/// Matrix dumps: a `# two-mode-fock` header naming the cutoff, dimension
/// and index ordering, then one CSV line per matrix row with interleaved
/// re, im entries. Path overloads write atomically.
void write_matrix_csv(const Eigen::MatrixXcd& m, const FockSpace& space,
                      const std::string& label, std::ostream& out);
void write_matrix_csv(const Eigen::MatrixXcd& m, const FockSpace& space,
                      const std::string& label,
                      const std::filesystem::path& path);

}  // namespace hops
