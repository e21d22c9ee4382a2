#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qnm/qmat.hpp"

namespace qnm {

/// Normalized mixture of Gaussians in angular frequency (rad/s).
struct SpectralComponent {
  double weight;        // positive, weights sum to 1
  double center_omega;  // rad/s
  double sigma_omega;   // rad/s, positive
};

class SpectralProfile {
 public:
  explicit SpectralProfile(std::vector<SpectralComponent> components);

  static SpectralProfile single_gaussian(double center_omega, double sigma_omega);

  const std::vector<SpectralComponent>& components() const { return comps_; }

 private:
  std::vector<SpectralComponent> comps_;
};

/// Pure dephasing in the rotated basis n(axis) with decoherence factor
/// kappa(tau). The time coordinate is the effective optical path
/// tau = path_scale * t (refractive-index difference times physical time).
struct DephasingFamily {
  SpectralProfile profile;
  BlochAngle axis;          // Bloch direction of the dephasing eigenbasis
  double path_scale = 1.0;  // tau per unit scenario time
};

/// Damping of the excited level |1> with Lorentzian-bath decay amplitude
/// G(t); gamma0 > lambda/2 puts the family in the oscillatory regime.
struct AmplitudeDampingFamily {
  double gamma0;  // coupling, 1/s
  double lambda;  // spectral width, 1/s
};

/// Pauli (random-unitary) channel family with rate parameter c. lambda_nm = 0
/// selects the flat-rate schedule; lambda_nm > 0 modulates the z rate.
struct RandomUnitaryFamily {
  double c;               // 1/s
  double lambda_nm = 0.0;
};

using ChannelFamily = std::variant<DephasingFamily, AmplitudeDampingFamily, RandomUnitaryFamily>;

/// 4x4 real Pauli transfer matrix, row-major; basis order (I, x, y, z).
using Ptm = std::array<double, 16>;

/// Qubit channel stored as the (unnormalized) Choi matrix
/// sum_ij map(E_ij) (x) E_ij with complete-positivity and trace metadata.
class QubitChannel {
 public:
  static QubitChannel identity();
  static QubitChannel from_map(const std::function<ComplexMatrix(const ComplexMatrix&)>& map);
  static QubitChannel from_choi(const ComplexMatrix& choi);
  static QubitChannel from_ptm(const Ptm& t);

  const ComplexMatrix& choi() const { return choi_; }
  bool trace_preserving() const { return trace_preserving_; }
  bool completely_positive() const { return cp_; }
  double choi_min_eigenvalue() const { return choi_min_eig_; }

  Ptm ptm() const;

  /// Apply to a 2x2 matrix (not restricted to states).
  ComplexMatrix apply_matrix(const ComplexMatrix& rho) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

 private:
  explicit QubitChannel(ComplexMatrix choi);
  ComplexMatrix choi_;
  bool trace_preserving_ = false;
  bool cp_ = false;
  double choi_min_eig_ = 0.0;
};

/// Decoherence factor of a Gaussian-mixture profile at effective path tau:
/// sum_j w_j exp(-i w0_j tau) exp(-sigma_j^2 tau^2 / 2).
cx kappa(const SpectralProfile& profile, double tau);

/// Decay amplitude G(t); complex branch handles both the monotone
/// (gamma0 < lambda/2) and oscillatory regimes.
cx ad_G(const AmplitudeDampingFamily& family, double t);

/// d/dt log G(t), analytic. Diverges at zeros of G.
cx ad_log_derivative(const AmplitudeDampingFamily& family, double t);

/// Zeros of G on [0, t_max], located by scan plus bisection.
std::vector<double> ad_G_zeros(const AmplitudeDampingFamily& family, double t_max);

/// Pauli-channel weights (p0, p1, p2, p3) at time t; they sum to one.
std::array<double, 4> ru_weights(const RandomUnitaryFamily& family, double t);

QubitChannel dephasing_channel(const DephasingFamily& family, double t);
QubitChannel amplitude_damping_channel(cx g);
QubitChannel random_unitary_channel(const std::array<double, 4>& weights);

/// Forward map of any family at time t (identity at t = 0).
QubitChannel channel_at(const ChannelFamily& family, double t);

/// (map (x) I) acting on the A side of a two-qubit state.
DensityMatrix apply_local_a(const QubitChannel& channel, const DensityMatrix& rho_ab);
ComplexMatrix apply_local_a_matrix(const QubitChannel& channel, const ComplexMatrix& rho_ab);

/// a after b (first b, then a), via the transfer-matrix product.
QubitChannel compose(const QubitChannel& a, const QubitChannel& b);

/// Intermediate map from time s to time t > s, obtained by inverting the
/// forward map at s in the transfer representation. Always trace preserving;
/// the cp flag reports whether it is a physical channel. Throws
/// NumericalError when the forward map at s is singular (transfer-matrix
/// condition number above 1e8).
QubitChannel intermediate_map(const ChannelFamily& family, double s, double t);

struct DivisibilityReport {
  bool cp_divisible = true;
  std::optional<double> first_violation_time;
};

/// Checks complete positivity of every consecutive intermediate map on the
/// grid; reports the left endpoint of the earliest violating step.
DivisibilityReport is_cp_divisible(const ChannelFamily& family, std::span<const double> tgrid);

/// Time-local generator of a master equation: either the damping form with a
/// frequency-shift term S(t) and rate gamma(t), or three Pauli dephasing
/// rates. The damping convention keeps |1> as the decaying level.
struct GeneratorSchedule {
  enum class Kind { amplitude_damping, multiple_decoherence };
  Kind kind;
  std::function<double(double)> lamb_shift;             // S(t), damping only
  std::function<double(double)> gamma;                  // gamma(t), damping only
  std::array<std::function<double(double)>, 3> gammas;  // multiple decoherence
};

GeneratorSchedule schedule_for(const AmplitudeDampingFamily& family);
GeneratorSchedule schedule_for(const RandomUnitaryFamily& family);

/// Fixed-step RK4 integration of the master equation, sampled at the given
/// strictly increasing grid (the first grid point carries rho0 unevolved when
/// it is the initial time). Substeps are capped at 1e-3 / max|rate| per grid
/// interval; per-step trace drift above 1e-9 is an error.
std::vector<DensityMatrix> integrate_master(const GeneratorSchedule& schedule,
                                            const DensityMatrix& rho0,
                                            std::span<const double> tgrid);

}  // namespace qnm
