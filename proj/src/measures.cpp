#include "qnm/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qnm/detail/nelder_mead.hpp"
#include "qnm/parallel.hpp"

namespace qnm {

namespace {

constexpr double kNegligibleProb = 1e-12;

DensityMatrix apply_projector_side_a(const DensityMatrix& rho_ab, const ComplexMatrix& p,
                                     double& probability) {
  // Tr_A[(P (x) I) rho]; for a projector this equals the doubly projected
  // block, so no second multiplication is needed.
  const ComplexMatrix pa = kron(p, identity2());
  const ComplexMatrix m = pa * rho_ab.mat();
  ComplexMatrix red(2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 2; ++i) red(a, b) += m(2 * i + a, 2 * i + b);
  probability = red.trace().real();
  if (probability < kNegligibleProb) return DensityMatrix::maximally_mixed(2);
  red *= cx(1.0 / probability, 0.0);
  return DensityMatrix::from_matrix(red);
}

}  // namespace

std::array<ComplexMatrix, 2> ProjectiveMeasurement::projectors() const {
  const OrthonormalBasis basis = OrthonormalBasis::from_bloch(angle);
  return {basis.projector(0), basis.projector(1)};
}

double rec(const DensityMatrix& rho, const OrthonormalBasis& basis) {
  double c = von_neumann_entropy(dephase(rho, basis)) - von_neumann_entropy(rho);
  return c < 0.0 ? 0.0 : c;
}

double qi_rec(const DensityMatrix& rho_ab, const OrthonormalBasis& bob_basis) {
  double c = von_neumann_entropy(dephase_side_b(rho_ab, bob_basis)) - von_neumann_entropy(rho_ab);
  return c < 0.0 ? 0.0 : c;
}

double extended_rec(const DensityMatrix& rho_ab, const OrthonormalBasis& basis_ab) {
  if (basis_ab.dim() != 4) throw NumericalError("extended_rec: need a 4-dimensional basis");
  return rec(rho_ab, basis_ab);
}

SteeredEnsemble steered_ensemble(const DensityMatrix& rho_ab, const ProjectiveMeasurement& m) {
  if (rho_ab.dim() != 4) throw NumericalError("steered_ensemble: need a two-qubit state");
  const auto projectors = m.projectors();
  SteeredEnsemble out;
  out.outcomes.reserve(2);
  for (const ComplexMatrix& p : projectors) {
    SteeredOutcome o;
    o.state = apply_projector_side_a(rho_ab, p, o.probability);
    o.negligible = o.probability < kNegligibleProb;
    out.outcomes.push_back(std::move(o));
  }
  return out;
}

double average_coherence(const SteeredEnsemble& ensemble, const OrthonormalBasis& bob_basis) {
  double avg = 0.0;
  for (const SteeredOutcome& o : ensemble.outcomes) {
    if (o.negligible) continue;  // p * C_r -> 0 in the p -> 0 limit
    avg += o.probability * rec(o.state, bob_basis);
  }
  return avg;
}

namespace {

double sic_objective(const DensityMatrix& rho_ab, const OrthonormalBasis& bob_basis,
                     double theta, double phi) {
  const ProjectiveMeasurement m{BlochAngle(theta, phi)};
  return average_coherence(steered_ensemble(rho_ab, m), bob_basis);
}

detail::SphereVector sphere_vector(const BlochAngle& a) {
  return {std::sin(a.theta) * std::cos(a.phi), std::sin(a.theta) * std::sin(a.phi),
          std::cos(a.theta)};
}

BlochAngle angle_of(const detail::SphereVector& v) {
  return BlochAngle(std::acos(std::clamp(v.z, -1.0, 1.0)), std::atan2(v.y, v.x));
}

}  // namespace

SicResult sic(const DensityMatrix& rho_ab, const OrthonormalBasis& bob_basis,
              const SicOptions& options) {
  const int nphi = options.grid_phi;
  const int nth = options.grid_theta;
  const double dphi = 2.0 * std::numbers::pi / nphi;
  const double dth = (std::numbers::pi / 2.0) / (nth - 1);

  // Coarse scan over the measurement hemisphere (antipodal directions give
  // the same projector pair). Independent evaluations, serial reduction.
  std::vector<double> values(static_cast<std::size_t>(nphi) * nth);
  par::map_indices(nphi * nth, options.jobs, [&](int idx) {
    const int i = idx / nth;
    const int j = idx % nth;
    values[idx] = sic_objective(rho_ab, bob_basis, j * dth, i * dphi);
  });
  int best_idx = 0;
  for (int idx = 1; idx < nphi * nth; ++idx)
    if (values[idx] > values[best_idx]) best_idx = idx;

  SicResult result;
  double best_theta = (best_idx % nth) * dth;
  double best_phi = (best_idx / nth) * dphi;
  double best_value = values[best_idx];
  if (options.record_trace)
    result.optimizer_trace.emplace_back(BlochAngle(best_theta, best_phi), best_value);

  // Refine in the tangent plane of the best grid direction; the (theta, phi)
  // chart would pin simplices at the poles.
  std::function<void(const detail::SphereVector&, double)> recorder;
  if (options.record_trace)
    recorder = [&](const detail::SphereVector& dir, double v) {
      result.optimizer_trace.emplace_back(angle_of(dir), v);
    };
  const detail::SphereMaxResult refined = detail::maximize_on_sphere(
      [&](const detail::SphereVector& dir) {
        const BlochAngle a = angle_of(dir);
        return sic_objective(rho_ab, bob_basis, a.theta, a.phi);
      },
      sphere_vector(BlochAngle(best_theta, best_phi)), 0.5 * dth, options.value_tol,
      options.max_iterations, recorder);

  result.converged = refined.converged;
  BlochAngle best_angle(best_theta, best_phi);
  if (refined.value > best_value) {
    best_value = refined.value;
    best_angle = angle_of(refined.direction);
  }

  result.optimal_measurement = ProjectiveMeasurement{best_angle};
  // Re-evaluate at the reported measurement so the value/measurement pair is
  // exactly consistent.
  result.value =
      average_coherence(steered_ensemble(rho_ab, result.optimal_measurement), bob_basis);
  return result;
}

double concurrence(const DensityMatrix& rho_ab) {
  if (rho_ab.dim() != 4) throw NumericalError("concurrence: need a two-qubit state");
  const ComplexMatrix yy = kron(pauli_y(), pauli_y());
  const ComplexMatrix flipped = yy * rho_ab.mat().conjugate() * yy;

  // sqrt(rho) from the clipped eigendecomposition; the product
  // sqrt(rho) * flipped * sqrt(rho) is Hermitian PSD and shares its spectrum
  // with rho * flipped.
  const HermEig eig = herm_eig(rho_ab.mat());
  ComplexMatrix sqrt_rho(4);
  for (int k = 0; k < 4; ++k) {
    const double lam = eig.values[k];
    if (lam <= 0.0) continue;
    const double s = std::sqrt(lam);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        sqrt_rho(r, c) += s * eig.vectors(r, k) * std::conj(eig.vectors(c, k));
  }

  const HermEig prod = herm_eig(sqrt_rho * flipped * sqrt_rho);
  std::array<double, 4> lams{};
  for (int k = 0; k < 4; ++k) lams[k] = std::sqrt(std::max(0.0, prod.values[k]));
  std::sort(lams.begin(), lams.end(), std::greater<>());
  const double c = lams[0] - lams[1] - lams[2] - lams[3];
  return std::clamp(c, 0.0, 1.0);
}

}  // namespace qnm
