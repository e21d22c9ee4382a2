#pragma once

#include <utility>
#include <vector>

#include "qnm/qmat.hpp"

namespace qnm {

/// Two-outcome projective measurement onto the eigenvectors of
/// sigma.n(theta,phi). The projectors sum to the identity by construction.
struct ProjectiveMeasurement {
  BlochAngle angle;

  std::array<ComplexMatrix, 2> projectors() const;
};

struct SteeredOutcome {
  double probability = 0.0;
  DensityMatrix state = DensityMatrix::maximally_mixed(2);
  bool negligible = false;  // probability < 1e-12; state is a placeholder
};

struct SteeredEnsemble {
  std::vector<SteeredOutcome> outcomes;
};

struct SicOptions {
  int grid_phi = 36;        // azimuthal points over [0, 2*pi)
  int grid_theta = 18;      // polar points over [0, pi/2] (antipodes coincide)
  double value_tol = 1e-8;  // simplex convergence tolerance on the value
  int max_iterations = 200;
  bool record_trace = false;
  int jobs = 1;  // parallel width of the grid scan; 1 = serial
};

struct SicResult {
  double value = 0.0;
  ProjectiveMeasurement optimal_measurement;
  bool converged = true;
  std::vector<std::pair<BlochAngle, double>> optimizer_trace;
};

/// Relative entropy of coherence C_r = S(dephase(rho)) - S(rho), in bits.
double rec(const DensityMatrix& rho, const OrthonormalBasis& basis);

/// Quantum-incoherent REC of a two-qubit state: coherence counted on the B
/// side only, S(dephase_B(rho)) - S(rho).
double qi_rec(const DensityMatrix& rho_ab, const OrthonormalBasis& bob_basis);

/// REC of the joint two-qubit state in a four-dimensional reference basis.
double extended_rec(const DensityMatrix& rho_ab, const OrthonormalBasis& basis_ab);

/// Born-rule ensemble steered on B by measuring A.
SteeredEnsemble steered_ensemble(const DensityMatrix& rho_ab, const ProjectiveMeasurement& m);

/// Average B coherence of a steered ensemble; negligible outcomes contribute 0.
double average_coherence(const SteeredEnsemble& ensemble, const OrthonormalBasis& bob_basis);

/// Steering-induced coherence: max over projective measurements on A of the
/// average coherence on B. Coarse grid scan plus simplex refinement.
SicResult sic(const DensityMatrix& rho_ab, const OrthonormalBasis& bob_basis,
              const SicOptions& options = {});

/// Two-qubit concurrence from the spin-flipped spectrum, clipped to [0,1].
double concurrence(const DensityMatrix& rho_ab);

}  // namespace qnm
