#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnm {

using cx = std::complex<double>;

/// Raised when an input violates a numerical contract (non-Hermitian state,
/// trace drift, singular map, ...). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for malformed configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Dense row-major complex matrix of dimension 2 or 4.
class ComplexMatrix {
 public:
  ComplexMatrix() : dim_(2) { a_.fill(cx{}); }

  explicit ComplexMatrix(int dim) : dim_(dim) {
    check_dim(dim);
    a_.fill(cx{});
  }

  ComplexMatrix(int dim, std::initializer_list<cx> entries) : dim_(dim) {
    check_dim(dim);
    if (static_cast<int>(entries.size()) != dim * dim)
      throw NumericalError("ComplexMatrix: wrong entry count");
    a_.fill(cx{});
    int k = 0;
    for (cx v : entries) a_[k++] = v;
  }

  static ComplexMatrix zero(int dim) { return ComplexMatrix(dim); }

  static ComplexMatrix identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  int dim() const { return dim_; }

  cx& operator()(int r, int c) { return a_[r * dim_ + c]; }
  cx operator()(int r, int c) const { return a_[r * dim_ + c]; }

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cx s);

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  cx trace() const;
  double max_abs() const;
  double frobenius_norm() const;

  /// max |M - M^dagger| over all entries.
  double hermiticity_defect() const;

  bool is_finite() const;

 private:
  static void check_dim(int dim) {
    if (dim != 2 && dim != 4) throw NumericalError("ComplexMatrix: dim must be 2 or 4");
  }

  int dim_;
  std::array<cx, 16> a_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cx s, ComplexMatrix a);

/// max |A - B| over entries; dimensions must match.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// |v><w| for vectors of equal length 2 or 4.
ComplexMatrix outer(const std::vector<cx>& v, const std::vector<cx>& w);

/// Kronecker product of two 2x2 matrices (index convention (a,b) -> 2a+b).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();
const ComplexMatrix& identity2();

/// Polar/azimuthal direction on the Bloch sphere. The constructor folds any
/// real pair into theta in [0,pi], phi in [0,2*pi).
struct BlochAngle {
  double theta = 0.0;
  double phi = 0.0;

  BlochAngle() = default;
  BlochAngle(double theta_, double phi_);
};

/// Orthonormal basis of C^2 or C^4 (pairwise overlaps within 1e-10).
class OrthonormalBasis {
 public:
  OrthonormalBasis(int dim, std::vector<std::vector<cx>> vectors);

  /// Computational (sigma_z eigen-) basis.
  static OrthonormalBasis computational(int dim);

  /// Eigenbasis of sigma.n(theta,phi); first vector is the +1 eigenvector.
  static OrthonormalBasis from_bloch(const BlochAngle& angle);

  /// Product basis {a_i (x) b_j} ordered with the second factor fastest.
  static OrthonormalBasis product(const OrthonormalBasis& a, const OrthonormalBasis& b);

  int dim() const { return dim_; }
  const std::vector<cx>& vector(int i) const { return vecs_[i]; }
  ComplexMatrix projector(int i) const;

 private:
  int dim_;
  std::vector<std::vector<cx>> vecs_;
};

/// Unit-trace, PSD, Hermitian state of one or two qubits. Construction
/// symmetrizes, clips eigenvalues in (-1e-9, 0) to zero and renormalizes;
/// inputs outside the tolerances are rejected.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(const ComplexMatrix& m);

  /// Normalized |psi><psi| from (not necessarily normalized) amplitudes.
  static DensityMatrix pure(const std::vector<cx>& amplitudes);

  static DensityMatrix maximally_mixed(int dim);

  const ComplexMatrix& mat() const { return m_; }
  int dim() const { return m_.dim(); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

enum class Keep { A, B };

/// Reduced state of a two-qubit density matrix.
DensityMatrix partial_trace(const DensityMatrix& rho, Keep keep);

struct HermEig {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // columns are the matching eigenvectors
};

/// Eigendecomposition of a Hermitian matrix (defect up to 1e-10 is
/// symmetrized away, larger defects are an error). 2x2 uses the closed form,
/// 4x4 cyclic complex Jacobi rotations.
HermEig herm_eig(const ComplexMatrix& h);

/// Von Neumann entropy in bits; eigenvalues below 1e-12 contribute zero.
double von_neumann_entropy(const DensityMatrix& rho);

struct RelativeEntropyResult {
  double bits = 0.0;
  bool infinite = false;  // support of rho not contained in support of chi
};

/// Quantum relative entropy S(rho||chi) in bits.
RelativeEntropyResult relative_entropy(const DensityMatrix& rho, const DensityMatrix& chi);

/// (1/2) * sum |eig(rho - tau)|.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& tau);

/// Full dephasing sum_i P_i rho P_i in the given basis.
DensityMatrix dephase(const DensityMatrix& rho, const OrthonormalBasis& basis);

/// Dephasing of the B side only: sum_i (I (x) P_i) rho (I (x) P_i).
DensityMatrix dephase_side_b(const DensityMatrix& rho_ab, const OrthonormalBasis& bob_basis);

}  // namespace qnm
