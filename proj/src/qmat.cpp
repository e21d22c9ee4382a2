#include "qnm/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qnm {

namespace {

constexpr double kEigZero = 1e-12;      // eigenvalues below this are treated as 0
constexpr double kJacobiOff = 1e-13;    // off-diagonal Frobenius norm target
constexpr int kJacobiMaxSweeps = 100;

double log2_clamped(double x) { return std::log2(x); }

}  // namespace

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  for (int i = 0; i < dim_ * dim_; ++i) a_[i] += o.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  for (int i = 0; i < dim_ * dim_; ++i) a_[i] -= o.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cx s) {
  for (int i = 0; i < dim_ * dim_; ++i) a_[i] *= s;
  return *this;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out(r, c) = std::conj((*this)(c, r));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out(r, c) = (*this)(c, r);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out(r, c) = std::conj((*this)(r, c));
  return out;
}

cx ComplexMatrix::trace() const {
  cx t{};
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < dim_ * dim_; ++i) m = std::max(m, std::abs(a_[i]));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (int i = 0; i < dim_ * dim_; ++i) s += std::norm(a_[i]);
  return std::sqrt(s);
}

double ComplexMatrix::hermiticity_defect() const {
  double m = 0.0;
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return m;
}

bool ComplexMatrix::is_finite() const {
  for (int i = 0; i < dim_ * dim_; ++i)
    if (!std::isfinite(a_[i].real()) || !std::isfinite(a_[i].imag())) return false;
  return true;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw NumericalError("matrix product: dimension mismatch");
  const int n = a.dim();
  ComplexMatrix out(n);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k < n; ++k) {
      const cx ark = a(r, k);
      if (ark == cx{}) continue;
      for (int c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

ComplexMatrix operator*(cx s, ComplexMatrix a) { return a *= s; }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw NumericalError("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (int r = 0; r < a.dim(); ++r)
    for (int c = 0; c < a.dim(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

ComplexMatrix outer(const std::vector<cx>& v, const std::vector<cx>& w) {
  if (v.size() != w.size() || (v.size() != 2 && v.size() != 4))
    throw NumericalError("outer: vectors must both have length 2 or 4");
  const int n = static_cast<int>(v.size());
  ComplexMatrix out(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(r, c) = v[r] * std::conj(w[c]);
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != 2 || b.dim() != 2) throw NumericalError("kron: both factors must be 2x2");
  ComplexMatrix out(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m(2, {0.0, 1.0, 1.0, 0.0});
  return m;
}

const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m(2, {0.0, cx(0, -1), cx(0, 1), 0.0});
  return m;
}

const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m(2, {1.0, 0.0, 0.0, -1.0});
  return m;
}

const ComplexMatrix& identity2() {
  static const ComplexMatrix m = ComplexMatrix::identity(2);
  return m;
}

BlochAngle::BlochAngle(double theta_, double phi_) {
  const double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta_, two_pi);
  if (t < 0) t += two_pi;
  double p = phi_;
  if (t > std::numbers::pi) {  // fold the lower branch back onto [0,pi]
    t = two_pi - t;
    p += std::numbers::pi;
  }
  p = std::fmod(p, two_pi);
  if (p < 0) p += two_pi;
  theta = t;
  phi = p;
}

OrthonormalBasis::OrthonormalBasis(int dim, std::vector<std::vector<cx>> vectors)
    : dim_(dim), vecs_(std::move(vectors)) {
  if (dim != 2 && dim != 4) throw NumericalError("OrthonormalBasis: dim must be 2 or 4");
  if (static_cast<int>(vecs_.size()) != dim)
    throw NumericalError("OrthonormalBasis: need dim vectors");
  for (int i = 0; i < dim; ++i) {
    if (static_cast<int>(vecs_[i].size()) != dim)
      throw NumericalError("OrthonormalBasis: vector length mismatch");
    for (int j = 0; j <= i; ++j) {
      cx ip{};
      for (int k = 0; k < dim; ++k) ip += std::conj(vecs_[j][k]) * vecs_[i][k];
      const double target = (i == j) ? 1.0 : 0.0;
      if (std::abs(ip - target) > 1e-10)
        throw NumericalError("OrthonormalBasis: vectors not orthonormal");
    }
  }
}

OrthonormalBasis OrthonormalBasis::computational(int dim) {
  std::vector<std::vector<cx>> vecs(dim, std::vector<cx>(dim, cx{}));
  for (int i = 0; i < dim; ++i) vecs[i][i] = 1.0;
  return OrthonormalBasis(dim, std::move(vecs));
}

OrthonormalBasis OrthonormalBasis::from_bloch(const BlochAngle& angle) {
  const double half = angle.theta / 2.0;
  const cx phase = std::polar(1.0, angle.phi);
  std::vector<std::vector<cx>> vecs = {
      {std::cos(half), phase * std::sin(half)},
      {std::sin(half), -phase * std::cos(half)},
  };
  return OrthonormalBasis(2, std::move(vecs));
}

OrthonormalBasis OrthonormalBasis::product(const OrthonormalBasis& a, const OrthonormalBasis& b) {
  if (a.dim() != 2 || b.dim() != 2)
    throw NumericalError("OrthonormalBasis::product: factors must be qubit bases");
  std::vector<std::vector<cx>> vecs;
  vecs.reserve(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::vector<cx> v(4);
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) v[2 * k + l] = a.vector(i)[k] * b.vector(j)[l];
      vecs.push_back(std::move(v));
    }
  return OrthonormalBasis(4, std::move(vecs));
}

ComplexMatrix OrthonormalBasis::projector(int i) const { return outer(vecs_[i], vecs_[i]); }

namespace {

// Eigen pair of the Hermitian 2x2 block [[a, w], [conj(w), b]] (a, b real).
// Returns eigenvalues (plus >= minus) and the unitary with the matching
// eigenvectors as columns. Stable for |w| -> 0.
struct TwoByTwoEig {
  double lam_plus, lam_minus;
  cx u00, u01, u10, u11;  // columns (u00,u10) and (u01,u11)
};

TwoByTwoEig eig2(double a, double b, cx w) {
  const double aw = std::abs(w);
  if (aw < 1e-300) {
    if (a >= b) return {a, b, 1.0, 0.0, 0.0, 1.0};
    return {b, a, 0.0, 1.0, 1.0, 0.0};
  }
  const double half_diff = 0.5 * (a - b);
  const double r = std::hypot(half_diff, aw);
  const double mean = 0.5 * (a + b);
  // component of the + eigenvector along the second axis, computed without
  // cancellation in either branch
  const double d_plus = (a >= b) ? (aw * aw) / (half_diff + r) : (-half_diff + r);
  const double n = std::sqrt(aw * aw + d_plus * d_plus);
  const cx v0 = w / n;
  const double v1 = d_plus / n;
  return {mean + r, mean - r, v0, -v1, v1, std::conj(v0)};
}

HermEig herm_eig_2x2(const ComplexMatrix& h) {
  const TwoByTwoEig e = eig2(h(0, 0).real(), h(1, 1).real(), h(0, 1));
  HermEig out;
  out.values = {e.lam_plus, e.lam_minus};
  out.vectors = ComplexMatrix(2, {e.u00, e.u01, e.u10, e.u11});
  return out;
}

double off_diagonal_norm(const ComplexMatrix& h) {
  double s = 0.0;
  for (int r = 0; r < h.dim(); ++r)
    for (int c = 0; c < h.dim(); ++c)
      if (r != c) s += std::norm(h(r, c));
  return std::sqrt(s);
}

HermEig herm_eig_jacobi(ComplexMatrix h) {
  const int n = h.dim();
  ComplexMatrix v = ComplexMatrix::identity(n);
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(h) < kJacobiOff) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(h(p, q)) < 1e-300) continue;
        const TwoByTwoEig e = eig2(h(p, p).real(), h(q, q).real(), h(p, q));
        ComplexMatrix j = ComplexMatrix::identity(n);
        j(p, p) = e.u00;
        j(p, q) = e.u01;
        j(q, p) = e.u10;
        j(q, q) = e.u11;
        h = j.adjoint() * h * j;
        v = v * j;
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = h(i, i).real();
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return diag[x] > diag[y]; });

  HermEig out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = diag[order[i]];
    for (int r = 0; r < n; ++r) out.vectors(r, i) = v(r, order[i]);
  }
  return out;
}

ComplexMatrix symmetrize(const ComplexMatrix& m) {
  ComplexMatrix out(m.dim());
  for (int r = 0; r < m.dim(); ++r)
    for (int c = 0; c < m.dim(); ++c) out(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
  return out;
}

}  // namespace

HermEig herm_eig(const ComplexMatrix& h) {
  if (!h.is_finite()) throw NumericalError("herm_eig: non-finite entries");
  if (h.hermiticity_defect() > 1e-10)
    throw NumericalError("herm_eig: matrix is not Hermitian within 1e-10");
  const ComplexMatrix s = symmetrize(h);
  return s.dim() == 2 ? herm_eig_2x2(s) : herm_eig_jacobi(s);
}

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m) {
  if (!m.is_finite()) throw NumericalError("DensityMatrix: non-finite entries");
  if (m.hermiticity_defect() > 1e-12)
    throw NumericalError("DensityMatrix: not Hermitian within 1e-12");
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > 1e-10)
    throw NumericalError("DensityMatrix: trace deviates from 1 by more than 1e-10");

  HermEig eig = herm_eig(m);
  double sum = 0.0;
  for (double& lam : eig.values) {
    if (lam < -1e-9)
      throw NumericalError("DensityMatrix: eigenvalue below -1e-9, state is not PSD");
    if (lam < 0.0) lam = 0.0;
    sum += lam;
  }
  const int n = m.dim();
  ComplexMatrix out(n);
  for (int k = 0; k < n; ++k) {
    const double w = eig.values[k] / sum;
    if (w == 0.0) continue;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        out(r, c) += w * eig.vectors(r, k) * std::conj(eig.vectors(c, k));
  }
  return DensityMatrix(symmetrize(out));
}

DensityMatrix DensityMatrix::pure(const std::vector<cx>& amplitudes) {
  if (amplitudes.size() != 2 && amplitudes.size() != 4)
    throw NumericalError("DensityMatrix::pure: length must be 2 or 4");
  double n2 = 0.0;
  for (cx a : amplitudes) n2 += std::norm(a);
  if (n2 < 1e-30) throw NumericalError("DensityMatrix::pure: zero vector");
  std::vector<cx> v = amplitudes;
  const double inv = 1.0 / std::sqrt(n2);
  for (cx& a : v) a *= inv;
  return DensityMatrix(outer(v, v));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  ComplexMatrix m = ComplexMatrix::identity(dim);
  m *= cx(1.0 / dim, 0.0);
  return DensityMatrix(m);
}

DensityMatrix partial_trace(const DensityMatrix& rho, Keep keep) {
  if (rho.dim() != 4) throw NumericalError("partial_trace: need a two-qubit state");
  const ComplexMatrix& m = rho.mat();
  ComplexMatrix out(2);
  if (keep == Keep::A) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int b = 0; b < 2; ++b) out(i, j) += m(2 * i + b, 2 * j + b);
  } else {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int i = 0; i < 2; ++i) out(a, b) += m(2 * i + a, 2 * i + b);
  }
  return DensityMatrix::from_matrix(out);
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const HermEig eig = herm_eig(rho.mat());
  double s = 0.0;
  for (double lam : eig.values)
    if (lam > kEigZero) s -= lam * log2_clamped(lam);
  return s;
}

RelativeEntropyResult relative_entropy(const DensityMatrix& rho, const DensityMatrix& chi) {
  if (rho.dim() != chi.dim()) throw NumericalError("relative_entropy: dimension mismatch");
  const HermEig er = herm_eig(rho.mat());
  const HermEig ec = herm_eig(chi.mat());
  const int n = rho.dim();

  double s = 0.0;
  for (double lam : er.values)
    if (lam > kEigZero) s += lam * log2_clamped(lam);

  for (int j = 0; j < n; ++j) {
    // weight <v_j| rho |v_j> of rho on the j-th eigenvector of chi
    cx w{};
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        w += std::conj(ec.vectors(r, j)) * rho.mat()(r, c) * ec.vectors(c, j);
    const double weight = w.real();
    const double q = ec.values[j];
    if (q <= kEigZero) {
      if (weight > 1e-9) return {0.0, true};
      continue;
    }
    s -= weight * log2_clamped(q);
  }
  if (s < 0.0 && s > -1e-9) s = 0.0;  // roundoff guard; the true value is >= 0
  return {s, false};
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& tau) {
  if (rho.dim() != tau.dim()) throw NumericalError("trace_distance: dimension mismatch");
  const HermEig eig = herm_eig(rho.mat() - tau.mat());
  double s = 0.0;
  for (double lam : eig.values) s += std::abs(lam);
  return 0.5 * s;
}

DensityMatrix dephase(const DensityMatrix& rho, const OrthonormalBasis& basis) {
  if (rho.dim() != basis.dim()) throw NumericalError("dephase: dimension mismatch");
  ComplexMatrix out(rho.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    const ComplexMatrix p = basis.projector(i);
    out += p * rho.mat() * p;
  }
  return DensityMatrix::from_matrix(out);
}

DensityMatrix dephase_side_b(const DensityMatrix& rho_ab, const OrthonormalBasis& bob_basis) {
  if (rho_ab.dim() != 4 || bob_basis.dim() != 2)
    throw NumericalError("dephase_side_b: need a two-qubit state and a qubit basis");
  ComplexMatrix out(4);
  for (int i = 0; i < 2; ++i) {
    const ComplexMatrix p = kron(identity2(), bob_basis.projector(i));
    out += p * rho_ab.mat() * p;
  }
  return DensityMatrix::from_matrix(out);
}

}  // namespace qnm
