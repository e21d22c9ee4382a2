#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qnm/qmat.hpp"
#include "test_helpers.hpp"

using namespace qnm;
using namespace qnm_test;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

DensityMatrix ket0() { return DensityMatrix::pure({1.0, 0.0}); }
DensityMatrix ket1() { return DensityMatrix::pure({0.0, 1.0}); }
DensityMatrix ket_plus() { return DensityMatrix::pure({kInvSqrt2, kInvSqrt2}); }

}  // namespace

TEST_CASE("kron basics") {
  CHECK(max_abs_diff(kron(identity2(), identity2()), ComplexMatrix::identity(4)) == 0.0);

  const ComplexMatrix zz = kron(pauli_z(), pauli_z());
  const ComplexMatrix expected(4, {1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1});
  CHECK(max_abs_diff(zz, expected) == 0.0);

  // sigma_x on A maps |00> to |10>
  const ComplexMatrix xi = kron(pauli_x(), identity2());
  std::vector<cx> ket00 = {1, 0, 0, 0};
  std::vector<cx> mapped(4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) mapped[r] += xi(r, c) * ket00[c];
  CHECK(std::abs(mapped[2] - cx(1.0)) < 1e-15);
  CHECK(std::abs(mapped[0]) + std::abs(mapped[1]) + std::abs(mapped[3]) < 1e-15);
}

TEST_CASE("partial trace") {
  Rng rng(11);
  SUBCASE("product state factors") {
    const DensityMatrix a = random_density(rng, 2);
    const DensityMatrix b = random_density(rng, 2);
    const DensityMatrix ab = DensityMatrix::from_matrix(kron(a.mat(), b.mat()));
    CHECK(max_abs_diff(partial_trace(ab, Keep::B).mat(), b.mat()) < 1e-12);
    CHECK(max_abs_diff(partial_trace(ab, Keep::A).mat(), a.mat()) < 1e-12);
  }
  SUBCASE("Bell marginal is maximally mixed") {
    const DensityMatrix bell = bell_phi_plus();
    CHECK(max_abs_diff(partial_trace(bell, Keep::A).mat(), DensityMatrix::maximally_mixed(2).mat()) <
          1e-12);
  }
  SUBCASE("diagonal block sum") {
    const ComplexMatrix d(4, {0.5, 0, 0, 0, 0, 0.2, 0, 0, 0, 0, 0.2, 0, 0, 0, 0, 0.1});
    const DensityMatrix rho = DensityMatrix::from_matrix(d);
    const DensityMatrix a = partial_trace(rho, Keep::A);
    CHECK(a.mat()(0, 0).real() == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(a.mat()(1, 1).real() == doctest::Approx(0.3).epsilon(1e-12));
  }
}

TEST_CASE("herm_eig examples") {
  SUBCASE("diagonal sorted descending") {
    const ComplexMatrix d(4, {3, 0, 0, 0, 0, 1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0});
    const HermEig eig = herm_eig(d);
    CHECK(eig.values[0] == doctest::Approx(3.0));
    CHECK(eig.values[1] == doctest::Approx(2.0));
    CHECK(eig.values[2] == doctest::Approx(1.0));
    CHECK(eig.values[3] == doctest::Approx(0.0));
  }
  SUBCASE("pauli x spectrum") {
    const HermEig eig = herm_eig(pauli_x());
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eig.values[1] == doctest::Approx(-1.0).epsilon(1e-14));
    // first eigenvector is |+> up to phase
    CHECK(std::abs(std::abs(eig.vectors(0, 0)) - kInvSqrt2) < 1e-12);
    CHECK(std::abs(eig.vectors(0, 0) - eig.vectors(1, 0)) < 1e-12);
  }
  SUBCASE("rejects non-Hermitian input") {
    ComplexMatrix bad(2, {0, 1, 0, 0});
    CHECK_THROWS_AS(herm_eig(bad), NumericalError);
  }
}

TEST_CASE("herm_eig reconstruction property") {
  Rng rng(42);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int dim = (trial % 2 == 0) ? 4 : 2;
    const ComplexMatrix h = random_hermitian(rng, dim);
    const HermEig eig = herm_eig(h);
    ComplexMatrix rebuilt(dim);
    for (int k = 0; k < dim; ++k)
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
          rebuilt(r, c) += eig.values[k] * eig.vectors(r, k) * std::conj(eig.vectors(c, k));
    worst = std::max(worst, max_abs_diff(h, rebuilt));
    for (int k = 1; k < dim; ++k) CHECK(eig.values[k - 1] >= eig.values[k]);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann_entropy(ket0()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(4)) ==
        doctest::Approx(2.0).epsilon(1e-12));

  const ComplexMatrix d(2, {0.75, 0, 0, 0.25});
  CHECK(von_neumann_entropy(DensityMatrix::from_matrix(d)) ==
        doctest::Approx(h2(0.25)).epsilon(1e-12));
  CHECK(von_neumann_entropy(DensityMatrix::from_matrix(d)) == doctest::Approx(0.811278).epsilon(1e-6));

  SUBCASE("unitary invariance") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const DensityMatrix rho = random_density(rng, 4);
      const ComplexMatrix u = random_unitary(rng, 4);
      CHECK(std::abs(von_neumann_entropy(rho) - von_neumann_entropy(conjugated(rho, u))) < 1e-10);
    }
  }
}

TEST_CASE("relative entropy") {
  SUBCASE("identity case") {
    Rng rng(3);
    const DensityMatrix rho = random_density(rng, 4);
    const auto r = relative_entropy(rho, rho);
    CHECK(!r.infinite);
    CHECK(std::abs(r.bits) < 1e-10);
  }
  SUBCASE("pure vs maximally mixed") {
    const auto r = relative_entropy(ket0(), DensityMatrix::maximally_mixed(2));
    CHECK(!r.infinite);
    CHECK(r.bits == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("support violation is flagged infinite") {
    const auto r = relative_entropy(ket_plus(), ket0());
    CHECK(r.infinite);
  }
  SUBCASE("nonnegative on random pairs, zero iff equal") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const DensityMatrix rho = random_density(rng, 2);
      const DensityMatrix chi = random_density(rng, 2);
      const auto r = relative_entropy(rho, chi);
      CHECK(!r.infinite);
      CHECK(r.bits >= 0.0);
      if (trace_distance(rho, chi) > 1e-4) CHECK(r.bits > 0.0);
    }
  }
  SUBCASE("tensoring a pure marker preserves the value") {
    Rng rng(9);
    for (int trial = 0; trial < 25; ++trial) {
      const DensityMatrix rho = random_density(rng, 2);
      const DensityMatrix sigma = random_density(rng, 2);
      const ComplexMatrix p = ket0().mat();  // rank-1 projector
      const auto direct = relative_entropy(rho, sigma);
      const auto lifted = relative_entropy(DensityMatrix::from_matrix(kron(p, rho.mat())),
                                           DensityMatrix::from_matrix(kron(p, sigma.mat())));
      CHECK(!lifted.infinite);
      CHECK(std::abs(lifted.bits - direct.bits) < 1e-10);
    }
  }
}

TEST_CASE("trace distance") {
  CHECK(trace_distance(ket0(), ket0()) == doctest::Approx(0.0));
  CHECK(trace_distance(ket0(), ket1()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_distance(ket0(), ket_plus()) == doctest::Approx(kInvSqrt2).epsilon(1e-12));
}

TEST_CASE("dephasing operations") {
  const OrthonormalBasis z = OrthonormalBasis::computational(2);

  SUBCASE("diagonal states are fixed points") {
    const ComplexMatrix d(2, {0.3, 0, 0, 0.7});
    const DensityMatrix rho = DensityMatrix::from_matrix(d);
    CHECK(max_abs_diff(dephase(rho, z).mat(), rho.mat()) < 1e-12);
  }
  SUBCASE("plus state dephases to maximally mixed") {
    CHECK(max_abs_diff(dephase(ket_plus(), z).mat(), DensityMatrix::maximally_mixed(2).mat()) <
          1e-12);
  }
  SUBCASE("idempotent and trace preserving on random states") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
      const DensityMatrix rho = random_density(rng, 2);
      const DensityMatrix once = dephase(rho, z);
      const DensityMatrix twice = dephase(once, z);
      CHECK(max_abs_diff(once.mat(), twice.mat()) < 1e-12);
      CHECK(std::abs(once.mat().trace().real() - 1.0) < 1e-12);
      CHECK(once.mat().hermiticity_defect() < 1e-12);
    }
  }
}

TEST_CASE("dephase_side_b") {
  const OrthonormalBasis z = OrthonormalBasis::computational(2);

  SUBCASE("Bell state") {
    const DensityMatrix out = dephase_side_b(bell_phi_plus(), z);
    ComplexMatrix expected(4);
    expected(0, 0) = 0.5;
    expected(3, 3) = 0.5;
    CHECK(max_abs_diff(out.mat(), expected) < 1e-12);
  }
  SUBCASE("quantum-incoherent states are fixed points") {
    Rng rng(17);
    const DensityMatrix s1 = random_density(rng, 2);
    const DensityMatrix s2 = random_density(rng, 2);
    ComplexMatrix chi(4);
    ComplexMatrix p0(2), p1(2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    chi += 0.5 * kron(s1.mat(), p0);
    chi += 0.5 * kron(s2.mat(), p1);
    const DensityMatrix qi = DensityMatrix::from_matrix(chi);
    CHECK(max_abs_diff(dephase_side_b(qi, z).mat(), qi.mat()) < 1e-12);
  }
  SUBCASE("product with plus on B") {
    Rng rng(19);
    const DensityMatrix a = random_density(rng, 2);
    const DensityMatrix ab = DensityMatrix::from_matrix(kron(a.mat(), ket_plus().mat()));
    const DensityMatrix expected =
        DensityMatrix::from_matrix(kron(a.mat(), DensityMatrix::maximally_mixed(2).mat()));
    CHECK(max_abs_diff(dephase_side_b(ab, z).mat(), expected.mat()) < 1e-12);
  }
}

TEST_CASE("density matrix validation") {
  SUBCASE("rejects non-Hermitian") {
    ComplexMatrix m(2, {0.5, 0.1, 0.3, 0.5});
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), NumericalError);
  }
  SUBCASE("rejects wrong trace") {
    ComplexMatrix m(2, {0.7, 0, 0, 0.7});
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), NumericalError);
  }
  SUBCASE("clips slightly negative eigenvalues") {
    ComplexMatrix m(2, {1.0 + 5e-10, 0, 0, -5e-10});
    const DensityMatrix rho = DensityMatrix::from_matrix(m);
    const HermEig eig = herm_eig(rho.mat());
    CHECK(eig.values.back() >= 0.0);
    CHECK(std::abs(rho.mat().trace().real() - 1.0) < 1e-14);
  }
  SUBCASE("rejects clearly negative eigenvalues") {
    ComplexMatrix m(2, {1.1, 0, 0, -0.1});
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), NumericalError);
  }
}

TEST_CASE("bloch angles and bases") {
  SUBCASE("angle folding") {
    const BlochAngle a(-0.3, 1.0);
    CHECK(a.theta == doctest::Approx(0.3));
    CHECK(a.phi == doctest::Approx(1.0 + std::numbers::pi));
    const BlochAngle b(0.4, -1.0);
    CHECK(b.phi == doctest::Approx(2.0 * std::numbers::pi - 1.0));
  }
  SUBCASE("from_bloch gives sigma.n eigenvectors") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
      const BlochAngle a(rng.uniform() * std::numbers::pi, rng.uniform() * 2 * std::numbers::pi);
      const OrthonormalBasis basis = OrthonormalBasis::from_bloch(a);
      ComplexMatrix n(2);
      n += cx(std::sin(a.theta) * std::cos(a.phi), 0) * pauli_x();
      n += cx(std::sin(a.theta) * std::sin(a.phi), 0) * pauli_y();
      n += cx(std::cos(a.theta), 0) * pauli_z();
      // n P+ = P+, n P- = -P-
      CHECK(max_abs_diff(n * basis.projector(0), basis.projector(0)) < 1e-12);
      CHECK(max_abs_diff(n * basis.projector(1), cx(-1.0) * basis.projector(1)) < 1e-12);
    }
  }
  SUBCASE("rejects non-orthonormal vectors") {
    std::vector<std::vector<cx>> vecs = {{1.0, 0.0}, {0.6, 0.8}};
    CHECK_THROWS_AS(OrthonormalBasis(2, vecs), NumericalError);
  }
}
