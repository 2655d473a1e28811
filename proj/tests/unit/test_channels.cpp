#include <cmath>

#include "doctest.h"
#include "qfdiv/errors.hpp"
#include "util.hpp"

using namespace qfdiv;
using qt::diag;
using qt::dist;

namespace {

HermitianOperator rank_deficient_ab(std::size_t da, std::size_t db, std::uint64_t seed) {
  // X_AB supported on span{|0>,...,|da-2>}_A (x) B, so X_A has a kernel.
  const std::size_t dk = (da - 1) * db;
  const ComplexMatrix g = random_gaussian(dk, dk, {seed});
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(da * db), static_cast<Eigen::Index>(da * db));
  m.topLeftCorner(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk)) = g * g.adjoint();
  m /= m.trace().real();
  // Rotate A so the kernel is not a basis vector.
  const ComplexMatrix u = kron(random_unitary(da, {seed + 7}), identity(db));
  return HermitianOperator(u * m * u.adjoint(), SystemLayout::bipartite(da, db));
}

}  // namespace

TEST_CASE("channel application basics") {
  const HermitianOperator x = random_density(3, {4});
  CHECK(dist(apply(identity_channel(3), x).matrix(), x.matrix()) < 1e-15);
  CHECK(dist(apply(completely_depolarizing(3), x).matrix(), identity(3) / 3.0) < 1e-14);

  for (std::uint64_t s = 0; s < 10; ++s) {
    const QuantumChannel ch = random_channel(3, 2, 0, {s});
    const HermitianOperator z = random_psd(3, {s + 50});
    const HermitianOperator out = apply(ch, z);
    CHECK(out.dim() == 2);
    CHECK(out.trace() == doctest::Approx(z.trace()).epsilon(1e-10));
    CHECK(psd_spectrum(out.matrix()).eigenvalues.minCoeff() >= 0.0);
    ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
    for (const auto& k : ch.kraus()) sum += k.adjoint() * k;
    CHECK(dist(sum, identity(3)) < 1e-9);
  }
  CHECK_THROWS_AS(apply(identity_channel(2), x), ArgumentError);
}

TEST_CASE("channel construction validates trace preservation") {
  std::vector<ComplexMatrix> k{0.5 * identity(2)};
  CHECK_THROWS_AS(QuantumChannel(k, 2, 2), ArgumentError);
  CHECK_THROWS_AS(QuantumChannel({identity(2)}, 3, 2), ArgumentError);
}

TEST_CASE("Stinespring dilation") {
  const Isometry vi = stinespring_isometry(identity_channel(2));
  CHECK(dist(vi.matrix(), kron(identity(2), ComplexMatrix(qt::ket({1})))) < 1e-15);

  const ComplexMatrix u = random_unitary(3, {9});
  const Isometry vu = stinespring_isometry(unitary_channel(u));
  CHECK(dist(vu.matrix(), u) < 1e-14);

  for (std::uint64_t s = 0; s < 5; ++s) {
    const QuantumChannel ch = random_channel(2, 3, 0, {s});
    const Isometry v = stinespring_isometry(ch);
    CHECK(dist(v.matrix().adjoint() * v.matrix(), identity(2)) < 1e-10);
    const HermitianOperator x = random_psd(2, {s + 10});
    const HermitianOperator vx = apply(v, x);
    const HermitianOperator red = partial_trace(vx, v.codomain(), {v.codomain().labels()[0]});
    CHECK(dist(red.matrix(), apply(ch, x).matrix()) < 1e-10);
  }
}

TEST_CASE("composition and tensor products") {
  const QuantumChannel a = random_channel(2, 3, 0, {1});
  const QuantumChannel b = random_channel(3, 2, 0, {2});
  const HermitianOperator x = random_density(2, {3});
  CHECK(dist(apply(compose(b, a), x).matrix(), apply(b, apply(a, x)).matrix()) < 1e-12);

  const HermitianOperator y = random_density(3, {4});
  const QuantumChannel ab = tensor(a, b);
  CHECK(dist(apply(ab, HermitianOperator(kron(x.matrix(), y.matrix()))).matrix(), kron(apply(a, x).matrix(), apply(b, y).matrix())) < 1e-12);

  const HermitianOperator sigma = random_density(2, {5});
  CHECK(dist(apply(replacer_channel(3, sigma), y).matrix(), sigma.matrix()) < 1e-14);
}

TEST_CASE("Petz recovery of a product state") {
  const HermitianOperator xa = random_density(2, {1});
  const HermitianOperator sb = random_density(3, {2});
  const HermitianOperator xab(kron(xa.matrix(), sb.matrix()), SystemLayout::bipartite(2, 3));
  const QuantumChannel r = petz_recovery(xab, xab.layout());
  CHECK(dist(apply(r, xa).matrix(), xab.matrix()) < 1e-12);
}

TEST_CASE("Petz recovery recovers X_AB from X_A and preserves trace") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t da = 2 + s % 2, db = 2 + (s / 2) % 2;
    const HermitianOperator xab = qt::with_bipartite(random_psd(da * db, {s}), da, db);
    const HermitianOperator xa = partial_trace(xab, xab.layout(), {"A"});
    const QuantumChannel r = petz_recovery(xab, xab.layout());
    CHECK(dist(apply(r, xa).matrix(), xab.matrix()) < 1e-9);
    const HermitianOperator z = random_psd(da, {s + 100});
    CHECK(apply(r, z).trace() == doctest::Approx(z.trace()).epsilon(1e-10));
  }
  CHECK_THROWS_AS(petz_recovery(rank_deficient_ab(2, 2, 1), SystemLayout::bipartite(2, 2)), DomainError);
}

TEST_CASE("extended Petz recovery") {
  SUBCASE("coincides with Petz recovery for invertible X_A") {
    const HermitianOperator xab = qt::with_bipartite(random_density(6, {3}), 2, 3);
    const QuantumChannel r = petz_recovery(xab, xab.layout());
    const QuantumChannel e = extended_petz_recovery(xab, xab.layout());
    for (std::uint64_t s = 0; s < 5; ++s) {
      const HermitianOperator z = random_psd(2, {s});
      CHECK(dist(apply(r, z).matrix(), apply(e, z).matrix()) < 1e-10);
    }
  }
  SUBCASE("kernel inputs map to xi") {
    const HermitianOperator xab = rank_deficient_ab(3, 2, 4);
    const HermitianOperator xi = random_density(6, {5});
    const QuantumChannel e = extended_petz_recovery(xab, xab.layout(), xi);
    const HermitianOperator xa = partial_trace(xab, xab.layout(), {"A"});
    const ComplexMatrix kern = kernel_projector(xa).matrix();
    const HermitianOperator z(2.5 * kern);
    CHECK(dist(apply(e, z).matrix(), 2.5 * xi.matrix()) < 1e-10);
  }
  SUBCASE("invertible inputs give invertible outputs") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const HermitianOperator xab = rank_deficient_ab(2 + s % 2, 2, s);
      const std::size_t da = xab.layout().factors()[0].dim;
      const QuantumChannel e = extended_petz_recovery(xab, xab.layout());
      const HermitianOperator out = apply(e, random_density(da, {s + 20}));
      CHECK(eig_hermitian(out).eigenvalues.minCoeff() > 0.0);
      CHECK(out.trace() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("xi must be a positive definite density") {
    const HermitianOperator xab = rank_deficient_ab(2, 2, 1);
    CHECK_THROWS_AS(extended_petz_recovery(xab, xab.layout(), diag({1, 0, 0, 0})), ArgumentError);
    CHECK_THROWS_AS(extended_petz_recovery(xab, xab.layout(), diag({1, 1, 1, 1})), ArgumentError);
  }
}

TEST_CASE("extended Petz isometry") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t da = 2 + s % 2, db = 2 + (s / 2) % 2;
    const HermitianOperator xab = rank_deficient_ab(da, db, s);
    const Isometry v = extended_petz_isometry(xab, xab.layout());
    const ComplexMatrix& vm = v.matrix();
    CHECK(max_abs(vm.adjoint() * vm - identity(da)) <= 1e-9);

    // (V (x) I_Ahat)|phi^{X_A}> against |phi^{X_AB}>_{AB, Ahat Bhat} |e>, with
    // Bhat sitting in the first db levels of C.
    const HermitianOperator xa = partial_trace(xab, xab.layout(), {"A"});
    const ComplexVector pa = canonical_purification(xa).amplitudes;
    const ComplexVector out = kron(vm, identity(da)) * pa;
    const ComplexVector pab = canonical_purification(xab).amplitudes;
    const std::size_t dc = db + da, de = 1 + da * db;
    ComplexVector expect = ComplexVector::Zero(out.size());
    for (std::size_t a = 0; a < da; ++a)
      for (std::size_t b = 0; b < db; ++b)
        for (std::size_t ah = 0; ah < da; ++ah)
          for (std::size_t bh = 0; bh < db; ++bh) {
            const std::size_t row = ((((a * db + b) * dc + bh) * de + 0) * da) + ah;
            const std::size_t src = (a * db + b) * (da * db) + ah * db + bh;
            expect(static_cast<Eigen::Index>(row)) = pab(static_cast<Eigen::Index>(src));
          }
    CHECK(dist(out, expect) <= 1e-9);

    // Tracing out C and E gives the extended recovery channel.
    const HermitianOperator z = random_density(da, {s + 40});
    const HermitianOperator vz = apply(v, z);
    const HermitianOperator red = partial_trace(vz, v.codomain(), {"A", "B"});
    const QuantumChannel e = extended_petz_recovery(xab, xab.layout());
    CHECK(dist(red.matrix(), apply(e, z).matrix()) < 1e-10);
  }
}

TEST_CASE("pinching") {
  const ComplexVector plus = qt::ket({1, 1}) / std::sqrt(2.0);
  CHECK(dist(apply(pinching(2), qt::ket_bra(plus)).matrix(), identity(2) / 2.0) < 1e-15);
  const HermitianOperator d = diag({0.2, 0.3, 0.5});
  CHECK(dist(apply(pinching(3), d).matrix(), d.matrix()) < 1e-15);
  const HermitianOperator x = random_density(3, {1});
  const ComplexMatrix u = random_unitary(3, {2});
  const QuantumChannel p = pinching(u);
  const HermitianOperator once = apply(p, x);
  CHECK(dist(apply(p, once).matrix(), once.matrix()) < 1e-13);
}

TEST_CASE("embedding isometry") {
  CHECK(dist(embedding_isometry(3, 3).matrix(), identity(3)) < 1e-15);
  const Isometry v = embedding_isometry(2, 4);
  CHECK(dist(v.matrix().adjoint() * v.matrix(), identity(2)) < 1e-15);
  const HermitianOperator x = random_density(2, {1});
  const ComplexMatrix vx = apply(v, x).matrix();
  CHECK(dist(vx.topLeftCorner(2, 2), x.matrix()) < 1e-15);
  CHECK(max_abs(vx.bottomRows(2)) == 0.0);
  CHECK(max_abs(vx.rightCols(2)) == 0.0);
  CHECK_THROWS_AS(embedding_isometry(3, 2), ArgumentError);
}

TEST_CASE("seeded generators") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const HermitianOperator r = random_density(4, {s});
    CHECK(r.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig_hermitian(r).eigenvalues.minCoeff() > 0.0);
    CHECK(dist(r.matrix(), random_density(4, {s}).matrix()) == 0.0);
    const PureStateVector p = random_pure(3, {s});
    CHECK(p.normalized);
    CHECK(p.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-10));
    const ComplexMatrix u = random_unitary(3, {s});
    CHECK(dist(u.adjoint() * u, identity(3)) < 1e-12);
    const Isometry v = random_isometry(2, 5, {s});
    CHECK(dist(v.matrix().adjoint() * v.matrix(), identity(2)) < 1e-12);
    const QuantumChannel un = random_unital_channel(3, 3, {s});
    CHECK(dist(apply(un, HermitianOperator(identity(3))).matrix(), identity(3)) < 1e-12);
  }
  CHECK(dist(random_density(3, {1}).matrix(), random_density(3, {2}).matrix()) > 1e-3);
}
