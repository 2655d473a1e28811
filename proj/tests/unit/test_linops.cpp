#include <cmath>

#include "doctest.h"
#include "qfdiv/errors.hpp"
#include "qfdiv/extended_real.hpp"
#include "util.hpp"

using namespace qfdiv;
using qt::diag;
using qt::dist;

namespace {

const Complex I1{0.0, 1.0};

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

// Index-sum oracle for tracing out the second factor.
ComplexMatrix trace_out_b(const ComplexMatrix& m, std::size_t da, std::size_t db) {
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(da));
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t k = 0; k < db; ++k)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            m(static_cast<Eigen::Index>(i * db + k), static_cast<Eigen::Index>(j * db + k));
  return out;
}

ComplexMatrix trace_out_a(const ComplexMatrix& m, std::size_t da, std::size_t db) {
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db));
  for (std::size_t k = 0; k < db; ++k)
    for (std::size_t l = 0; l < db; ++l)
      for (std::size_t i = 0; i < da; ++i)
        out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) +=
            m(static_cast<Eigen::Index>(i * db + k), static_cast<Eigen::Index>(i * db + l));
  return out;
}

}  // namespace

TEST_CASE("eigendecomposition of small examples") {
  const Spectrum id = eig_hermitian(identity(2));
  CHECK(id.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(id.eigenvalues(1) == doctest::Approx(1.0));

  const Spectrum d = eig_hermitian(diag({3, 1}));
  CHECK(d.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(d.eigenvalues(1) == doctest::Approx(3.0));

  const Spectrum x = eig_hermitian(pauli_x());
  CHECK(x.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(x.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(dist(reconstruct(x), pauli_x()) < 1e-12);
  CHECK(dist(x.eigenvectors.adjoint() * x.eigenvectors, identity(2)) < 1e-12);
}

TEST_CASE("reconstruction of random Hermitian matrices") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const ComplexMatrix g = random_gaussian(5, 5, {s});
    const ComplexMatrix h = g + g.adjoint();
    const Spectrum sp = eig_hermitian(h);
    CHECK(dist(reconstruct(sp), h) < 1e-12);
    for (Eigen::Index i = 1; i < sp.eigenvalues.size(); ++i) {
      CHECK(sp.eigenvalues(i - 1) <= sp.eigenvalues(i));
    }
  }
}

TEST_CASE("Hermitian operator rejects non-Hermitian input") {
  ComplexMatrix m(2, 2);
  m << 1, 1, 0, 1;
  CHECK_THROWS_AS(HermitianOperator{m}, DomainError);
}

TEST_CASE("matrix functions") {
  const HermitianOperator l = matrix_function(diag({1, std::exp(1.0)}), [](double v) { return std::log(v); });
  CHECK(dist(l.matrix(), diag({0, 1}).matrix()) < 1e-12);

  const HermitianOperator x = qt::pd_state(4, 3);
  const HermitianOperator inv = matrix_function(x, [](double v) { return 1.0 / v; });
  const ComplexMatrix solved = x.matrix().lu().solve(identity(4));
  CHECK(dist(inv.matrix(), solved) < 1e-10);

  CHECK_THROWS_AS(matrix_function(diag({1, 0}), [](double v) { return std::log(v); }), DomainError);
  CHECK_THROWS_AS(matrix_function(diag({1, -1}), [](double v) { return v; }), DomainError);
}

TEST_CASE("kron matches the index formula") {
  const ComplexMatrix a = random_gaussian(2, 3, {1});
  const ComplexMatrix b = random_gaussian(3, 2, {2});
  const ComplexMatrix k = kron(a, b);
  REQUIRE(k.rows() == 6);
  REQUIRE(k.cols() == 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 2; ++c) CHECK(std::abs(k(i * 3 + r, j * 2 + c) - a(i, j) * b(r, c)) < 1e-14);

  const HermitianOperator ha(identity(2), SystemLayout::single(2, "A"));
  const HermitianOperator hb(identity(3), SystemLayout::single(3, "B"));
  const HermitianOperator hab = kron(ha, hb);
  CHECK(hab.layout().dims() == std::vector<std::size_t>{2, 3});
  CHECK(hab.layout().labels() == std::vector<std::string>{"A", "B"});
}

TEST_CASE("partial trace agrees with the index sum") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const std::size_t da = 2 + s % 2, db = 3 - s % 2;
    const HermitianOperator x = qt::with_bipartite(random_density(da * db, {s}), da, db);
    const SystemLayout& lay = x.layout();
    const HermitianOperator xa = partial_trace(x, lay, {"A"});
    const HermitianOperator xb = partial_trace(x, lay, {"B"});
    CHECK(dist(xa.matrix(), trace_out_b(x.matrix(), da, db)) < 1e-13);
    CHECK(dist(xb.matrix(), trace_out_a(x.matrix(), da, db)) < 1e-13);
    CHECK(xa.layout().labels() == std::vector<std::string>{"A"});
    CHECK(xa.trace() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(partial_trace(qt::pd_state(4, 1).with_layout(SystemLayout::bipartite(2, 2)),
                                SystemLayout::bipartite(2, 2), {"Q"}),
                  ArgumentError);
}

TEST_CASE("partial trace of Gamma is the identity") {
  for (std::size_t d : {1u, 2u, 3u}) {
    const PureStateVector g = max_entangled_vector(d);
    const HermitianOperator gg(g.amplitudes * g.amplitudes.adjoint(), g.layout);
    const HermitianOperator red = partial_trace(gg, g.layout, {g.layout.labels()[0]});
    CHECK(dist(red.matrix(), identity(d)) < 1e-14);
    CHECK(g.amplitudes.squaredNorm() == doctest::Approx(static_cast<double>(d)));
  }
  const PureStateVector g1 = max_entangled_vector(1);
  CHECK(g1.amplitudes.size() == 1);
  CHECK(std::abs(g1.amplitudes(0) - Complex(1.0)) < 1e-15);
  const PureStateVector g2 = max_entangled_vector(2);
  CHECK(dist(g2.amplitudes, qt::ket({1, 0, 0, 1})) < 1e-15);
}

TEST_CASE("transpose in the computational basis") {
  ComplexMatrix m(2, 2);
  m << 1, I1, -I1, 2;
  const HermitianOperator t = transpose_in_basis(HermitianOperator(m));
  CHECK(std::abs(t.matrix()(0, 1) + I1) < 1e-15);
  CHECK(dist(t.matrix(), m.conjugate()) < 1e-15);
  CHECK(dist(transpose_in_basis(t).matrix(), m) < 1e-15);
}

TEST_CASE("transpose trick and Gamma trace identity") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t d = 2 + s % 3;
    const ComplexMatrix a = random_gaussian(d, d, {s});
    const ComplexMatrix b = random_gaussian(d, d, {s + 100});
    const ComplexVector g = max_entangled_vector(d).amplitudes;
    CHECK(dist(kron(a, identity(d)) * g, kron(identity(d), ComplexMatrix(a.transpose())) * g) < 1e-12);
    const Complex lhs = g.dot(kron(a, b) * g);
    const Complex rhs = (a.transpose() * b).trace();
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("canonical purification") {
  const HermitianOperator zero = diag({1, 0});
  const PureStateVector p0 = canonical_purification(zero);
  CHECK(dist(p0.amplitudes, qt::ket({1, 0, 0, 0})) < 1e-14);

  const HermitianOperator mixed = diag({0.5, 0.5});
  const PureStateVector pm = canonical_purification(mixed);
  CHECK(dist(pm.amplitudes, qt::ket({1, 0, 0, 1}) / std::sqrt(2.0)) < 1e-14);

  for (std::uint64_t s = 0; s < 5; ++s) {
    const std::size_t d = 2 + s % 3;
    const HermitianOperator x = random_psd(d, {s});
    const PureStateVector p = canonical_purification(x);
    const ComplexMatrix pp = p.amplitudes * p.amplitudes.adjoint();
    CHECK(dist(trace_out_b(pp, d, d), x.matrix()) < 1e-12);
    CHECK(p.amplitudes.squaredNorm() == doctest::Approx(x.trace()));
  }
}

TEST_CASE("support and kernel projectors") {
  ComplexVector u = qt::ket({1, 1, 0, 0}) / std::sqrt(2.0);
  ComplexVector v = qt::ket({0, 0, 1, I1}) / std::sqrt(2.0);
  const HermitianOperator x(2.0 * u * u.adjoint() + 0.5 * v * v.adjoint());
  const ComplexMatrix p = support_projector(x).matrix();
  const ComplexMatrix q = kernel_projector(x).matrix();
  CHECK(dist(p, u * u.adjoint() + v * v.adjoint()) < 1e-12);
  CHECK(dist(p + q, identity(4)) < 1e-12);
  CHECK(dist(p * p, p) < 1e-12);
  CHECK(p.trace().real() == doctest::Approx(2.0));
  CHECK(support_contained(diag({1, 0, 0}).matrix(), diag({1, 1, 0}).matrix()));
  CHECK_FALSE(support_contained(diag({1, 1, 0}).matrix(), diag({1, 0, 0}).matrix()));
}

TEST_CASE("psd powers act on the support") {
  const ComplexMatrix x = diag({4, 0, 0.25}).matrix();
  CHECK(dist(psd_power(x, 0.5), diag({2, 0, 0.5}).matrix()) < 1e-14);
  CHECK(dist(psd_power(x, -1.0), diag({0.25, 0, 4}).matrix()) < 1e-14);
  CHECK(dist(psd_power(x, 0.0), diag({1, 0, 1}).matrix()) < 1e-14);
  CHECK(dist(psd_log_on_support(x), diag({std::log(4.0), 0, std::log(0.25)}).matrix()) < 1e-14);
  CHECK_THROWS_AS(psd_spectrum(diag({1, -0.1}).matrix()), DomainError);
  const Spectrum clipped = psd_spectrum(diag({1, -1e-14}).matrix());
  CHECK(clipped.eigenvalues(0) == 0.0);
}

TEST_CASE("Schatten norms") {
  const HermitianOperator z = diag({1, 2, 3});
  CHECK(schatten_norm(z, 2.0) == doctest::Approx(std::sqrt(14.0)));
  CHECK(schatten_norm(z, 1.0) == doctest::Approx(6.0));
  CHECK(schatten_norm(z, 0.5) == doctest::Approx(std::pow(1.0 + std::sqrt(2.0) + std::sqrt(3.0), 2.0)));
  CHECK(schatten_norm(diag({0, 4}), 0.5) == doctest::Approx(4.0));
}

TEST_CASE("system layouts") {
  const SystemLayout l = SystemLayout::bipartite(2, 3);
  CHECK(l.total_dim() == 6);
  CHECK(l.index_of("B") == 1);
  CHECK_FALSE(l.contains("C"));
  CHECK_THROWS_AS(l.index_of("C"), ArgumentError);
  CHECK_THROWS_AS(SystemLayout({{"A", 2}, {"A", 2}}), ArgumentError);
  const SystemLayout c = l.concat(SystemLayout::single(4, "C"));
  CHECK(c.dims() == std::vector<std::size_t>{2, 3, 4});
}

TEST_CASE("permuting tensor factors") {
  const ComplexVector a = random_gaussian(2, 1, {1}).col(0);
  const ComplexVector b = random_gaussian(3, 1, {2}).col(0);
  const ComplexVector swapped = permute_systems(kron(a, b), {2, 3}, {1, 0});
  CHECK(dist(swapped, kron(b, a)) < 1e-14);
}

TEST_CASE("extended reals") {
  const auto inf = ExtendedReal::pos_infinity();
  const auto ninf = ExtendedReal::neg_infinity();
  const auto one = ExtendedReal::finite(1.0);
  CHECK(ninf < one);
  CHECK(one < inf);
  CHECK((one + inf) == inf);
  CHECK((-inf) == ninf);
  CHECK(one.scaled(0.0) == ExtendedReal::finite(0.0));
  CHECK(inf.scaled(-2.0) == ninf);
  CHECK_THROWS_AS(inf + ninf, DomainError);
  CHECK_THROWS_AS(inf.scaled(0.0), DomainError);
  CHECK_THROWS_AS(inf.value(), DomainError);
  CHECK_THROWS(ExtendedReal::finite(std::nan("")));
  CHECK(ExtendedReal::from_double(-HUGE_VAL) == ninf);
  CHECK(std::isinf(inf.to_double()));
}
