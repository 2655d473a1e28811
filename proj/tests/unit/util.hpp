#pragma once

#include <cmath>
#include <initializer_list>

#include "qfdiv/channels.hpp"
#include "qfdiv/linops.hpp"

namespace qt {

using namespace qfdiv;

inline HermitianOperator diag(std::initializer_list<double> v) {
  RealVector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return HermitianOperator(d.cast<Complex>().asDiagonal().toDenseMatrix());
}

inline HermitianOperator ket_bra(const ComplexVector& v) {
  return HermitianOperator(v * v.adjoint());
}

inline ComplexVector ket(std::initializer_list<Complex> v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

inline double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return max_abs(a - b); }

// Full-rank density mixed with a little identity so the smallest eigenvalue
// stays away from zero.
inline HermitianOperator pd_state(std::size_t d, std::uint64_t seed, double floor = 0.05) {
  const ComplexMatrix r = random_density(d, {seed}).matrix();
  return HermitianOperator((1.0 - floor) * r + floor / static_cast<double>(d) * identity(d));
}

inline HermitianOperator with_bipartite(const HermitianOperator& x, std::size_t da, std::size_t db) {
  return x.with_layout(SystemLayout::bipartite(da, db));
}

// Rank-r density: Gaussian G G^dagger with G of size d x r.
inline HermitianOperator rank_state(std::size_t d, std::size_t r, std::uint64_t seed) {
  const ComplexMatrix g = random_gaussian(d, r, {seed});
  const ComplexMatrix m = g * g.adjoint();
  return HermitianOperator(m / m.trace().real());
}

}  // namespace qt
