#include "qfdiv/channels.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "qfdiv/errors.hpp"

namespace qfdiv {

namespace {

constexpr double kIsometryTol = 1e-9;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::string dims_str(Eigen::Index r, Eigen::Index c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

ComplexMatrix inv_sqrt_on_support(const ComplexMatrix& x) { return psd_power(x, -0.5); }

void require_bipartite(const HermitianOperator& x_ab, const SystemLayout& layout) {
  if (layout.size() != 2) {
    throw ArgumentError("Petz recovery needs a bipartite layout (A, B)");
  }
  if (layout.total_dim() != x_ab.dim()) {
    throw ArgumentError("Petz recovery: layout does not match X_AB");
  }
}

HermitianOperator default_xi(const SystemLayout& layout,
                             const std::optional<HermitianOperator>& xi) {
  const std::size_t d = layout.total_dim();
  if (!xi) return HermitianOperator(identity(d) / static_cast<double>(d), layout);
  if (xi->dim() != d) throw ArgumentError("xi_AB has the wrong dimension");
  const Spectrum s = eig_hermitian(*xi);
  if (!(s.eigenvalues(0) > 0.0)) {
    throw ArgumentError("xi_AB must be positive definite");
  }
  if (std::abs(xi->trace() - 1.0) > 1e-9) {
    throw ArgumentError("xi_AB must have unit trace");
  }
  return *xi;
}

// X_AB^{1/2} (X_A^{-1/2} (x) |j>_B) for each j.
std::vector<ComplexMatrix> petz_kraus(const HermitianOperator& x_ab,
                                      const SystemLayout& layout) {
  const std::size_t da = layout.factors()[0].dim;
  const std::size_t db = layout.factors()[1].dim;
  const ComplexMatrix x_a = partial_trace(x_ab.matrix(), layout.dims(), {true, false});
  const ComplexMatrix root_ab = psd_sqrt(x_ab.matrix());
  const ComplexMatrix inv_root_a = inv_sqrt_on_support(x_a);
  std::vector<ComplexMatrix> kraus;
  for (std::size_t j = 0; j < db; ++j) {
    ComplexMatrix lift = ComplexMatrix::Zero(idx(da * db), idx(da));
    for (std::size_t r = 0; r < da; ++r) lift.row(idx(r * db + j)) = inv_root_a.row(idx(r));
    kraus.push_back(root_ab * lift);
  }
  return kraus;
}

// sqrt(p_l) |phi_l><k| Pi^perp for each (k, l), l slowest.
std::vector<ComplexMatrix> kernel_kraus(const ComplexMatrix& x_a, const HermitianOperator& xi) {
  const ComplexMatrix ker = kernel_projector(x_a);
  const Spectrum s = eig_hermitian(xi);
  const auto da = x_a.rows();
  std::vector<ComplexMatrix> out;
  for (Eigen::Index l = 0; l < s.eigenvalues.size(); ++l) {
    const ComplexVector phi = std::sqrt(s.eigenvalues(l)) * s.eigenvectors.col(l);
    for (Eigen::Index k = 0; k < da; ++k) {
      out.push_back(phi * ker.row(k));
    }
  }
  return out;
}

}  // namespace

QuantumChannel::QuantumChannel(std::vector<ComplexMatrix> kraus, std::size_t din,
                               std::size_t dout)
    : kraus_(std::move(kraus)), din_(din), dout_(dout) {
  if (kraus_.empty()) throw ArgumentError("channel needs at least one Kraus operator");
  ComplexMatrix sum = ComplexMatrix::Zero(idx(din), idx(din));
  for (const auto& k : kraus_) {
    if (k.rows() != idx(dout) || k.cols() != idx(din)) {
      throw ArgumentError("Kraus operator is " + dims_str(k.rows(), k.cols()) +
                          ", expected " + dims_str(idx(dout), idx(din)));
    }
    sum += k.adjoint() * k;
  }
  const double err = max_abs(sum - identity(din));
  if (err > 1e-9) {
    std::ostringstream os;
    os << "Kraus operators are not trace preserving (|sum K^dagger K - I|_max = " << err << ")";
    throw ArgumentError(os.str());
  }
}

Isometry::Isometry(ComplexMatrix v, SystemLayout domain, SystemLayout codomain)
    : v_(std::move(v)), domain_(std::move(domain)), codomain_(std::move(codomain)) {
  if (v_.rows() < v_.cols()) throw ArgumentError("isometry needs rows >= cols");
  if (domain_.total_dim() != static_cast<std::size_t>(v_.cols()) ||
      codomain_.total_dim() != static_cast<std::size_t>(v_.rows())) {
    throw ArgumentError("isometry layouts do not match the matrix shape");
  }
  const double err = max_abs(v_.adjoint() * v_ - identity(static_cast<std::size_t>(v_.cols())));
  if (err > kIsometryTol) {
    std::ostringstream os;
    os << "matrix is not an isometry (|V^dagger V - I|_max = " << err << ")";
    throw ArgumentError(os.str());
  }
}

Isometry::Isometry(ComplexMatrix v)
    : Isometry(v, SystemLayout::single(static_cast<std::size_t>(v.cols())),
               SystemLayout::single(static_cast<std::size_t>(v.rows()))) {}

HermitianOperator apply(const QuantumChannel& ch, const HermitianOperator& x) {
  if (x.dim() != ch.din()) throw ArgumentError("channel input dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(idx(ch.dout()), idx(ch.dout()));
  for (const auto& k : ch.kraus()) out += k * x.matrix() * k.adjoint();
  return HermitianOperator(hermitian_part(out), SystemLayout::single(ch.dout()));
}

HermitianOperator apply(const Isometry& v, const HermitianOperator& x) {
  if (x.dim() != static_cast<std::size_t>(v.matrix().cols())) {
    throw ArgumentError("isometry input dimension mismatch");
  }
  return HermitianOperator(hermitian_part(v.matrix() * x.matrix() * v.matrix().adjoint()),
                           v.codomain());
}

ComplexVector apply(const Isometry& v, const ComplexVector& psi) {
  if (psi.size() != v.matrix().cols()) throw ArgumentError("isometry input dimension mismatch");
  return v.matrix() * psi;
}

Isometry stinespring_isometry(const QuantumChannel& ch) {
  const std::size_t n = ch.kraus().size();
  ComplexMatrix v = ComplexMatrix::Zero(idx(ch.dout() * n), idx(ch.din()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < ch.dout(); ++b) {
      v.row(idx(b * n + i)) = ch.kraus()[i].row(idx(b));
    }
  }
  return Isometry(v, SystemLayout::single(ch.din(), "A"),
                  SystemLayout({{"B", ch.dout()}, {"E", n}}));
}

QuantumChannel identity_channel(std::size_t d) { return QuantumChannel({identity(d)}, d, d); }

QuantumChannel unitary_channel(const ComplexMatrix& u) {
  return QuantumChannel({u}, static_cast<std::size_t>(u.cols()), static_cast<std::size_t>(u.rows()));
}

QuantumChannel isometry_channel(const Isometry& v) { return unitary_channel(v.matrix()); }

QuantumChannel completely_depolarizing(std::size_t d) {
  std::vector<ComplexMatrix> kraus;
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ComplexMatrix k = ComplexMatrix::Zero(idx(d), idx(d));
      k(idx(i), idx(j)) = w;
      kraus.push_back(k);
    }
  }
  return QuantumChannel(std::move(kraus), d, d);
}

QuantumChannel replacer_channel(std::size_t din, const HermitianOperator& sigma) {
  const Spectrum s = psd_spectrum(sigma.matrix());
  std::vector<ComplexMatrix> kraus;
  for (Eigen::Index l = 0; l < s.eigenvalues.size(); ++l) {
    if (s.eigenvalues(l) <= 0.0) continue;
    const ComplexVector phi = std::sqrt(s.eigenvalues(l)) * s.eigenvectors.col(l);
    for (std::size_t k = 0; k < din; ++k) {
      ComplexMatrix op = ComplexMatrix::Zero(phi.size(), idx(din));
      op.col(idx(k)) = phi;
      kraus.push_back(op);
    }
  }
  return QuantumChannel(std::move(kraus), din, sigma.dim());
}

QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b) {
  std::vector<ComplexMatrix> kraus;
  for (const auto& ka : a.kraus()) {
    for (const auto& kb : b.kraus()) kraus.push_back(kron(ka, kb));
  }
  return QuantumChannel(std::move(kraus), a.din() * b.din(), a.dout() * b.dout());
}

QuantumChannel compose(const QuantumChannel& b, const QuantumChannel& a) {
  if (a.dout() != b.din()) throw ArgumentError("compose: dimension mismatch");
  std::vector<ComplexMatrix> kraus;
  for (const auto& kb : b.kraus()) {
    for (const auto& ka : a.kraus()) kraus.push_back(kb * ka);
  }
  return QuantumChannel(std::move(kraus), a.din(), b.dout());
}

QuantumChannel petz_recovery(const HermitianOperator& x_ab, const SystemLayout& layout) {
  require_bipartite(x_ab, layout);
  const ComplexMatrix x_a = partial_trace(x_ab.matrix(), layout.dims(), {true, false});
  const Spectrum s = psd_spectrum(x_a);
  if (s.eigenvalues(0) <= default_rank_tol(s.eigenvalues)) {
    std::ostringstream os;
    os << "X_A is singular (smallest eigenvalue " << s.eigenvalues(0)
       << "); use extended_petz_recovery";
    throw DomainError(os.str());
  }
  const std::size_t da = layout.factors()[0].dim;
  return QuantumChannel(petz_kraus(x_ab, layout), da, layout.total_dim());
}

QuantumChannel extended_petz_recovery(const HermitianOperator& x_ab, const SystemLayout& layout,
                                      const std::optional<HermitianOperator>& xi) {
  require_bipartite(x_ab, layout);
  const HermitianOperator xi_ab = default_xi(layout, xi);
  const ComplexMatrix x_a = partial_trace(x_ab.matrix(), layout.dims(), {true, false});
  auto kraus = petz_kraus(x_ab, layout);
  if (max_abs(kernel_projector(x_a)) > 0.0) {
    for (auto& k : kernel_kraus(x_a, xi_ab)) kraus.push_back(std::move(k));
  }
  const std::size_t da = layout.factors()[0].dim;
  return QuantumChannel(std::move(kraus), da, layout.total_dim());
}

Isometry extended_petz_isometry(const HermitianOperator& x_ab, const SystemLayout& layout,
                                const std::optional<HermitianOperator>& xi) {
  require_bipartite(x_ab, layout);
  const HermitianOperator xi_ab = default_xi(layout, xi);
  const std::size_t da = layout.factors()[0].dim;
  const std::size_t db = layout.factors()[1].dim;
  const std::size_t dab = da * db;
  const std::size_t dc = db + da;
  const std::size_t de = 1 + dab;
  const ComplexMatrix x_a = partial_trace(x_ab.matrix(), layout.dims(), {true, false});

  ComplexMatrix v = ComplexMatrix::Zero(idx(dab * dc * de), idx(da));
  auto place = [&](const ComplexMatrix& k, std::size_t c, std::size_t e) {
    for (std::size_t r = 0; r < dab; ++r) v.row(idx((r * dc + c) * de + e)) += k.row(idx(r));
  };
  const auto petz = petz_kraus(x_ab, layout);
  for (std::size_t j = 0; j < db; ++j) place(petz[j], j, 0);
  const auto extra = kernel_kraus(x_a, xi_ab);
  for (std::size_t l = 0; l < dab; ++l) {
    for (std::size_t k = 0; k < da; ++k) place(extra[l * da + k], db + k, 1 + l);
  }
  const auto& f = layout.factors();
  return Isometry(v, SystemLayout({f[0]}),
                  SystemLayout({f[0], f[1], {"C", dc}, {"E", de}}));
}

QuantumChannel pinching(std::size_t d) { return pinching(identity(d)); }

QuantumChannel pinching(const ComplexMatrix& basis) {
  std::vector<ComplexMatrix> kraus;
  for (Eigen::Index z = 0; z < basis.cols(); ++z) {
    kraus.push_back(basis.col(z) * basis.col(z).adjoint());
  }
  const auto d = static_cast<std::size_t>(basis.rows());
  return QuantumChannel(std::move(kraus), d, d);
}

Isometry embedding_isometry(std::size_t d_small, std::size_t d_large) {
  if (d_small > d_large) {
    throw ArgumentError("embedding_isometry: d_small exceeds d_large");
  }
  ComplexMatrix v = ComplexMatrix::Zero(idx(d_large), idx(d_small));
  for (std::size_t i = 0; i < d_small; ++i) v(idx(i), idx(i)) = 1.0;
  return Isometry(v);
}

ComplexMatrix random_gaussian(std::size_t rows, std::size_t cols, RngSeed seed) {
  std::mt19937_64 gen(seed.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(idx(rows), idx(cols));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double re = normal(gen);
      const double im = normal(gen);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

HermitianOperator random_psd(std::size_t d, RngSeed seed) {
  const ComplexMatrix g = random_gaussian(d, d, seed);
  return HermitianOperator(hermitian_part(g * g.adjoint()) / static_cast<double>(d));
}

HermitianOperator random_density(std::size_t d, RngSeed seed) {
  const ComplexMatrix g = random_gaussian(d, d, seed);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho += 1e-6 * identity(d);
  rho /= rho.trace().real();
  return HermitianOperator(hermitian_part(rho));
}

PureStateVector random_pure(std::size_t d, RngSeed seed) {
  ComplexVector v = random_gaussian(d, 1, seed).col(0);
  v.normalize();
  return {v, SystemLayout::single(d), true};
}

namespace {

// Orthonormal columns with the Haar phase fix Q diag(R_ii / |R_ii|).
ComplexMatrix haar_columns(std::size_t rows, std::size_t cols, RngSeed seed) {
  const ComplexMatrix g = random_gaussian(rows, cols, seed);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(idx(rows), idx(cols));
  const ComplexMatrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < idx(cols); ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace

ComplexMatrix random_unitary(std::size_t d, RngSeed seed) { return haar_columns(d, d, seed); }

Isometry random_isometry(std::size_t dcol, std::size_t drow, RngSeed seed) {
  if (drow < dcol) throw ArgumentError("random_isometry: drow < dcol");
  return Isometry(haar_columns(drow, dcol, seed));
}

QuantumChannel random_channel(std::size_t din, std::size_t dout, std::size_t denv, RngSeed seed) {
  if (din < 1 || dout < 1) throw ArgumentError("random_channel: dimensions must be >= 1");
  if (denv == 0) denv = din * dout;
  if (dout * denv < din) throw ArgumentError("random_channel: environment too small");
  const ComplexMatrix v = haar_columns(dout * denv, din, seed);
  std::vector<ComplexMatrix> kraus(denv, ComplexMatrix::Zero(idx(dout), idx(din)));
  for (std::size_t b = 0; b < dout; ++b) {
    for (std::size_t e = 0; e < denv; ++e) kraus[e].row(idx(b)) = v.row(idx(b * denv + e));
  }
  return QuantumChannel(std::move(kraus), din, dout);
}

QuantumChannel random_unital_channel(std::size_t d, std::size_t terms, RngSeed seed) {
  if (terms < 1) throw ArgumentError("random_unital_channel: terms must be >= 1");
  std::mt19937_64 gen(seed.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::vector<double> w(terms);
  double total = 0.0;
  for (auto& x : w) total += (x = unif(gen));
  std::vector<ComplexMatrix> kraus;
  for (std::size_t t = 0; t < terms; ++t) {
    kraus.push_back(std::sqrt(w[t] / total) * random_unitary(d, RngSeed{gen()}));
  }
  return QuantumChannel(std::move(kraus), d, d);
}

}  // namespace qfdiv
