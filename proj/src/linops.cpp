#include "qfdiv/linops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "qfdiv/errors.hpp"

namespace qfdiv {

// ---------------------------------------------------------------------------
// SystemLayout

SystemLayout::SystemLayout(std::vector<SystemFactor> factors)
    : factors_(std::move(factors)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim < 1) {
      throw ArgumentError("system '" + f.label + "' has dimension 0");
    }
    if (!seen.insert(f.label).second) {
      throw ArgumentError("duplicate system label '" + f.label + "'");
    }
  }
}

SystemLayout SystemLayout::single(std::size_t dim, std::string label) {
  return SystemLayout({{std::move(label), dim}});
}

SystemLayout SystemLayout::bipartite(std::size_t dim_a, std::size_t dim_b,
                                     std::string label_a,
                                     std::string label_b) {
  return SystemLayout({{std::move(label_a), dim_a}, {std::move(label_b), dim_b}});
}

std::size_t SystemLayout::total_dim() const {
  std::size_t d = 1;
  for (const auto& f : factors_) d *= f.dim;
  return d;
}

std::vector<std::size_t> SystemLayout::dims() const {
  std::vector<std::size_t> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.dim);
  return out;
}

std::vector<std::string> SystemLayout::labels() const {
  std::vector<std::string> out;
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

std::size_t SystemLayout::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  throw ArgumentError("unknown system label '" + std::string(label) + "'");
}

bool SystemLayout::contains(std::string_view label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const SystemFactor& f) { return f.label == label; });
}

SystemLayout SystemLayout::concat(const SystemLayout& other) const {
  auto merged = factors_;
  merged.insert(merged.end(), other.factors_.begin(), other.factors_.end());
  return SystemLayout(std::move(merged));
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(const ComplexMatrix& m)
    : HermitianOperator(m, SystemLayout::single(static_cast<std::size_t>(m.rows()))) {}

HermitianOperator::HermitianOperator(const ComplexMatrix& m, SystemLayout layout)
    : layout_(std::move(layout)) {
  if (m.rows() != m.cols()) {
    throw ArgumentError("Hermitian operator must be square");
  }
  if (static_cast<std::size_t>(m.rows()) != layout_.total_dim()) {
    throw ArgumentError("layout dimensions do not multiply to the matrix size");
  }
  if (!m.allFinite()) {
    throw DomainError("operator has non-finite entries");
  }
  const double scale = 1.0 + max_abs(m);
  const double skew = max_abs(m - m.adjoint());
  if (skew > 1e-8 * scale) {
    std::ostringstream os;
    os << "operator is not Hermitian (|M - M^dagger|_max = " << skew << ")";
    throw DomainError(os.str());
  }
  matrix_ = hermitian_part(m);
}

HermitianOperator HermitianOperator::with_layout(SystemLayout layout) const {
  return HermitianOperator(matrix_, std::move(layout));
}

// ---------------------------------------------------------------------------
// Basic helpers

ComplexMatrix identity(std::size_t d) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(d),
                                 static_cast<Eigen::Index>(d));
}

double operator_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

Spectrum eig_hermitian(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Hermitian eigensolver did not converge (dim " << m.rows()
       << ", max |entry| " << max_abs(m) << ")";
    throw ConvergenceError(os.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Spectrum eig_hermitian(const HermitianOperator& h) {
  return eig_hermitian(h.matrix());
}

ComplexMatrix reconstruct(const Spectrum& s) {
  return s.eigenvectors * s.eigenvalues.cast<Complex>().asDiagonal() *
         s.eigenvectors.adjoint();
}

ComplexMatrix spectral_apply(const Spectrum& s,
                             const std::function<double(double)>& f) {
  RealVector mapped = s.eigenvalues.unaryExpr(f);
  return s.eigenvectors * mapped.cast<Complex>().asDiagonal() *
         s.eigenvectors.adjoint();
}

HermitianOperator matrix_function(const HermitianOperator& h,
                                  const std::function<double(double)>& f) {
  const Spectrum s = eig_hermitian(h);
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    if (!(s.eigenvalues(i) > 0.0)) {
      std::ostringstream os;
      os << "matrix_function requires a positive definite operator; eigenvalue "
         << i << " is " << s.eigenvalues(i);
      throw DomainError(os.str());
    }
  }
  return HermitianOperator(spectral_apply(s, f), h.layout());
}

// ---------------------------------------------------------------------------
// Tensor products and partial traces

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()),
                           a.layout().concat(b.layout()));
}

namespace {

// Row-major multi-index decomposition with factor 0 slowest.
std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) {
    strides[k - 1] = strides[k] * dims[k];
  }
  return strides;
}

std::size_t product(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m,
                            const std::vector<std::size_t>& dims,
                            const std::vector<bool>& keep) {
  if (dims.size() != keep.size()) {
    throw ArgumentError("partial_trace: keep mask does not match factor count");
  }
  const std::size_t total = product(dims);
  if (static_cast<std::size_t>(m.rows()) != total ||
      static_cast<std::size_t>(m.cols()) != total) {
    throw ArgumentError("partial_trace: matrix size does not match layout");
  }
  std::vector<std::size_t> kept_dims, traced_dims;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    (keep[k] ? kept_dims : traced_dims).push_back(dims[k]);
  }
  const std::size_t dk = product(kept_dims);
  const std::size_t dt = product(traced_dims);
  const auto strides = strides_of(dims);

  // Full index of (kept multi-index a, traced multi-index t).
  std::vector<std::size_t> kept_offset(dk, 0), traced_offset(dt, 0);
  const auto kept_strides = strides_of(kept_dims);
  const auto traced_strides = strides_of(traced_dims);
  for (std::size_t a = 0; a < dk; ++a) {
    std::size_t ki = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (!keep[k]) continue;
      const std::size_t digit = (a / kept_strides[ki]) % kept_dims[ki];
      kept_offset[a] += digit * strides[k];
      ++ki;
    }
  }
  for (std::size_t t = 0; t < dt; ++t) {
    std::size_t ti = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (keep[k]) continue;
      const std::size_t digit = (t / traced_strides[ti]) % traced_dims[ti];
      traced_offset[t] += digit * strides[k];
      ++ti;
    }
  }

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk),
                                          static_cast<Eigen::Index>(dk));
  for (std::size_t a = 0; a < dk; ++a) {
    for (std::size_t b = 0; b < dk; ++b) {
      Complex acc{0.0, 0.0};
      for (std::size_t t = 0; t < dt; ++t) {
        acc += m(static_cast<Eigen::Index>(kept_offset[a] + traced_offset[t]),
                 static_cast<Eigen::Index>(kept_offset[b] + traced_offset[t]));
      }
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
    }
  }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& m,
                                const SystemLayout& layout,
                                const std::vector<std::string>& keep) {
  std::vector<bool> mask(layout.size(), false);
  for (const auto& label : keep) mask[layout.index_of(label)] = true;
  std::vector<SystemFactor> kept;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (mask[k]) kept.push_back(layout.factors()[k]);
  }
  if (kept.empty()) kept.push_back({"1", 1});
  return HermitianOperator(partial_trace(m.matrix(), layout.dims(), mask),
                           SystemLayout(std::move(kept)));
}

ComplexVector permute_systems(const ComplexVector& v,
                              const std::vector<std::size_t>& dims,
                              const std::vector<std::size_t>& perm) {
  if (perm.size() != dims.size()) {
    throw ArgumentError("permute_systems: permutation size mismatch");
  }
  const std::size_t total = product(dims);
  if (static_cast<std::size_t>(v.size()) != total) {
    throw ArgumentError("permute_systems: vector size does not match layout");
  }
  std::vector<std::size_t> new_dims(dims.size());
  for (std::size_t k = 0; k < perm.size(); ++k) new_dims[k] = dims.at(perm[k]);
  const auto old_strides = strides_of(dims);
  const auto new_strides = strides_of(new_dims);
  ComplexVector out(v.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t old_idx = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) {
      const std::size_t digit = (idx / new_strides[k]) % new_dims[k];
      old_idx += digit * old_strides[perm[k]];
    }
    out(static_cast<Eigen::Index>(idx)) = v(static_cast<Eigen::Index>(old_idx));
  }
  return out;
}

HermitianOperator transpose_in_basis(const HermitianOperator& m) {
  return HermitianOperator(m.matrix().transpose(), m.layout());
}

PureStateVector max_entangled_vector(std::size_t d) {
  if (d < 1) throw ArgumentError("max_entangled_vector: d must be >= 1");
  const auto n = static_cast<Eigen::Index>(d);
  ComplexVector gamma = ComplexVector::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) gamma(i * n + i) = 1.0;
  return {gamma, SystemLayout({{"S", d}, {"S^", d}}), false};
}

PureStateVector canonical_purification(const HermitianOperator& x) {
  const std::size_t d = x.dim();
  const ComplexMatrix root = psd_sqrt(x.matrix());
  // (R (x) I) sum_i |i>|i> has amplitude R(a, i) at index a*d + i.
  const auto n = static_cast<Eigen::Index>(d);
  ComplexVector phi(n * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index i = 0; i < n; ++i) phi(a * n + i) = root(a, i);
  }
  std::vector<SystemFactor> factors;
  for (const auto& f : x.layout().factors()) factors.push_back(f);
  for (const auto& f : x.layout().factors()) factors.push_back({f.label + "^", f.dim});
  // The hat copy is a single index matching S; keep a flat layout when S is
  // composite so the vector index order stays (S, S^).
  SystemLayout layout = x.layout().size() == 1
                            ? SystemLayout(std::move(factors))
                            : SystemLayout({{"S", d}, {"S^", d}});
  return {phi, layout, false};
}

// ---------------------------------------------------------------------------
// psd functional calculus

Spectrum psd_spectrum(const ComplexMatrix& x) {
  Spectrum s = eig_hermitian(x);
  const double scale = std::max(1.0, s.eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    double& lam = s.eigenvalues(i);
    if (lam < 0.0) {
      if (lam < -kClipTolerance * scale) {
        std::ostringstream os;
        os << "operator is not positive semi-definite (eigenvalue " << lam << ")";
        throw DomainError(os.str());
      }
      lam = 0.0;
    }
  }
  return s;
}

double default_rank_tol(const RealVector& eigenvalues) {
  if (eigenvalues.size() == 0) return 0.0;
  const double top = eigenvalues.maxCoeff();
  return kRankTolerance * std::max(top, 0.0);
}

namespace {

ComplexMatrix projector_from(const Spectrum& s, double tol, bool support) {
  ComplexMatrix p = ComplexMatrix::Zero(s.eigenvectors.rows(), s.eigenvectors.rows());
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const bool in_support = s.eigenvalues(i) > tol;
    if (in_support == support) {
      p += s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
    }
  }
  return p;
}

}  // namespace

HermitianOperator support_projector(const HermitianOperator& x,
                                    std::optional<double> rank_tol) {
  const Spectrum s = psd_spectrum(x.matrix());
  const double tol = rank_tol.value_or(default_rank_tol(s.eigenvalues));
  return HermitianOperator(projector_from(s, tol, true), x.layout());
}

HermitianOperator kernel_projector(const HermitianOperator& x,
                                   std::optional<double> rank_tol) {
  const Spectrum s = psd_spectrum(x.matrix());
  const double tol = rank_tol.value_or(default_rank_tol(s.eigenvalues));
  return HermitianOperator(projector_from(s, tol, false), x.layout());
}

ComplexMatrix support_projector(const ComplexMatrix& x) {
  const Spectrum s = psd_spectrum(x);
  return projector_from(s, default_rank_tol(s.eigenvalues), true);
}

ComplexMatrix kernel_projector(const ComplexMatrix& x) {
  const Spectrum s = psd_spectrum(x);
  return projector_from(s, default_rank_tol(s.eigenvalues), false);
}

ComplexMatrix psd_power(const ComplexMatrix& x, double p) {
  const Spectrum s = psd_spectrum(x);
  // Eigenvalues at or below the rank tolerance count as kernel for every p:
  // fractional powers would otherwise inflate roundoff (1e-16 -> 1e-8 for p = 1/2).
  const double tol = default_rank_tol(s.eigenvalues);
  return spectral_apply(
      s, [p, tol](double lam) { return lam > tol ? std::pow(lam, p) : 0.0; });
}

ComplexMatrix psd_sqrt(const ComplexMatrix& x) { return psd_power(x, 0.5); }

ComplexMatrix psd_log_on_support(const ComplexMatrix& x) {
  const Spectrum s = psd_spectrum(x);
  const double tol = default_rank_tol(s.eigenvalues);
  return spectral_apply(
      s, [tol](double lam) { return lam > tol ? std::log(lam) : 0.0; });
}

bool support_contained(const ComplexMatrix& x, const ComplexMatrix& y) {
  const double tr = std::abs(x.trace().real());
  if (tr == 0.0) return true;
  const ComplexMatrix ker = kernel_projector(y);
  const double leak = (ker * x).trace().real();
  return leak <= 1e-10 * tr;
}

double schatten_norm(const ComplexMatrix& z, double alpha) {
  if (!(alpha > 0.0)) throw ArgumentError("schatten_norm: alpha must be > 0");
  const Spectrum s = psd_spectrum(z);
  const double tol = default_rank_tol(s.eigenvalues);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues(i) > tol) acc += std::pow(s.eigenvalues(i), alpha);
  }
  return std::pow(acc, 1.0 / alpha);
}

double schatten_norm(const HermitianOperator& z, double alpha) {
  return schatten_norm(z.matrix(), alpha);
}

}  // namespace qfdiv
