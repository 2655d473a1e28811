#pragma once

// Dense complex linear algebra for small quantum systems: Hermitian
// eigendecomposition, spectral functions, tensor products, partial traces,
// purifications and Schatten norms.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qfdiv {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigenvalues in [-kClipTolerance * scale, 0) of a psd input are roundoff and
/// are clipped to zero; anything more negative is a domain error.
inline constexpr double kClipTolerance = 1e-10;

/// Support/kernel splits treat eigenvalues <= kRankTolerance * lambda_max as 0.
inline constexpr double kRankTolerance = 1e-9;

struct SystemFactor {
  std::string label;
  std::size_t dim = 1;

  bool operator==(const SystemFactor&) const = default;
};

/// Ordered tensor factors with unique labels. Factor 0 is the slowest-varying
/// index of the computational basis.
class SystemLayout {
 public:
  SystemLayout() = default;
  explicit SystemLayout(std::vector<SystemFactor> factors);

  static SystemLayout single(std::size_t dim, std::string label = "S");
  static SystemLayout bipartite(std::size_t dim_a, std::size_t dim_b,
                                std::string label_a = "A",
                                std::string label_b = "B");

  const std::vector<SystemFactor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  std::size_t total_dim() const;
  std::vector<std::size_t> dims() const;
  std::vector<std::string> labels() const;

  /// Throws ArgumentError for an unknown label.
  std::size_t index_of(std::string_view label) const;
  bool contains(std::string_view label) const;

  SystemLayout concat(const SystemLayout& other) const;

  bool operator==(const SystemLayout&) const = default;

 private:
  std::vector<SystemFactor> factors_;
};

/// Complex Hermitian matrix tagged with a tensor layout. The stored matrix is
/// exactly Hermitian: construction symmetrizes (M + M^dagger)/2 after checking
/// that the input is Hermitian up to roundoff.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const ComplexMatrix& m);
  HermitianOperator(const ComplexMatrix& m, SystemLayout layout);

  const ComplexMatrix& matrix() const { return matrix_; }
  const SystemLayout& layout() const { return layout_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  double trace() const { return matrix_.trace().real(); }

  HermitianOperator with_layout(SystemLayout layout) const;

 private:
  ComplexMatrix matrix_;
  SystemLayout layout_;
};

struct Spectrum {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns, orthonormal
};

struct PureStateVector {
  ComplexVector amplitudes;
  SystemLayout layout;
  bool normalized = false;

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes.size()); }
};

ComplexMatrix identity(std::size_t d);
double operator_norm(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);

/// Hermitian part of m; used to clean roundoff from products like A B A^dagger.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

Spectrum eig_hermitian(const HermitianOperator& h);
/// Caller guarantees m is Hermitian; only the lower triangle is read.
Spectrum eig_hermitian(const ComplexMatrix& m);
ComplexMatrix reconstruct(const Spectrum& s);

/// V diag(f(lambda)) V^dagger for an arbitrary real function on the spectrum.
ComplexMatrix spectral_apply(const Spectrum& s,
                             const std::function<double(double)>& f);

/// f(H) for positive definite H. Throws DomainError naming the first
/// non-positive eigenvalue.
HermitianOperator matrix_function(const HermitianOperator& h,
                                  const std::function<double(double)>& f);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

/// Reduced operator on the factors in `keep` (kept in layout order).
HermitianOperator partial_trace(const HermitianOperator& m,
                                const SystemLayout& layout,
                                const std::vector<std::string>& keep);
/// Raw form: keep[k] selects factor k. Works for non-Hermitian inputs.
ComplexMatrix partial_trace(const ComplexMatrix& m,
                            const std::vector<std::size_t>& dims,
                            const std::vector<bool>& keep);

/// Reorders tensor factors of a vector: result factor k is input factor
/// perm[k].
ComplexVector permute_systems(const ComplexVector& v,
                              const std::vector<std::size_t>& dims,
                              const std::vector<std::size_t>& perm);

/// Entry-wise transpose in the computational basis.
HermitianOperator transpose_in_basis(const HermitianOperator& m);

/// Unnormalized sum_i |i>|i>.
PureStateVector max_entangled_vector(std::size_t d);

/// (X^{1/2} (x) I)|Gamma> on S (x) S-hat.
PureStateVector canonical_purification(const HermitianOperator& x);

/// Eigenvalues of a psd operator with roundoff negatives clipped to zero.
/// Throws DomainError for a genuinely negative eigenvalue.
Spectrum psd_spectrum(const ComplexMatrix& x);

double default_rank_tol(const RealVector& eigenvalues);

HermitianOperator support_projector(const HermitianOperator& x,
                                    std::optional<double> rank_tol = {});
HermitianOperator kernel_projector(const HermitianOperator& x,
                                   std::optional<double> rank_tol = {});
ComplexMatrix support_projector(const ComplexMatrix& x);
ComplexMatrix kernel_projector(const ComplexMatrix& x);

/// X^p for psd X, taken on the support: eigenvalues <= kRankTolerance * lambda_max
/// map to 0 for every p (pseudo-power for p <= 0, p = 0 gives the support
/// projector).
ComplexMatrix psd_power(const ComplexMatrix& x, double p);
ComplexMatrix psd_sqrt(const ComplexMatrix& x);
/// log on the support, 0 on the kernel.
ComplexMatrix psd_log_on_support(const ComplexMatrix& x);

/// Whether supp(X) is contained in supp(Y), up to a relative leakage of
/// 1e-10 in Tr{Pi_Y^perp X}.
bool support_contained(const ComplexMatrix& x, const ComplexMatrix& y);

/// [sum_i lambda_i^alpha]^{1/alpha} over the support eigenvalues of psd Z.
double schatten_norm(const HermitianOperator& z, double alpha);
double schatten_norm(const ComplexMatrix& z, double alpha);

}  // namespace qfdiv
