#pragma once

// Kraus-form channels, isometries, Petz recovery maps and seeded generators.

#include <cstdint>
#include <optional>
#include <vector>

#include "qfdiv/linops.hpp"

namespace qfdiv {

class QuantumChannel {
 public:
  QuantumChannel() = default;
  // Throws ArgumentError unless every Kraus operator is dout x din and
  // sum K^dagger K = I to 1e-9.
  QuantumChannel(std::vector<ComplexMatrix> kraus, std::size_t din, std::size_t dout);

  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  std::size_t din() const { return din_; }
  std::size_t dout() const { return dout_; }

 private:
  std::vector<ComplexMatrix> kraus_;
  std::size_t din_ = 0;
  std::size_t dout_ = 0;
};

class Isometry {
 public:
  Isometry() = default;
  // Throws ArgumentError unless V^dagger V = I to 1e-9.
  Isometry(ComplexMatrix v, SystemLayout domain, SystemLayout codomain);
  explicit Isometry(ComplexMatrix v);

  const ComplexMatrix& matrix() const { return v_; }
  const SystemLayout& domain() const { return domain_; }
  const SystemLayout& codomain() const { return codomain_; }

 private:
  ComplexMatrix v_;
  SystemLayout domain_;
  SystemLayout codomain_;
};

struct RngSeed {
  std::uint64_t seed = 0;
};

HermitianOperator apply(const QuantumChannel& ch, const HermitianOperator& x);
HermitianOperator apply(const Isometry& v, const HermitianOperator& x);
ComplexVector apply(const Isometry& v, const ComplexVector& psi);

// V = sum_i K_i (x) |i>_E, codomain layout (B, E).
Isometry stinespring_isometry(const QuantumChannel& ch);

QuantumChannel identity_channel(std::size_t d);
QuantumChannel unitary_channel(const ComplexMatrix& u);
QuantumChannel isometry_channel(const Isometry& v);
// Kraus {|i><j| / sqrt(d)}.
QuantumChannel completely_depolarizing(std::size_t d);
// Z -> Tr{Z} sigma.
QuantumChannel replacer_channel(std::size_t din, const HermitianOperator& sigma);
// Kraus products K_i (x) L_j.
QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b);
// b after a.
QuantumChannel compose(const QuantumChannel& b, const QuantumChannel& a);

// Z_A -> X_AB^{1/2} ([X_A^{-1/2} Z_A X_A^{-1/2}] (x) I_B) X_AB^{1/2} for a
// bipartite X_AB whose factor 0 is A. Throws DomainError when X_A is
// singular; extended_petz_recovery handles that case.
QuantumChannel petz_recovery(const HermitianOperator& x_ab, const SystemLayout& layout);

// Adds Tr{Pi^perp Z_A} xi_AB with Pi^perp the kernel projector of X_A.
// xi defaults to the maximally mixed state; it must be a positive definite
// density operator (ArgumentError otherwise).
QuantumChannel extended_petz_recovery(const HermitianOperator& x_ab,
                                      const SystemLayout& layout,
                                      const std::optional<HermitianOperator>& xi = {});

// Isometric extension of extended_petz_recovery, A -> A B C E with
// dim C = dB + dA and dim E = 1 + dA dB. E index 0 is the flag state |e>.
Isometry extended_petz_isometry(const HermitianOperator& x_ab,
                                const SystemLayout& layout,
                                const std::optional<HermitianOperator>& xi = {});

// Dephasing in the computational basis of dimension d.
QuantumChannel pinching(std::size_t d);
// Dephasing in the orthonormal basis given by the columns of `basis`.
QuantumChannel pinching(const ComplexMatrix& basis);

// sum_i |i>_large <i|_small.
Isometry embedding_isometry(std::size_t d_small, std::size_t d_large);

// Seeded generators. Each call is a pure function of its arguments.
HermitianOperator random_density(std::size_t d, RngSeed seed);
HermitianOperator random_psd(std::size_t d, RngSeed seed);
PureStateVector random_pure(std::size_t d, RngSeed seed);
ComplexMatrix random_gaussian(std::size_t rows, std::size_t cols, RngSeed seed);
ComplexMatrix random_unitary(std::size_t d, RngSeed seed);
// Haar-distributed isometry with drow >= dcol.
Isometry random_isometry(std::size_t dcol, std::size_t drow, RngSeed seed);
// denv = 0 selects din * dout.
QuantumChannel random_channel(std::size_t din, std::size_t dout, std::size_t denv,
                              RngSeed seed);
// Convex mixture of random unitaries (unital).
QuantumChannel random_unital_channel(std::size_t d, std::size_t terms, RngSeed seed);

}  // namespace qfdiv
