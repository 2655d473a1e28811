#pragma once

// Optimized and Petz f-divergences, their closed forms, and the classical and
// classical-quantum reductions.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfdiv/extended_real.hpp"
#include "qfdiv/fkernel.hpp"
#include "qfdiv/linops.hpp"

namespace qfdiv {

struct OptimizerOptions {
  int max_iters = 500;
  double grad_tol = 1e-7;
  std::vector<double> epsilon_schedule{1e-2, 1e-4, 1e-6, 1e-8};
  int multistarts = 3;  // H = 0 plus (multistarts - 1) seeded random starts
  std::uint64_t seed = 0;
  std::string step_rule = "lbfgs-armijo";
};

struct DivergenceResult {
  ExtendedReal value;
  std::optional<HermitianOperator> tau_star;
  std::vector<double> epsilon_schedule;  // rungs actually evaluated
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

enum class EvalPath { Tensor, Spectral, RelativeModular };

// Q_f(X||Z; tau) = <phi^X| f(tau^{-1} (x) Z^T) |phi^X>. Z and tau must be
// positive definite (DomainError otherwise).
double optimized_f_at(const HermitianOperator& x, const HermitianOperator& z,
                      const HermitianOperator& tau, const FDescriptor& f,
                      EvalPath path = EvalPath::Spectral);

// <X^{1/2}, f(Delta)(X^{1/2})> with Delta(W) = Y W tau^{-1}, via the d^2 x d^2
// superoperator matrix.
double rel_modular_eval(const HermitianOperator& x, const HermitianOperator& y,
                        const HermitianOperator& tau, const FDescriptor& f);

// Numeric supremum over unit-trace positive definite tau, with the epsilon
// regularization of ker Y. Non-convergence is reported through the flag; the
// value is then a lower bound.
DivergenceResult optimized_f_divergence(const HermitianOperator& x,
                                        const HermitianOperator& y,
                                        const FDescriptor& f,
                                        const OptimizerOptions& opts = {});

// Value of the optimized divergence, using a closed form when f is NegLog,
// NegPower or InvPower with exponent above -1, and the optimizer otherwise.
ExtendedReal optimized_f_value(const HermitianOperator& x, const HermitianOperator& y,
                               const FDescriptor& f, const OptimizerOptions& opts = {});

// D(X/Tr X || Y); +inf unless supp X is inside supp Y.
ExtendedReal quantum_relative_entropy(const HermitianOperator& x, const HermitianOperator& y);

// Sandwiched order alpha in [1/2,1) or (1,inf). With allow_any_order, any
// alpha in (0,1) or (1,inf) is accepted.
ExtendedReal sandwiched_renyi(const HermitianOperator& x, const HermitianOperator& y,
                              double alpha, bool allow_any_order = false);
// -||Y^{g} X Y^{g}||_alpha for alpha < 1 and +||...||_alpha for alpha > 1,
// g = (1-alpha)/(2 alpha).
ExtendedReal sandwiched_quasi(const HermitianOperator& x, const HermitianOperator& y,
                              double alpha, bool allow_any_order = false);

// A^alpha / Tr{A^alpha} with A = X^{1/2} (Y + eps Pi^perp)^{(1-alpha)/alpha} X^{1/2}.
HermitianOperator holder_optimal_tau(const HermitianOperator& x, const HermitianOperator& y,
                                     double alpha, double eps);

ExtendedReal petz_f_divergence(const HermitianOperator& x, const HermitianOperator& y,
                               const FDescriptor& f);

// alpha in [-1,1) or (1,2]. Orders in [-1,0) are in the reversed range.
ExtendedReal petz_renyi(const HermitianOperator& x, const HermitianOperator& y, double alpha);
inline bool petz_renyi_reversed(double alpha) { return alpha >= -1.0 && alpha < 0.0; }

// Tr{X^{1/2} Y^beta X^{1/2} tau^{-beta}}, beta in [1,2], all positive definite.
double optimized_alpha_divergence_at(const HermitianOperator& x, const HermitianOperator& y,
                                     const HermitianOperator& tau, double beta);

DivergenceResult classical_f_divergence(const RealVector& lambda, const RealVector& mu,
                                        const FDescriptor& f,
                                        const OptimizerOptions& opts = {});

struct CqBlock {
  HermitianOperator x;
  HermitianOperator y;
};

DivergenceResult cq_f_divergence(const std::vector<CqBlock>& blocks, const FDescriptor& f,
                                 const OptimizerOptions& opts = {});

// Block-diagonal assembly of the blocks' X and Y.
std::pair<HermitianOperator, HermitianOperator> assemble_blocks(const std::vector<CqBlock>& blocks);

struct GapPair {
  ExtendedReal lhs;  // sandwiched D~_alpha(X||Y)
  ExtendedReal rhs;  // D_{(2 alpha - 1)/alpha}(X||Y) - log Tr X
};

GapPair sandwiched_vs_petz_gap(const HermitianOperator& x, const HermitianOperator& y,
                               double alpha);

}  // namespace qfdiv
