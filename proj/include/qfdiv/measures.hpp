#pragma once

// Information measures built on the optimized f-divergence. Values are in
// quasi form: for f = -log they are the usual entropic quantities in nats.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfdiv/channels.hpp"
#include "qfdiv/divergences.hpp"

namespace qfdiv {

struct MeasureOptions {
  OptimizerOptions inner;
  int outer_max_iters = 200;
  double outer_grad_tol = 1e-8;
  int outer_multistarts = 5;  // warm start, maximally mixed, then random
  double fd_step = 1e-5;
  std::uint64_t seed = 0;
};

struct MeasureResult {
  ExtendedReal value;
  std::optional<HermitianOperator> inner_witness;
  // False when an outer or numeric inner optimization stopped early. An
  // infimum is then an upper bound built from lower bounds, so the value is
  // not certified in either direction.
  bool converged = true;
};

struct FreeStateSet {
  std::vector<HermitianOperator> states;
};

// -Q_f(rho || I).
MeasureResult f_entropy(const HermitianOperator& rho, const FDescriptor& f,
                        const MeasureOptions& opts = {});

// inf over sigma_B of Q_f(rho_AB || rho_A (x) sigma_B). Layout factor 0 is A.
MeasureResult f_mutual_information(const HermitianOperator& rho_ab, const SystemLayout& layout,
                                   const FDescriptor& f, const MeasureOptions& opts = {});

// -inf over sigma_B of Q_f(rho_AB || I_A (x) sigma_B).
MeasureResult conditional_f_entropy(const HermitianOperator& rho_ab, const SystemLayout& layout,
                                    const FDescriptor& f, const MeasureOptions& opts = {});
MeasureResult coherent_f_information(const HermitianOperator& rho_ab, const SystemLayout& layout,
                                     const FDescriptor& f, const MeasureOptions& opts = {});

// min over the free set of Q_f(rho || sigma).
MeasureResult resource_measure(const HermitianOperator& rho, const FreeStateSet& free,
                               const FDescriptor& f, const MeasureOptions& opts = {});

// sup over pure inputs psi_RA, |R| = |A|, of the mutual information of
// (id_R (x) N)(psi). Inputs are parametrized as (M (x) I)|Gamma> normalized.
MeasureResult channel_f_mutual_information(const QuantumChannel& ch, const FDescriptor& f,
                                           const MeasureOptions& opts = {});

struct DualityPair {
  MeasureResult lhs;  // conditional entropy of rho_AB with f
  MeasureResult rhs;  // minus the conditional entropy of rho_AC with dual_k(f)
};

// psi on A (x) B (x) C given by a three-factor layout in that order.
DualityPair duality_pair(const PureStateVector& psi, const FDescriptor& f,
                         const MeasureOptions& opts = {});

}  // namespace qfdiv
