#pragma once

// Named divergence quantities shared by the CLI and the verification harness.
//
//   neg_log         Tr{X} D(X/Tr X || Y)
//   renyi:a         sandwiched D~_a, a in [1/2,1) or (1,inf)
//   petz_renyi:a    Petz D_a, a in [-1,1) or (1,2]
//   neg_pow:b       optimized quasi-divergence with f(x) = -x^b
//   inv_pow:b       optimized quasi-divergence with f(x) = x^b
//   sandwiched:a    sandwiched D~_a for any a in (0,1) or (1,inf); outside
//                   [1/2,1) this is not a data-processing quantity

#include <optional>
#include <string>
#include <string_view>

#include "qfdiv/divergences.hpp"

namespace qfdiv {

enum class QuantityKind { NegLog, Renyi, PetzRenyi, NegPow, InvPow, ConvexPow, Sandwiched };

struct Quantity {
  QuantityKind kind = QuantityKind::NegLog;
  double param = 0.0;
  std::string spec;

  // Optimized-divergence kernel behind the quantity, when there is one.
  std::optional<FDescriptor> kernel() const;
  // True when the quantity is known to satisfy data processing.
  bool data_processing() const;
};

// ParseError for unknown names or malformed numbers, ArgumentError for
// parameters out of range.
Quantity parse_quantity(std::string_view spec);

struct QuantityResult {
  ExtendedReal value;
  std::string method;  // "closed_form" or "numeric"
  std::optional<DivergenceResult> numeric;
};

// Closed forms where available. With force_numeric, optimized quantities go
// through the tau optimizer instead (Petz quantities have no optimizer path).
QuantityResult evaluate(const Quantity& q, const HermitianOperator& x,
                        const HermitianOperator& y, const OptimizerOptions& opts = {},
                        bool force_numeric = false);

}  // namespace qfdiv
