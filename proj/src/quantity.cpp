#include "qfdiv/quantity.hpp"

#include <cmath>

#include "qfdiv/errors.hpp"

namespace qfdiv {

std::optional<FDescriptor> Quantity::kernel() const {
  switch (kind) {
    case QuantityKind::NegLog: return make_builtin(BuiltinFamily::neg_log());
    case QuantityKind::Renyi: return renyi_f(param);
    case QuantityKind::NegPow: return make_builtin(BuiltinFamily::neg_power(param));
    case QuantityKind::InvPow: return make_builtin(BuiltinFamily::inv_power(param));
    case QuantityKind::ConvexPow: return make_builtin(BuiltinFamily::convex_power(param));
    case QuantityKind::PetzRenyi:
    case QuantityKind::Sandwiched: break;
  }
  return std::nullopt;
}

bool Quantity::data_processing() const {
  switch (kind) {
    case QuantityKind::PetzRenyi: return param >= 0.0 && param <= 2.0;
    case QuantityKind::Sandwiched: return param >= 0.5;
    case QuantityKind::ConvexPow: return false;
    default: return true;
  }
}

Quantity parse_quantity(std::string_view spec) {
  Quantity q;
  q.spec = std::string(spec);
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  if (name == "petz_renyi" || name == "sandwiched") {
    if (colon == std::string_view::npos) {
      throw ParseError("quantity '" + std::string(name) + "' needs a parameter");
    }
    q.param = parse_real(spec.substr(colon + 1));
    if (name == "petz_renyi") {
      q.kind = QuantityKind::PetzRenyi;
      if (q.param == 1.0 || q.param < -1.0 || q.param > 2.0) {
        throw ArgumentError("petz_renyi order must lie in [-1,1) or (1,2]");
      }
    } else {
      q.kind = QuantityKind::Sandwiched;
      if (!(q.param > 0.0) || q.param == 1.0 || !std::isfinite(q.param)) {
        throw ArgumentError("sandwiched order must lie in (0,1) or (1,inf)");
      }
    }
    return q;
  }
  // Validates the kernel name and parameter range.
  const FDescriptor f = parse_f_spec(spec);
  q.param = f.beta();
  switch (f.family()) {
    case Family::NegLog: q.kind = QuantityKind::NegLog; break;
    case Family::NegPower: q.kind = QuantityKind::NegPow; break;
    case Family::InvPower: q.kind = QuantityKind::InvPow; break;
    case Family::ConvexPower: q.kind = QuantityKind::ConvexPow; break;
    case Family::Custom: break;
  }
  if (name == "renyi") {
    q.kind = QuantityKind::Renyi;
    q.param = parse_real(spec.substr(colon + 1));
  }
  return q;
}

QuantityResult evaluate(const Quantity& q, const HermitianOperator& x,
                        const HermitianOperator& y, const OptimizerOptions& opts,
                        bool force_numeric) {
  QuantityResult out;
  out.method = "closed_form";
  switch (q.kind) {
    case QuantityKind::PetzRenyi:
      out.value = petz_renyi(x, y, q.param);
      return out;
    case QuantityKind::Sandwiched:
      out.value = sandwiched_renyi(x, y, q.param, true);
      return out;
    case QuantityKind::ConvexPow:
      throw ArgumentError("convex_pow has no supremum form; only fixed-tau evaluation is defined");
    default:
      break;
  }
  const FDescriptor f = *q.kernel();
  const bool closed = !force_numeric && !(q.kind == QuantityKind::InvPow && q.param <= -1.0);
  if (closed) {
    out.value = q.kind == QuantityKind::Renyi ? sandwiched_renyi(x, y, q.param)
                                              : optimized_f_value(x, y, f, opts);
    return out;
  }
  out.method = "numeric";
  DivergenceResult r = optimized_f_divergence(x, y, f, opts);
  out.value = r.value;
  if (q.kind == QuantityKind::Renyi && r.value.is_finite()) {
    const double norm = std::abs(r.value.value());
    out.value = norm == 0.0 ? ExtendedReal::pos_infinity()
                            : ExtendedReal::finite(q.param / (q.param - 1.0) * std::log(norm));
  }
  out.numeric = std::move(r);
  return out;
}

}  // namespace qfdiv
