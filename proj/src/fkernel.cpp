#include "qfdiv/fkernel.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "qfdiv/errors.hpp"

namespace qfdiv {

namespace {

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ArgumentError(what);
}

}  // namespace

double FDescriptor::derivative(double x) const {
  if (derivative_) return derivative_(x);
  const double h = 1e-6 * std::max(1.0, x);
  const double lo = std::max(x - h, 0.5 * x);
  const double hi = x + h;
  return (eval_(hi) - eval_(lo)) / (hi - lo);
}

FDescriptor make_builtin(BuiltinFamily family) {
  FDescriptor f;
  f.family_ = family.kind;
  const double b = family.beta;
  const auto inf = ExtendedReal::pos_infinity();
  const auto ninf = ExtendedReal::neg_infinity();
  const auto zero = ExtendedReal::finite(0.0);
  switch (family.kind) {
    case Family::NegLog:
      f.name_ = "neg_log";
      f.eval_ = [](double x) { return -std::log(x); };
      f.derivative_ = [](double x) { return -1.0 / x; };
      f.limit_at_zero_ = inf;
      f.limit_at_infinity_ = ninf;
      f.anti_monotone_ = f.operator_convex_ = true;
      break;
    case Family::NegPower:
      require(b > 0.0 && b <= 1.0, "neg_pow exponent must lie in (0,1], got " + format_param(b));
      f.name_ = "neg_pow:" + format_param(b);
      f.params_ = {b};
      f.eval_ = [b](double x) { return -std::pow(x, b); };
      f.derivative_ = [b](double x) { return -b * std::pow(x, b - 1.0); };
      f.limit_at_zero_ = zero;
      f.limit_at_infinity_ = ninf;
      f.anti_monotone_ = f.operator_convex_ = true;
      break;
    case Family::InvPower:
      require(b >= -1.0 && b < 0.0, "inv_pow exponent must lie in [-1,0), got " + format_param(b));
      f.name_ = "inv_pow:" + format_param(b);
      f.params_ = {b};
      f.eval_ = [b](double x) { return std::pow(x, b); };
      f.derivative_ = [b](double x) { return b * std::pow(x, b - 1.0); };
      f.limit_at_zero_ = inf;
      f.limit_at_infinity_ = zero;
      f.anti_monotone_ = f.operator_convex_ = true;
      break;
    case Family::ConvexPower:
      require(b >= 1.0 && b <= 2.0, "convex_pow exponent must lie in [1,2], got " + format_param(b));
      f.name_ = "convex_pow:" + format_param(b);
      f.params_ = {b};
      f.eval_ = [b](double x) { return std::pow(x, b); };
      f.derivative_ = [b](double x) { return b * std::pow(x, b - 1.0); };
      f.limit_at_zero_ = zero;
      f.limit_at_infinity_ = inf;
      f.anti_monotone_ = false;
      f.operator_convex_ = true;
      break;
    case Family::Custom:
      throw ArgumentError("make_builtin: Custom is not a built-in family");
  }
  return f;
}

FDescriptor make_custom(std::string name, FDescriptor::ScalarFn eval,
                        FDescriptor::ScalarFn derivative,
                        ExtendedReal limit_at_zero,
                        ExtendedReal limit_at_infinity, bool anti_monotone,
                        bool operator_convex) {
  if (!eval) throw ArgumentError("make_custom: eval is empty");
  FDescriptor f;
  f.name_ = std::move(name);
  f.family_ = Family::Custom;
  f.eval_ = std::move(eval);
  f.derivative_ = std::move(derivative);
  f.limit_at_zero_ = limit_at_zero;
  f.limit_at_infinity_ = limit_at_infinity;
  f.anti_monotone_ = anti_monotone;
  f.operator_convex_ = operator_convex;
  if (anti_monotone || operator_convex) {
    f.caveat_ = "operator flags on '" + f.name_ +
                "' are caller-declared; data-processing guarantees assume them";
  }
  return f;
}

FDescriptor dual_k(const FDescriptor& f) {
  switch (f.family()) {
    case Family::NegLog:
      return make_builtin(BuiltinFamily::neg_log());
    case Family::NegPower:
      return make_builtin(BuiltinFamily::inv_power(-f.beta()));
    case Family::InvPower:
      return make_builtin(BuiltinFamily::neg_power(-f.beta()));
    default:
      break;
  }
  auto eval = [f](double x) { return -f.eval(1.0 / x); };
  auto deriv = [f](double x) { return f.derivative(1.0 / x) / (x * x); };
  FDescriptor k = make_custom("dual(" + f.name() + ")", eval, deriv,
                              -f.limit_at_infinity(), -f.limit_at_zero(),
                              false, false);
  return k;
}

FDescriptor renyi_f(double alpha) {
  const bool low = alpha >= 0.5 && alpha < 1.0;
  const bool high = alpha > 1.0 && std::isfinite(alpha);
  if (!low && !high) {
    throw ArgumentError("sandwiched order must lie in [1/2,1) or (1,inf), got " +
                        format_param(alpha));
  }
  const double e = (1.0 - alpha) / alpha;
  return low ? make_builtin(BuiltinFamily::neg_power(e))
             : make_builtin(BuiltinFamily::inv_power(e));
}

void validate(const FDescriptor& f) {
  constexpr int kGrid = 1000;
  double prev = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    // Log-spaced from 1e-6 to 1e6.
    const double x = std::pow(10.0, -6.0 + 12.0 * i / (kGrid - 1));
    const double v = f.eval(x);
    if (!std::isfinite(v)) {
      throw ArgumentError("kernel '" + f.name() + "' is not finite at x = " + format_param(x));
    }
    if (f.anti_monotone() && i > 0 && v > prev + 1e-12 * (1.0 + std::abs(prev))) {
      throw ArgumentError("kernel '" + f.name() + "' is flagged anti-monotone but increases near x = " +
                          format_param(x));
    }
    prev = v;
  }
  const double v0 = f.eval(1e-12);
  const double v1 = f.eval(1.0);
  const double vinf = f.eval(1e12);
  auto consistent = [&](const ExtendedReal& lim, double near, const char* where) {
    bool ok = true;
    if (lim.is_pos_infinity()) ok = near >= v1;
    else if (lim.is_neg_infinity()) ok = near <= v1;
    else ok = std::isfinite(near);
    if (!ok) {
      throw ArgumentError("kernel '" + f.name() + "' limit at " + where +
                          " is inconsistent with its values");
    }
  };
  consistent(f.limit_at_zero(), v0, "0");
  consistent(f.limit_at_infinity(), vinf, "infinity");
}

double parse_real(std::string_view text) {
  auto parse_plain = [&](std::string_view s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) {
      throw ParseError("malformed number '" + std::string(text) + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_plain(text);
  const double num = parse_plain(text.substr(0, slash));
  const double den = parse_plain(text.substr(slash + 1));
  if (den == 0.0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

FDescriptor parse_f_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  const bool has_param = colon != std::string_view::npos;
  auto param = [&]() {
    if (!has_param) throw ParseError("kernel '" + std::string(name) + "' needs a parameter");
    return parse_real(spec.substr(colon + 1));
  };
  if (name == "neg_log") {
    if (has_param) throw ParseError("neg_log takes no parameter");
    return make_builtin(BuiltinFamily::neg_log());
  }
  if (name == "neg_pow") return make_builtin(BuiltinFamily::neg_power(param()));
  if (name == "inv_pow") return make_builtin(BuiltinFamily::inv_power(param()));
  if (name == "convex_pow") return make_builtin(BuiltinFamily::convex_power(param()));
  if (name == "renyi") return renyi_f(param());
  throw ParseError("unknown kernel '" + std::string(spec) + "'");
}

}  // namespace qfdiv
