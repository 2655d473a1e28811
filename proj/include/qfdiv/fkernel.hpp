#pragma once

// Scalar kernels f on (0, inf) for f-divergences.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qfdiv/extended_real.hpp"

namespace qfdiv {

enum class Family { NegLog, NegPower, InvPower, ConvexPower, Custom };

// NegPower: f(x) = -x^beta, beta in (0,1].
// InvPower: f(x) = x^beta, beta in [-1,0).
// ConvexPower: f(x) = x^beta, beta in [1,2].
struct BuiltinFamily {
  Family kind = Family::NegLog;
  double beta = 0.0;

  static BuiltinFamily neg_log() { return {Family::NegLog, 0.0}; }
  static BuiltinFamily neg_power(double b) { return {Family::NegPower, b}; }
  static BuiltinFamily inv_power(double b) { return {Family::InvPower, b}; }
  static BuiltinFamily convex_power(double b) { return {Family::ConvexPower, b}; }
};

class FDescriptor {
 public:
  using ScalarFn = std::function<double(double)>;

  FDescriptor() = default;

  const std::string& name() const { return name_; }
  const std::vector<double>& params() const { return params_; }
  Family family() const { return family_; }
  // Exponent of the power families; 0 for NegLog and custom kernels.
  double beta() const { return params_.empty() ? 0.0 : params_.front(); }

  double operator()(double x) const { return eval_(x); }
  double eval(double x) const { return eval_(x); }
  // f'(x); central differences when the kernel was built without one.
  double derivative(double x) const;

  const ExtendedReal& limit_at_zero() const { return limit_at_zero_; }
  const ExtendedReal& limit_at_infinity() const { return limit_at_infinity_; }
  bool anti_monotone() const { return anti_monotone_; }
  bool operator_convex() const { return operator_convex_; }

  // Non-empty for caller-declared kernels whose flags were not established.
  const std::string& caveat() const { return caveat_; }

 private:
  friend FDescriptor make_builtin(BuiltinFamily family);
  friend FDescriptor make_custom(std::string name, ScalarFn eval,
                                 ScalarFn derivative, ExtendedReal limit_at_zero,
                                 ExtendedReal limit_at_infinity,
                                 bool anti_monotone, bool operator_convex);

  std::string name_;
  std::vector<double> params_;
  Family family_ = Family::Custom;
  ScalarFn eval_;
  ScalarFn derivative_;
  ExtendedReal limit_at_zero_;
  ExtendedReal limit_at_infinity_;
  bool anti_monotone_ = false;
  bool operator_convex_ = false;
  std::string caveat_;
};

// Throws ArgumentError when the parameter is outside the family's interval.
FDescriptor make_builtin(BuiltinFamily family);

// Flags are taken on trust. The divergence inequalities only hold for
// operator anti-monotone f; the returned descriptor carries that caveat.
FDescriptor make_custom(std::string name, FDescriptor::ScalarFn eval,
                        FDescriptor::ScalarFn derivative,
                        ExtendedReal limit_at_zero,
                        ExtendedReal limit_at_infinity, bool anti_monotone,
                        bool operator_convex);

// k(x) = -f(1/x).
FDescriptor dual_k(const FDescriptor& f);

// Sandwiched kernel: -x^{(1-a)/a} for a in [1/2,1), x^{(1-a)/a} for a > 1.
FDescriptor renyi_f(double alpha);

// Sanity checks on a 10^3 point grid: finite values, monotone ordering for
// anti-monotone kernels, and limits consistent with values at 1e-12 and 1e12.
// Throws ArgumentError naming the first failure.
void validate(const FDescriptor& f);

// Parses a real written as a decimal or a fraction "p/q".
double parse_real(std::string_view text);

// `neg_log`, `neg_pow:b`, `inv_pow:b`, `convex_pow:b`, `renyi:a`.
// Unknown names and malformed numbers throw ParseError; parameters out of
// range throw ArgumentError.
FDescriptor parse_f_spec(std::string_view spec);

}  // namespace qfdiv
