#pragma once

#include <cmath>
#include <string>

namespace qfdiv {

// Finite value, +inf or -inf. Finite values are never NaN.
class ExtendedReal {
 public:
  enum class Kind { Finite, PosInfinity, NegInfinity };

  ExtendedReal() = default;

  static ExtendedReal finite(double v);
  static ExtendedReal pos_infinity() { return ExtendedReal(Kind::PosInfinity, 0.0); }
  static ExtendedReal neg_infinity() { return ExtendedReal(Kind::NegInfinity, 0.0); }
  // Maps IEEE infinities to the matching kind; NaN is rejected.
  static ExtendedReal from_double(double v);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_pos_infinity() const { return kind_ == Kind::PosInfinity; }
  bool is_neg_infinity() const { return kind_ == Kind::NegInfinity; }

  // Throws DomainError unless finite.
  double value() const;
  // IEEE view: +/-inf for the infinite kinds.
  double to_double() const;

  ExtendedReal operator-() const;
  // inf + (-inf) is a DomainError.
  ExtendedReal operator+(const ExtendedReal& other) const;
  ExtendedReal operator-(const ExtendedReal& other) const { return *this + (-other); }
  // Scaling by zero gives zero only for finite values; 0 * inf is a DomainError.
  ExtendedReal scaled(double c) const;

  bool operator==(const ExtendedReal& other) const;
  bool operator<(const ExtendedReal& other) const;
  bool operator>(const ExtendedReal& other) const { return other < *this; }
  bool operator<=(const ExtendedReal& other) const { return !(other < *this); }
  bool operator>=(const ExtendedReal& other) const { return !(*this < other); }

  std::string to_string() const;

 private:
  ExtendedReal(Kind k, double v) : kind_(k), value_(v) {}

  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

}  // namespace qfdiv
