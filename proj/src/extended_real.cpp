#include "qfdiv/extended_real.hpp"

#include <limits>
#include <sstream>

#include "qfdiv/errors.hpp"

namespace qfdiv {

ExtendedReal ExtendedReal::finite(double v) {
  if (!std::isfinite(v)) {
    throw DomainError("ExtendedReal::finite given a non-finite value");
  }
  return ExtendedReal(Kind::Finite, v);
}

ExtendedReal ExtendedReal::from_double(double v) {
  if (std::isnan(v)) throw DomainError("ExtendedReal from NaN");
  if (std::isinf(v)) return v > 0 ? pos_infinity() : neg_infinity();
  return ExtendedReal(Kind::Finite, v);
}

double ExtendedReal::value() const {
  if (kind_ != Kind::Finite) {
    throw DomainError("value() on an infinite ExtendedReal (" + to_string() + ")");
  }
  return value_;
}

double ExtendedReal::to_double() const {
  switch (kind_) {
    case Kind::PosInfinity: return std::numeric_limits<double>::infinity();
    case Kind::NegInfinity: return -std::numeric_limits<double>::infinity();
    case Kind::Finite: break;
  }
  return value_;
}

ExtendedReal ExtendedReal::operator-() const {
  switch (kind_) {
    case Kind::PosInfinity: return neg_infinity();
    case Kind::NegInfinity: return pos_infinity();
    case Kind::Finite: break;
  }
  return ExtendedReal(Kind::Finite, -value_);
}

ExtendedReal ExtendedReal::operator+(const ExtendedReal& other) const {
  if (is_finite() && other.is_finite()) return from_double(value_ + other.value_);
  if ((is_pos_infinity() && other.is_neg_infinity()) ||
      (is_neg_infinity() && other.is_pos_infinity())) {
    throw DomainError("indeterminate sum +inf + -inf");
  }
  return is_finite() ? other : *this;
}

ExtendedReal ExtendedReal::scaled(double c) const {
  if (std::isnan(c)) throw DomainError("scaling ExtendedReal by NaN");
  if (is_finite()) return from_double(value_ * c);
  if (c == 0.0) throw DomainError("indeterminate product 0 * inf");
  return c > 0 ? *this : -*this;
}

bool ExtendedReal::operator==(const ExtendedReal& other) const {
  return kind_ == other.kind_ && (kind_ != Kind::Finite || value_ == other.value_);
}

bool ExtendedReal::operator<(const ExtendedReal& other) const {
  return to_double() < other.to_double();
}

std::string ExtendedReal::to_string() const {
  switch (kind_) {
    case Kind::PosInfinity: return "inf";
    case Kind::NegInfinity: return "-inf";
    case Kind::Finite: break;
  }
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

}  // namespace qfdiv
