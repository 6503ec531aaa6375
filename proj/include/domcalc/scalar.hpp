#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace domcalc {

/// Exact rational scalar. Literals are written as decimals ("273.15",
/// "1.5e3") or fractions ("5/18"); values whose denominator has only the
/// prime factors 2 and 5 print back as terminating decimals.
class Scalar
{
public:
  using Rep = boost::multiprecision::cpp_rational;

  Scalar() = default;
  Scalar(std::int64_t v) : d_value(v) {}
  explicit Scalar(Rep v) : d_value(std::move(v)) {}

  static std::optional<Scalar> parse(std::string_view text);
  static Scalar pow10(int exponent);

  const Rep& rep() const { return d_value; }
  bool is_zero() const { return d_value == 0; }
  int sign() const { return d_value.sign(); }
  /// True when the value has a finite decimal expansion.
  bool is_decimal() const;
  std::string to_string() const;
  double to_double() const { return d_value.convert_to<double>(); }

  Scalar operator-() const { return Scalar(Rep(-d_value)); }
  Scalar& operator+=(const Scalar& o) { d_value += o.d_value; return *this; }
  Scalar& operator-=(const Scalar& o) { d_value -= o.d_value; return *this; }
  Scalar& operator*=(const Scalar& o) { d_value *= o.d_value; return *this; }
  /// Division by zero throws std::domain_error.
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.d_value == b.d_value; }
  friend std::strong_ordering operator<=>(const Scalar& a, const Scalar& b)
  {
    if (a.d_value < b.d_value) return std::strong_ordering::less;
    if (a.d_value > b.d_value) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.to_string(); }

private:
  Rep d_value;
};

}  // namespace domcalc
