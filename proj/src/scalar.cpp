#include "domcalc/scalar.hpp"

#include <cctype>
#include <stdexcept>

namespace domcalc {

namespace {

using boost::multiprecision::cpp_int;

std::optional<cpp_int> parse_digits(std::string_view s)
{
  if (s.empty()) return std::nullopt;
  cpp_int v = 0;
  for (char c : s)
  {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

cpp_int ten_to(unsigned n)
{
  cpp_int r = 1;
  for (unsigned i = 0; i < n; ++i) r *= 10;
  return r;
}

}  // namespace

Scalar Scalar::pow10(int exponent)
{
  cpp_int p = ten_to(static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  if (exponent >= 0) return Scalar(Rep(p));
  return Scalar(Rep(cpp_int(1), p));
}

std::optional<Scalar> Scalar::parse(std::string_view text)
{
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '+' || text.front() == '-')
  {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (auto slash = text.find('/'); slash != std::string_view::npos)
  {
    auto num = parse_digits(text.substr(0, slash));
    auto den = parse_digits(text.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    Rep r(*num, *den);
    return Scalar(negative ? Rep(-r) : r);
  }

  int exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos)
  {
    std::string_view exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-'))
    {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    auto ev = parse_digits(exp_text);
    if (!ev || *ev > 4000) return std::nullopt;
    exponent = static_cast<int>(*ev) * (exp_negative ? -1 : 1);
    text = text.substr(0, e);
  }

  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos)
  {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  cpp_int mantissa = 0;
  if (!int_part.empty())
  {
    auto iv = parse_digits(int_part);
    if (!iv) return std::nullopt;
    mantissa = *iv;
  }
  if (!frac_part.empty())
  {
    auto fv = parse_digits(frac_part);
    if (!fv) return std::nullopt;
    mantissa = mantissa * ten_to(static_cast<unsigned>(frac_part.size())) + *fv;
    exponent -= static_cast<int>(frac_part.size());
  }
  Scalar r = Scalar(Rep(mantissa)) * pow10(exponent);
  return negative ? -r : r;
}

Scalar& Scalar::operator/=(const Scalar& o)
{
  if (o.is_zero()) throw std::domain_error("division by zero");
  d_value /= o.d_value;
  return *this;
}

bool Scalar::is_decimal() const
{
  cpp_int den = boost::multiprecision::denominator(d_value);
  while (den % 2 == 0) den /= 2;
  while (den % 5 == 0) den /= 5;
  return den == 1;
}

std::string Scalar::to_string() const
{
  cpp_int num = boost::multiprecision::numerator(d_value);
  cpp_int den = boost::multiprecision::denominator(d_value);
  if (!is_decimal()) return num.str() + "/" + den.str();

  unsigned twos = 0, fives = 0;
  for (cpp_int d = den; d % 2 == 0; d /= 2) ++twos;
  for (cpp_int d = den; d % 5 == 0; d /= 5) ++fives;
  unsigned places = twos > fives ? twos : fives;
  bool negative = num < 0;
  if (negative) num = -num;
  cpp_int scaled = num * ten_to(places) / den;
  std::string digits = scaled.str();
  if (places > 0)
  {
    if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
  }
  return negative ? "-" + digits : digits;
}

}  // namespace domcalc
