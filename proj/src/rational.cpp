#include "torcol/rational.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "torcol/error.hpp"

namespace torcol {

namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) fail(ErrorCode::InvalidArgument, "malformed number: '" + std::string(whole) + "'");
  BigInt v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      fail(ErrorCode::InvalidArgument, "malformed number: '" + std::string(whole) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

BigInt pow10(long e) {
  BigInt p = 1;
  for (long i = 0; i < e; ++i) p *= 10;
  return p;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part[0] == '-' || exp_part[0] == '+')) {
      exp_negative = exp_part[0] == '-';
      exp_part.remove_prefix(1);
    }
    const BigInt mag = parse_integer(exp_part, text);
    if (mag > 4000) fail(ErrorCode::InvalidArgument, "exponent out of range: '" + std::string(text) + "'");
    exponent = mag.convert_to<long>() * (exp_negative ? -1 : 1);
    s = s.substr(0, e);
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    frac_digits = static_cast<long>(s.size() - dot - 1);
  } else {
    digits = std::string(s);
  }
  const BigInt mantissa = parse_integer(digits, text);
  const long scale = exponent - frac_digits;
  Rational q = scale >= 0 ? Rational(mantissa * pow10(scale)) : Rational(mantissa, pow10(-scale));
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_decimal(text.substr(0, slash));
    const Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) fail(ErrorCode::InvalidArgument, "zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(text);
}

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "non-finite value");
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  // mant * 2^53 is an integer for every double.
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  BigInt num = scaled;
  if (exp >= 0) return Rational(num << exp);
  return Rational(num, BigInt(1) << (-exp));
}

std::string to_string(const Rational& q) {
  const BigInt n = boost::multiprecision::numerator(q);
  const BigInt d = boost::multiprecision::denominator(q);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

BigInt floor_of(const Rational& q) {
  const BigInt n = boost::multiprecision::numerator(q);
  const BigInt d = boost::multiprecision::denominator(q);
  BigInt f = n / d;  // truncates toward zero
  if (n < 0 && f * d != n) f -= 1;
  return f;
}

}  // namespace torcol
