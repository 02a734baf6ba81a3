#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <string_view>

namespace torcol {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "11/50", "0.22", "3", "2.5e-1" into an exact rational.
Rational parse_rational(std::string_view text);

// Exact value of a finite double (every double is a dyadic rational).
Rational exact_from_double(double x);

std::string to_string(const Rational& q);
double to_double(const Rational& q);

// floor(q) for any rational.
BigInt floor_of(const Rational& q);

}  // namespace torcol
