#include "doctest.h"
#include "torcol/error.hpp"
#include "torcol/rational.hpp"

using namespace torcol;

TEST_CASE("parse_rational forms") {
  CHECK(parse_rational("11/50") == Rational(11, 50));
  CHECK(parse_rational("0.22") == Rational(11, 50));
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("2.5e-1") == Rational(1, 4));
  CHECK(parse_rational("-0.5") == Rational(-1, 2));
}

TEST_CASE("parse_rational rejects junk") {
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("0.2x"), Error);
}

TEST_CASE("exact_from_double is dyadic") {
  CHECK(exact_from_double(0.5) == Rational(1, 2));
  CHECK(exact_from_double(0.22) != Rational(11, 50));
  CHECK(to_double(exact_from_double(0.22)) == 0.22);
}

TEST_CASE("floor_of") {
  CHECK(floor_of(Rational(7, 2)) == 3);
  CHECK(floor_of(Rational(-7, 2)) == -4);
  CHECK(floor_of(Rational(4)) == 4);
  CHECK(to_string(Rational(11, 50)) == "11/50");
}
