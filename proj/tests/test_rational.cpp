#include "doctest.h"

#include <stdexcept>

#include "chr/rational.hpp"

using chr::BigRational;

TEST_CASE("parse and canonical form") {
  CHECK(BigRational::parse("3/6") == BigRational(1, 2));
  CHECK(BigRational::parse("-4/8") == BigRational(-1, 2));
  CHECK(BigRational::parse("5") == BigRational(5));
  CHECK(BigRational::parse("0/7").is_zero());
  CHECK(BigRational::parse("2/-4") == BigRational(-1, 2));
  CHECK(BigRational(1, 2).str() == "1/2");
  CHECK(BigRational(-3).str() == "-3/1");

  CHECK_THROWS_AS(BigRational::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(BigRational::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(BigRational::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(BigRational::parse("1.5"), std::invalid_argument);
}

TEST_CASE("field arithmetic") {
  BigRational a(2, 3), b(-5, 7), c(11, 13);
  CHECK((a + b) * c == a * c + b * c);
  CHECK(a - a == BigRational(0));
  CHECK(a / a == BigRational(1));
  CHECK((a / b) * b == a);
  CHECK(-(-a) == a);
  CHECK(a.inverse() == BigRational(3, 2));
  CHECK_THROWS_AS(BigRational(0).inverse(), std::domain_error);
  CHECK(a < c);
  CHECK(b < a);
  CHECK(BigRational(-5, 7).abs() == BigRational(5, 7));
  CHECK(BigRational(7, 2).is_integer() == false);
  CHECK(BigRational(14, 2).is_integer());
}

TEST_CASE("big values stay exact") {
  BigRational big = BigRational::parse("123456789012345678901234567890/7");
  CHECK((big * BigRational(7)).str() == "123456789012345678901234567890/1");
}

TEST_CASE("rational reconstruction") {
  CHECK(chr::rational_reconstruct(0.5, 10) == BigRational(1, 2));
  CHECK(chr::rational_reconstruct(1.0 / 3.0, 100) == BigRational(1, 3));
  CHECK(chr::rational_reconstruct(-22.0 / 7.0, 50) == BigRational(-22, 7));
  // best approximation under a denominator cap: pi with den <= 110 is 311/99? no: 22/7
  BigRational pi = chr::rational_reconstruct(3.14159265358979, 120);
  CHECK(pi == BigRational(355, 113));
  CHECK(chr::rational_reconstruct(0.0, 5).is_zero());
  // integers survive
  CHECK(chr::rational_reconstruct(42.0, 1) == BigRational(42));
}
