#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lamexp/common.hpp"

namespace lamexp {

using BigInt = boost::multiprecision::cpp_int;

// A parameter in (1/2, 1) held as a reduced fraction num/den, plus its
// binary64 rendering. Used wherever counts must be exact.
struct ExactLambda {
  BigInt num;
  BigInt den;
  double value = 0.0;

  static ExactLambda from_fraction(const BigInt& num, const BigInt& den);
  // The exact dyadic rational carried by a double.
  static ExactLambda from_double(double value);
  // "p/q" or a plain decimal such as "0.55" (read as 55/100).
  static ExactLambda parse(std::string_view text);

  Lambda lambda() const { return Lambda(value); }
  std::string fraction() const;
};

// Exact rational for a finite double: value = num / 2^shift, num odd or zero.
struct DyadicParts {
  BigInt num;
  int shift = 0;
};
DyadicParts dyadic_parts(double value);

// N interior points j / (6 (N + 1)) + 1/2, j = 1..N, of (1/2, 2/3).
std::vector<ExactLambda> lambda_grid(int points);

// Correctly rounded num/den.
double fraction_to_double(const BigInt& num, const BigInt& den);

}  // namespace lamexp
