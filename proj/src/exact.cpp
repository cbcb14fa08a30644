#include "lamexp/exact.hpp"

#include <cmath>
#include <cstdint>

namespace lamexp {

namespace mp = boost::multiprecision;

double fraction_to_double(const BigInt& num, const BigInt& den) {
  if (den <= 0) throw DomainError("denominator must be positive");
  if (num == 0) return 0.0;
  bool negative = num < 0;
  BigInt a = negative ? BigInt(-num) : num;
  // Scale so the integer quotient carries 64 significant bits, then fold the
  // remainder into the lowest bit so ties round correctly.
  int shift = 63 - static_cast<int>(mp::msb(a)) + static_cast<int>(mp::msb(den));
  BigInt q;
  BigInt r;
  for (;;) {
    if (shift >= 0) {
      mp::divide_qr(BigInt(a << shift), den, q, r);
    } else {
      mp::divide_qr(a, BigInt(den << -shift), q, r);
    }
    auto top = mp::msb(q);
    if (top == 63) break;
    shift += top < 63 ? 1 : -1;
  }
  auto bits = static_cast<std::uint64_t>(q);
  if (r != 0) bits |= 1u;
  double v = std::ldexp(static_cast<double>(bits), -shift);
  return negative ? -v : v;
}

ExactLambda ExactLambda::from_fraction(const BigInt& num, const BigInt& den) {
  if (den <= 0) throw DomainError("denominator must be positive");
  BigInt g = mp::gcd(num, den);
  ExactLambda out;
  out.num = num / g;
  out.den = den / g;
  if (!(2 * out.num > out.den && out.num < out.den)) {
    throw DomainError("lambda must lie in (1/2, 1), got " + out.fraction());
  }
  out.value = fraction_to_double(out.num, out.den);
  // the rounded value can land on 1/2 only for absurdly large denominators
  (void)Lambda(out.value);
  return out;
}

DyadicParts dyadic_parts(double value) {
  if (!std::isfinite(value)) throw DomainError("value must be finite");
  DyadicParts out;
  if (value == 0.0) return out;
  int exp = 0;
  double mant = std::frexp(value, &exp);  // value = mant * 2^exp, 0.5 <= |mant| < 1
  auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  int shift = 53 - exp;
  while (m % 2 == 0 && shift > 0) {
    m /= 2;
    --shift;
  }
  out.num = m;
  if (shift < 0) {
    out.num <<= -shift;
    shift = 0;
  }
  out.shift = shift;
  return out;
}

ExactLambda ExactLambda::from_double(double value) {
  (void)Lambda(value);
  DyadicParts parts = dyadic_parts(value);
  ExactLambda out;
  out.num = parts.num;
  out.den = BigInt(1) << parts.shift;
  out.value = value;
  return out;
}

ExactLambda ExactLambda::parse(std::string_view text) {
  auto slash = text.find('/');
  auto parse_int = [&](std::string_view s) {
    if (s.empty()) throw DomainError("malformed fraction: " + std::string(text));
    for (char c : s) {
      if (c < '0' || c > '9') throw DomainError("malformed number: " + std::string(text));
    }
    // a leading zero would make the string constructor read octal
    auto first = s.find_first_not_of('0');
    return first == std::string_view::npos ? BigInt(0) : BigInt(std::string(s.substr(first)));
  };
  if (slash != std::string_view::npos) {
    return from_fraction(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return from_fraction(parse_int(text), 1);
  std::string digits(text.substr(0, dot));
  std::string frac(text.substr(dot + 1));
  if (digits.empty()) digits = "0";
  BigInt num = parse_int(digits + frac);
  BigInt den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  return from_fraction(num, den);
}

std::string ExactLambda::fraction() const { return num.str() + "/" + den.str(); }

std::vector<ExactLambda> lambda_grid(int points) {
  if (points < 1) throw DomainError("grid needs at least one point");
  std::vector<ExactLambda> out;
  BigInt den = BigInt(6) * (points + 1);
  for (int j = 1; j <= points; ++j) {
    out.push_back(ExactLambda::from_fraction(BigInt(3) * (points + 1) + j, den));
  }
  return out;
}

}  // namespace lamexp
