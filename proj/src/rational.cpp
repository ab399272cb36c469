// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/rational.hpp"

#include <cctype>

#include "pellipt/error.hpp"

namespace pellipt {

namespace {

using boost::multiprecision::cpp_int;

[[noreturn]] void fail(std::string_view text, std::size_t offset, const char* why) {
  throw ParseError("cannot parse rational '" + std::string(text) + "' at offset " +
                       std::to_string(offset) + ": " + why,
                   offset, 0);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  bool negative = false;
  if (i < n && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  cpp_int mantissa = 0;
  cpp_int scale = 1;
  bool digits = false;
  while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
    mantissa = mantissa * 10 + (text[i++] - '0');
    digits = true;
  }
  if (i < n && text[i] == '.') {
    ++i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mantissa = mantissa * 10 + (text[i++] - '0');
      scale *= 10;
      digits = true;
    }
  }
  if (!digits) fail(text, i, "expected digits");
  Rational value(mantissa, scale);
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool neg_exp = false;
    if (i < n && (text[i] == '+' || text[i] == '-')) neg_exp = text[i++] == '-';
    int e = 0;
    bool exp_digits = false;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      e = e * 10 + (text[i++] - '0');
      exp_digits = true;
      if (e > 400) fail(text, i, "exponent out of range");
    }
    if (!exp_digits) fail(text, i, "expected exponent digits");
    cpp_int p10 = boost::multiprecision::pow(cpp_int(10), e);
    value = neg_exp ? value / Rational(p10) : value * Rational(p10);
  } else if (i < n && text[i] == '/') {
    ++i;
    const Rational den = parse_rational(text.substr(i));
    if (den == 0) fail(text, i, "zero denominator");
    value /= den;
    i = n;
  }
  if (i != n) fail(text, i, "trailing characters");
  return negative ? -value : value;
}

std::string to_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace pellipt
