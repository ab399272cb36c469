// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace pellipt {

/// Arbitrary-precision rational; interval endpoints never round.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "6", "-3", "1.5", "2.5e-1", or "3/2" exactly. Throws ParseError.
Rational parse_rational(std::string_view text);

/// "18/17", "6", "-1/2".
std::string to_string(const Rational& r);

double to_double(const Rational& r);

Rational abs(const Rational& r);

}  // namespace pellipt
