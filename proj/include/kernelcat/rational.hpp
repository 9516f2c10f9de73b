#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace kernelcat {

/// Arbitrary-precision exact rational used throughout the finite engine.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

/// Parses "p/q" (q > 0) or a bare integer "p". Throws Error(ParseError) otherwise.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form in lowest terms; the denominator is always written.
std::string format_rational(const Rational& value);

}  // namespace kernelcat
