#include "kernelcat/rational.hpp"

#include <cctype>

#include "kernelcat/error.hpp"

namespace kernelcat {
namespace {

boost::multiprecision::cpp_int parse_integer(std::string_view digits, std::string_view whole) {
  std::size_t start = 0;
  bool negative = false;
  if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
    negative = digits[0] == '-';
    start = 1;
  }
  if (start == digits.size()) {
    throw Error(ErrorCode::ParseError, "malformed rational '" + std::string(whole) + "'");
  }
  boost::multiprecision::cpp_int value = 0;
  for (std::size_t i = start; i < digits.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(digits[i]))) {
      throw Error(ErrorCode::ParseError, "malformed rational '" + std::string(whole) + "'");
    }
    value = value * 10 + (digits[i] - '0');
  }
  return negative ? boost::multiprecision::cpp_int(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(parse_integer(text, text));
  }
  const auto num = parse_integer(text.substr(0, slash), text);
  const auto den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) {
    throw Error(ErrorCode::ParseError, "denominator must be a positive integer in '" +
                                           std::string(text) + "'");
  }
  const auto den = parse_integer(den_text, text);
  if (den == 0) {
    throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
  }
  return Rational(num, den);
}

std::string format_rational(const Rational& value) {
  return boost::multiprecision::numerator(value).str() + "/" +
         boost::multiprecision::denominator(value).str();
}

}  // namespace kernelcat
