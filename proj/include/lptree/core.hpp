#pragma once

// Shared numeric carriers and error types.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lptree {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Index of a value inside one attribute's domain.
using ValueIndex = std::uint32_t;

/// Malformed or inconsistent user input (documents, flags, alternatives).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A feasibility guard refused to run an enumeration or exact computation.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::domain_error("zero denominator");
  return Rational(num, den);
}

inline std::string exact_string(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r) << '/'
     << boost::multiprecision::denominator(r);
  return os.str();
}

/// Decimal rendering with 12 significant digits, `%g` style.
inline std::string decimal_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  long double value = num.convert_to<long double>() / den.convert_to<long double>();
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(12) << value;
  return os.str();
}

/// "decimal (num/den)"
inline std::string format_rational(const Rational& r) {
  return decimal_string(r) + " (" + exact_string(r) + ")";
}

/// Parses a finite decimal literal such as "0.9" or "1e-2" into an exact rational.
inline Rational parse_decimal(const std::string& text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  BigInt mantissa = 0;
  long long scale = 0;
  bool digits = false;
  bool point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (point) --scale;
      digits = true;
    } else if (c == '.' && !point) {
      point = true;
    } else {
      break;
    }
  }
  if (!digits) throw InputError("not a decimal number: '" + text + "'");
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    try {
      std::size_t used = 0;
      const long long exponent = std::stoll(text.substr(pos + 1), &used);
      if (used == 0 || pos + 1 + used != text.size()) throw InputError("");
      scale += exponent;
    } catch (const std::exception&) {
      throw InputError("not a decimal number: '" + text + "'");
    }
    pos = text.size();
  }
  if (pos != text.size()) throw InputError("not a decimal number: '" + text + "'");
  if (scale > 4096 || scale < -4096) throw InputError("exponent out of range: '" + text + "'");
  BigInt power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  Rational value = scale < 0 ? Rational(mantissa, power) : Rational(mantissa * power);
  return negative ? Rational(-value) : value;
}

}  // namespace lptree
