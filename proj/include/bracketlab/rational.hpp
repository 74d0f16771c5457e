#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bracketlab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(long num, long den = 1) {
    return Rational(num, den);
}

// Parses "3", "-1/2", "6/5".
Rational parse_rational(const std::string& s);

// "num/den" with den omitted when 1.
std::string rational_to_string(const Rational& r);

// Dollars rounded to the cent, half away from zero, e.g. "6.40".
std::string format_dollars(const Rational& r);

inline long rational_to_long(const Rational& r) {
    if (denominator(r) != 1) throw std::invalid_argument("not an integer rational");
    return static_cast<long>(numerator(r));
}

inline double rational_to_double(const Rational& r) {
    return r.convert_to<double>();
}

} // namespace bracketlab
