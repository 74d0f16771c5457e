#include "bracketlab/rational.hpp"

#include <sstream>

namespace bracketlab {

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(BigInt(s));
        // decimal notation, e.g. "1.20"
        std::string whole = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        bool neg = !whole.empty() && whole[0] == '-';
        BigInt scale = 1;
        for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
        BigInt w = whole.empty() || whole == "-" ? BigInt(0) : BigInt(whole);
        BigInt f = frac.empty() ? BigInt(0) : BigInt(frac);
        Rational r = Rational(abs(w) * scale + f, scale);
        return neg ? -r : r;
    }
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + s);
    return Rational(num, den);
}

std::string rational_to_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

std::string format_dollars(const Rational& r) {
    Rational cents = r * 100;
    BigInt n = numerator(cents), d = denominator(cents);
    bool neg = n < 0;
    if (neg) n = -n;
    // round half up (away from zero)
    BigInt rounded = (2 * n + d) / (2 * d);
    BigInt whole = rounded / 100, frac = rounded % 100;
    std::ostringstream os;
    if (neg && rounded != 0) os << '-';
    os << whole << '.';
    if (frac < 10) os << '0';
    os << frac;
    return os.str();
}

} // namespace bracketlab
