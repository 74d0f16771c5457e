#include "bracketlab/sqrt_sum.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <sstream>
#include <stdexcept>

namespace bracketlab {

namespace {

using Float100 = boost::multiprecision::cpp_bin_float_100;

/// n = square * radicand with radicand square-free, by trial division.
void split_square(const BigInt& n, BigInt& square_root, BigInt& radicand) {
    square_root = 1;
    radicand = 1;
    BigInt rest = n;
    for (BigInt p = 2; p * p <= rest; ++p) {
        int count = 0;
        while (rest % p == 0) {
            rest /= p;
            ++count;
        }
        for (int i = 0; i + 1 < count; i += 2) square_root *= p;
        if (count % 2) radicand *= p;
    }
    radicand *= rest;
}

} // namespace

void SqrtSum::add_term(const BigInt& radicand, const Rational& coeff) {
    if (coeff == 0) return;
    auto it = terms_.find(radicand);
    if (it == terms_.end()) {
        terms_.emplace(radicand, coeff);
    } else {
        it->second += coeff;
        if (it->second == 0) terms_.erase(it);
    }
}

SqrtSum SqrtSum::of_rational(Rational r) {
    SqrtSum s;
    s.add_term(1, r);
    return s;
}

SqrtSum SqrtSum::sqrt_of(const Rational& r) {
    if (r < 0) throw std::invalid_argument("sqrt of negative rational");
    SqrtSum s;
    if (r == 0) return s;
    // sqrt(p/q) = sqrt(p*q) / q
    BigInt pq = numerator(r) * denominator(r);
    BigInt root, radicand;
    split_square(pq, root, radicand);
    s.add_term(radicand, Rational(root, denominator(r)));
    return s;
}

SqrtSum SqrtSum::operator+(const SqrtSum& o) const {
    SqrtSum s = *this;
    for (const auto& [m, c] : o.terms_) s.add_term(m, c);
    return s;
}

SqrtSum SqrtSum::operator-(const SqrtSum& o) const {
    SqrtSum s = *this;
    for (const auto& [m, c] : o.terms_) s.add_term(m, -c);
    return s;
}

SqrtSum SqrtSum::scaled(const Rational& c) const {
    SqrtSum s;
    if (c == 0) return s;
    for (const auto& [m, coeff] : terms_) s.terms_.emplace(m, coeff * c);
    return s;
}

int SqrtSum::compare(const SqrtSum& o) const {
    if (terms_ == o.terms_) return 0;
    SqrtSum diff = *this - o;
    Float100 total = 0;
    for (const auto& [m, c] : diff.terms_)
        total += Float100(c) * sqrt(Float100(m));
    // Distinct values built from the small integers in play differ by far
    // more than this; anything closer signals a usage outside that envelope.
    if (abs(total) < Float100("1e-60"))
        throw std::logic_error("sqrt_sum comparison could not be resolved");
    return total > 0 ? 1 : -1;
}

double SqrtSum::to_double() const {
    Float100 total = 0;
    for (const auto& [m, c] : terms_)
        total += Float100(c) * sqrt(Float100(m));
    return total.convert_to<double>();
}

std::string SqrtSum::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        os << rational_to_string(c);
        if (m != 1) os << "*sqrt(" << m << ")";
        first = false;
    }
    return os.str();
}

} // namespace bracketlab
