#pragma once

#include "bracketlab/rational.hpp"

#include <map>
#include <string>

namespace bracketlab {

/// Exact arithmetic on numbers of the form sum_m c_m * sqrt(m) with rational
/// coefficients and square-free integer radicands (m = 1 carries the rational
/// part). Equality is exact: square roots of distinct square-free integers
/// are linearly independent over the rationals, so two values are equal iff
/// their coefficient maps coincide. Ordering of distinct values is decided
/// with guarded high-precision evaluation.
class SqrtSum {
public:
    SqrtSum() = default;

    static SqrtSum of_rational(Rational r);
    /// sqrt of a nonnegative rational, exactly.
    static SqrtSum sqrt_of(const Rational& r);

    SqrtSum operator+(const SqrtSum& o) const;
    SqrtSum operator-(const SqrtSum& o) const;
    SqrtSum scaled(const Rational& c) const;

    bool operator==(const SqrtSum& o) const { return terms_ == o.terms_; }
    bool operator!=(const SqrtSum& o) const { return terms_ != o.terms_; }

    /// -1, 0, +1. Throws if the guarded evaluation cannot separate distinct
    /// values (not reachable for the magnitudes this project produces).
    int compare(const SqrtSum& o) const;
    bool operator<(const SqrtSum& o) const { return compare(o) < 0; }
    bool operator>(const SqrtSum& o) const { return compare(o) > 0; }
    bool operator<=(const SqrtSum& o) const { return compare(o) <= 0; }
    bool operator>=(const SqrtSum& o) const { return compare(o) >= 0; }

    double to_double() const;
    std::string to_string() const;

    bool is_zero() const { return terms_.empty(); }

private:
    std::map<BigInt, Rational> terms_;
    void add_term(const BigInt& radicand, const Rational& coeff);
};

} // namespace bracketlab
