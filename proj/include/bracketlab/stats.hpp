#pragma once

#include <vector>

namespace bracketlab::stats {

/// Two-sided exact binomial sign test for `positives` vs `negatives`
/// (ties already dropped), null probability 1/2.
double sign_test_p(int positives, int negatives);

struct TTestResult {
    bool no_variance = false; // all differences equal; t undefined
    double t = 0.0;
    int df = 0;
    double p = 0.0; // two-sided
};

/// One-sample (paired-difference) t test against mean zero.
TTestResult paired_t(const std::vector<double>& differences);

/// Fisher's exact test on [[a, b], [c, d]], two-sided by summing the
/// probabilities of all tables no more probable than the observed one.
double fisher_exact_p(long a, long b, long c, long d);

} // namespace bracketlab::stats
