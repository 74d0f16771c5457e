#include "bracketlab/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bracketlab::stats {

namespace {

double log_choose(long n, long k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace

double sign_test_p(int positives, int negatives) {
    if (positives < 0 || negatives < 0) throw std::invalid_argument("negative counts");
    const long n = positives + negatives;
    if (n == 0) throw std::invalid_argument("sign test needs nonzero observations");
    const long k = std::max(positives, negatives);
    // two-sided: twice the upper tail of Binomial(n, 1/2), capped at 1
    double tail = 0;
    for (long i = k; i <= n; ++i)
        tail += std::exp(log_choose(n, i) - n * std::log(2.0));
    return std::min(1.0, 2.0 * tail);
}

TTestResult paired_t(const std::vector<double>& differences) {
    if (differences.empty()) throw std::invalid_argument("empty sample");
    const size_t n = differences.size();
    double mean = 0;
    for (double d : differences) mean += d;
    mean /= (double)n;
    double ss = 0;
    for (double d : differences) ss += (d - mean) * (d - mean);

    TTestResult r;
    r.df = (int)n - 1;
    if (n < 2 || ss == 0) {
        r.no_variance = true;
        return r;
    }
    const double sd = std::sqrt(ss / (n - 1));
    r.t = mean / (sd / std::sqrt((double)n));
    boost::math::students_t dist(r.df);
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    return r;
}

double fisher_exact_p(long a, long b, long c, long d) {
    if (a < 0 || b < 0 || c < 0 || d < 0) throw std::invalid_argument("negative counts");
    const long r1 = a + b, r2 = c + d, c1 = a + c, n = a + b + c + d;
    if (n == 0) throw std::invalid_argument("empty table");

    auto log_table = [&](long x) {
        // P(upper-left cell = x) under the hypergeometric null
        return log_choose(r1, x) + log_choose(r2, c1 - x) - log_choose(n, c1);
    };
    const long lo = std::max(0L, c1 - r2), hi = std::min(r1, c1);
    const double observed = log_table(a);
    double p = 0;
    for (long x = lo; x <= hi; ++x) {
        double lt = log_table(x);
        if (lt <= observed + 1e-9) p += std::exp(lt);
    }
    return std::min(1.0, p);
}

} // namespace bracketlab::stats
