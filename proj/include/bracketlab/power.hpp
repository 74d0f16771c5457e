#pragma once

#include "bracketlab/classify.hpp"
#include "bracketlab/errors.hpp"
#include "bracketlab/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bracketlab::power {

using errors::NamedTest;
using model::ExperimentDesign;

/// Pass probability of one test under uniform random line choices.
struct PowerResult {
    std::string test;
    int errors = 0;

    enum class Method { exact, monte_carlo };
    Method method = Method::exact;

    // exact: probability = pass_count / total, both over the touched
    // subdecisions' line-count product
    long long pass_count = 0;
    long long total = 0;
    Rational probability_exact;

    // monte carlo
    long long samples = 0;
    std::uint64_t seed = 0;

    double probability = 0.0; // both methods
    double std_error = 0.0;   // binomial, monte carlo only
};

struct PowerOptions {
    /// Largest touched-profile product enumerated exactly.
    long long enumeration_budget = 100'000'000;
    /// Reused by the full-dataset tests (nb_sarp, bb_sarp, pnb), whose exact
    /// probabilities are predictive-area counts divided by the profile total.
    classify::AreaOptions area;
};

struct EnumerationBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Enumerates every profile of the subdecisions the test touches and counts
/// those whose min_errors is within the allowance. The full-dataset tests
/// delegate to the predictive-area pipeline so that
///   probability * total_profiles == area(model, errors)
/// holds exactly. Throws EnumerationBudgetExceeded past the budget.
PowerResult exact_pass_probability(const ExperimentDesign& design, const NamedTest& test,
                                   int errors, const PowerOptions& options = {});

/// Uniform i.i.d. line draws per subdecision from counter-based substreams:
/// sample i's profile depends only on (seed, i), so the merged counts are
/// independent of the worker count.
PowerResult mc_pass_probability(const ExperimentDesign& design, const NamedTest& test,
                                int errors, long long samples, std::uint64_t seed,
                                int workers = 1);

} // namespace bracketlab::power
