#include "bracketlab/power.hpp"

#include <cmath>
#include <thread>
#include <vector>

namespace bracketlab::power {

using model::Profile;

namespace {

std::vector<int> touched_line_counts(const ExperimentDesign& design, const NamedTest& test) {
    const auto refs = design.subdecisions();
    std::vector<int> counts;
    for (int flat : test.touched)
        counts.push_back(
            static_cast<int>(design.lines(refs[flat].decision, refs[flat].subdecision).size()));
    return counts;
}

/// The three whole-dataset tests share their pass sets with the bracketing
/// models; their probabilities come from the area pipeline so the two stay
/// exactly consistent (and the expensive pass sets are computed once).
bool full_dataset_model(const ExperimentDesign& design, const NamedTest& test,
                        classify::BracketingModel& out) {
    if (static_cast<int>(test.touched.size()) != design.subdecision_count()) return false;
    if (test.name == "nb_sarp") out = classify::BracketingModel::narrow;
    else if (test.name == "bb_sarp") out = classify::BracketingModel::broad;
    else if (test.name == "pnb") out = classify::BracketingModel::pnb;
    else return false;
    return true;
}

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

PowerResult exact_pass_probability(const ExperimentDesign& design, const NamedTest& test,
                                   int errors, const PowerOptions& options) {
    if (errors < 0) throw std::invalid_argument("negative error allowance");

    PowerResult r;
    r.test = test.name;
    r.errors = errors;
    r.method = PowerResult::Method::exact;

    classify::BracketingModel model;
    if (full_dataset_model(design, test, model)) {
        auto area = classify::predictive_area(design, model, errors, options.area);
        r.pass_count = area.counts.at(errors);
        r.total = classify::total_profiles(design);
    } else {
        const auto counts = touched_line_counts(design, test);
        long long product = 1;
        for (int c : counts) {
            product *= c;
            if (product > options.enumeration_budget)
                throw EnumerationBudgetExceeded("touched-profile product exceeds budget for " +
                                                test.name);
        }
        // pass set first, then a breadth-first L1 expansion over the touched
        // subspace: min_errors <= e iff the profile is within distance e of a
        // passing profile (perturbations stay on the touched coordinates)
        Profile profile(design.subdecision_count(), 0);
        std::vector<int> dist(static_cast<size_t>(product), -1);
        std::vector<long long> frontier;
        for (long long code = 0; code < product; ++code) {
            long long x = code;
            for (size_t i = 0; i < counts.size(); ++i) {
                profile[test.touched[i]] = static_cast<int>(x % counts[i]);
                x /= counts[i];
            }
            if (test.pass(profile)) {
                dist[code] = 0;
                frontier.push_back(code);
            }
        }
        long long pass = static_cast<long long>(frontier.size());
        for (int e = 1; e <= errors && !frontier.empty(); ++e) {
            std::vector<long long> next;
            for (long long code : frontier) {
                long long stride = 1;
                long long x = code;
                for (size_t i = 0; i < counts.size(); ++i) {
                    const int line = static_cast<int>(x % counts[i]);
                    for (int step : {-1, 1}) {
                        const int v = line + step;
                        if (v < 0 || v >= counts[i]) continue;
                        const long long neighbor = code + step * stride;
                        if (dist[neighbor] < 0) {
                            dist[neighbor] = e;
                            next.push_back(neighbor);
                        }
                    }
                    x /= counts[i];
                    stride *= counts[i];
                }
            }
            pass += static_cast<long long>(next.size());
            frontier = std::move(next);
        }
        r.pass_count = pass;
        r.total = product;
    }
    r.probability_exact = Rational(r.pass_count, r.total);
    r.probability = rational_to_double(r.probability_exact);
    return r;
}

PowerResult mc_pass_probability(const ExperimentDesign& design, const NamedTest& test,
                                int errors, long long samples, std::uint64_t seed,
                                int workers) {
    if (samples < 1) throw std::invalid_argument("monte carlo needs samples >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");

    const auto refs = design.subdecisions();
    std::vector<int> line_counts;
    for (const auto& ref : refs)
        line_counts.push_back(static_cast<int>(design.lines(ref.decision, ref.subdecision).size()));

    auto count_range = [&](long long lo, long long hi) {
        long long pass = 0;
        Profile profile(line_counts.size(), 0);
        for (long long i = lo; i < hi; ++i) {
            // counter-based substream: depends only on (seed, i)
            uint64_t state = seed ^ (0x2545F4914F6CDD1DULL * static_cast<uint64_t>(i + 1));
            for (size_t j = 0; j < line_counts.size(); ++j)
                profile[j] = static_cast<int>(splitmix64(state) %
                                              static_cast<uint64_t>(line_counts[j]));
            if (errors::min_errors_to_pass(design, profile, test, errors).within_cap) ++pass;
        }
        return pass;
    };

    long long pass = 0;
    if (workers == 1) {
        pass = count_range(0, samples);
    } else {
        std::vector<long long> partial(workers, 0);
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) {
            long long lo = samples * w / workers, hi = samples * (w + 1) / workers;
            threads.emplace_back([&, w, lo, hi] { partial[w] = count_range(lo, hi); });
        }
        for (auto& t : threads) t.join();
        for (long long p : partial) pass += p;
    }

    PowerResult r;
    r.test = test.name;
    r.errors = errors;
    r.method = PowerResult::Method::monte_carlo;
    r.samples = samples;
    r.seed = seed;
    r.pass_count = pass;
    r.total = samples;
    r.probability = static_cast<double>(pass) / static_cast<double>(samples);
    r.std_error = std::sqrt(r.probability * (1.0 - r.probability) /
                            static_cast<double>(samples));
    return r;
}

} // namespace bracketlab::power
