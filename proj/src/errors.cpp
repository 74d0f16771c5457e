#include "bracketlab/errors.hpp"

#include <cstdlib>
#include <map>
#include <memory>
#include <stdexcept>

namespace bracketlab::errors {

int line_distance(int line_i, int line_j) { return std::abs(line_i - line_j); }

int profile_distance(const Profile& a, const Profile& b) {
    if (a.size() != b.size()) throw std::invalid_argument("profile size mismatch");
    int d = 0;
    for (size_t i = 0; i < a.size(); ++i) d += line_distance(a[i], b[i]);
    return d;
}

namespace {

/// Tries every perturbation of the touched coordinates with total cost
/// exactly `remaining`, in a fixed deterministic order.
bool passes_at_cost(Profile& profile, const std::vector<int>& touched,
                    const std::vector<int>& line_counts, size_t idx, int remaining,
                    const NamedTest& test) {
    if (idx == touched.size()) return remaining == 0 && test.pass(profile);
    const int coord = touched[idx];
    const int orig = profile[coord];
    for (int d = -remaining; d <= remaining; ++d) {
        const int v = orig + d;
        if (v < 0 || v >= line_counts[coord]) continue;
        profile[coord] = v;
        if (passes_at_cost(profile, touched, line_counts, idx + 1,
                           remaining - std::abs(d), test)) {
            profile[coord] = orig;
            return true;
        }
    }
    profile[coord] = orig;
    return false;
}

} // namespace

MinErrors min_errors_to_pass(const ExperimentDesign& design, const Profile& profile,
                             const NamedTest& test, int cap) {
    model::validate_profile(design, profile);
    std::vector<int> line_counts;
    for (const auto& ref : design.subdecisions())
        line_counts.push_back(static_cast<int>(design.lines(ref.decision, ref.subdecision).size()));
    Profile work = profile;
    for (int cost = 0; cost <= cap; ++cost)
        if (passes_at_cost(work, test.touched, line_counts, 0, cost, test))
            return {true, cost};
    return {false, 0};
}

namespace {

using revpref::Observation;

Observation subdecision_observation(const ExperimentDesign& design, const Profile& profile,
                                    int decision, int subdecision) {
    Observation obs;
    obs.chosen = model::chosen_bundle(design, profile, decision, subdecision);
    obs.feasible = design.lines(decision, subdecision);
    return obs;
}

/// The token designs share one layout: d1 = {premium, even}, d2 = {even},
/// d3 = {even, premium}, d4 = {even}, d5 = {premium}.
bool token_layout(const ExperimentDesign& design) {
    if (design.decisions.size() != 5) return false;
    const size_t expected[5] = {2, 1, 2, 1, 1};
    for (size_t t = 0; t < 5; ++t)
        if (design.decisions[t].subdecisions.size() != expected[t]) return false;
    for (const auto& dec : design.decisions)
        for (const auto& sub : dec.subdecisions)
            if (sub.grid_rule != model::GridRule::token) return false;
    return true;
}

} // namespace

std::vector<NamedTest> standard_tests(const ExperimentDesign& design,
                                      const TestSuiteOptions& options) {
    const bool token = token_layout(design);
    const bool sym = options.symmetric_sarp && token;

    std::vector<NamedTest> tests;

    if (token) {
        auto nb_pair = [&](std::string name, int t1, int k1, int t2, int k2) {
            NamedTest t;
            t.name = std::move(name);
            t.touched = {design.flat_index(t1, k1), design.flat_index(t2, k2)};
            t.pass = [&design, t1, k1, t2, k2](const Profile& p) {
                return revpref::nb_warp(subdecision_observation(design, p, t1, k1),
                                        subdecision_observation(design, p, t2, k2))
                    .passed;
            };
            return t;
        };
        tests.push_back(nb_pair("nb_warp.d11_d5", 0, 0, 4, 0));
        tests.push_back(nb_pair("nb_warp.d12_d4", 0, 1, 3, 0));
        tests.push_back(nb_pair("nb_warp.d32_d5", 2, 1, 4, 0));
        tests.push_back(nb_pair("nb_warp.d11_d32", 0, 0, 2, 1));
        {
            NamedTest t;
            t.name = "nb_warp.all";
            t.touched = {design.flat_index(0, 0), design.flat_index(0, 1),
                         design.flat_index(2, 1), design.flat_index(3, 0),
                         design.flat_index(4, 0)};
            t.pass = [&design](const Profile& p) {
                const int premium[3][2] = {{0, 0}, {2, 1}, {4, 0}};
                for (int i = 0; i < 3; ++i)
                    for (int j = i + 1; j < 3; ++j)
                        if (!revpref::nb_warp(
                                 subdecision_observation(design, p, premium[i][0], premium[i][1]),
                                 subdecision_observation(design, p, premium[j][0], premium[j][1]))
                                 .passed)
                            return false;
                return revpref::nb_warp(subdecision_observation(design, p, 0, 1),
                                        subdecision_observation(design, p, 3, 0))
                    .passed;
            };
            tests.push_back(std::move(t));
        }
        {
            NamedTest t;
            t.name = "bb_warp.d1_d2";
            t.touched = {design.flat_index(0, 0), design.flat_index(0, 1),
                         design.flat_index(1, 0)};
            auto rule = options.bbwarp_rule;
            t.pass = [&design, rule](const Profile& p) {
                return revpref::bb_warp(design, p, 0, 1, rule).passed;
            };
            tests.push_back(std::move(t));
        }
        auto mon = [&](std::string name, std::vector<int> decisions) {
            NamedTest t;
            t.name = std::move(name);
            for (int d : decisions)
                for (size_t k = 0; k < design.decisions[d].subdecisions.size(); ++k)
                    t.touched.push_back(design.flat_index(d, static_cast<int>(k)));
            t.pass = [&design, decisions](const Profile& p) {
                for (int d : decisions)
                    if (!revpref::bb_mon(design, p, d).passed) return false;
                return true;
            };
            return t;
        };
        tests.push_back(mon("bb_mon.d1", {0}));
        tests.push_back(mon("bb_mon.d3", {2}));
        tests.push_back(mon("bb_mon.both", {0, 2}));

        // Symmetry families, one named test per sym_tests entry.
        auto sample = revpref::sym_tests(design, Profile(design.subdecision_count(), 0));
        for (const auto& [key, _] : sample) {
            NamedTest t;
            t.name = key;
            auto dot = key.find('.');
            std::string scope = key.substr(dot + 1);
            if (scope == "both") {
                for (size_t d = 0; d < design.decisions.size(); ++d)
                    if (design.decisions[d].subdecisions.size() == 2)
                        for (size_t k = 0; k < 2; ++k)
                            t.touched.push_back(design.flat_index((int)d, (int)k));
            } else {
                int d = std::stoi(scope.substr(1)) - 1;
                for (size_t k = 0; k < design.decisions[d].subdecisions.size(); ++k)
                    t.touched.push_back(design.flat_index(d, (int)k));
            }
            std::string name = key;
            t.pass = [&design, name](const Profile& p) {
                return revpref::sym_tests(design, p).at(name).passed;
            };
            tests.push_back(std::move(t));
        }
    }

    std::vector<int> all;
    for (int i = 0; i < design.subdecision_count(); ++i) all.push_back(i);

    {
        NamedTest t;
        t.name = "nb_sarp";
        t.touched = all;
        t.pass = [&design, sym](const Profile& p) {
            return revpref::sarp(revpref::build_nb_dataset(design, p), sym, sym).passed;
        };
        tests.push_back(std::move(t));
    }
    {
        NamedTest t;
        t.name = "bb_sarp";
        t.touched = all;
        t.pass = [&design, sym](const Profile& p) {
            return revpref::sarp(revpref::build_bb_dataset(design, p), sym, sym).passed;
        };
        tests.push_back(std::move(t));
    }
    {
        NamedTest t;
        t.name = "pnb";
        t.touched = all;
        auto opts = options.pnb;
        opts.symmetry = opts.symmetry && token;
        int denom = options.alpha_denominator;
        auto memo = std::make_shared<std::map<Profile, bool>>();
        t.pass = [&design, opts, denom, memo](const Profile& p) {
            auto it = memo->find(p);
            if (it != memo->end()) return it->second;
            bool ok = pnb::pnb_test(design, p, denom, opts).passed;
            memo->emplace(p, ok);
            return ok;
        };
        tests.push_back(std::move(t));
    }

    return tests;
}

const NamedTest& find_test(const std::vector<NamedTest>& tests, const std::string& name) {
    for (const auto& t : tests)
        if (t.name == name) return t;
    throw std::out_of_range("unknown test name: " + name);
}

} // namespace bracketlab::errors
