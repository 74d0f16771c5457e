#include "doctest.h"

#include "bracketlab/errors.hpp"
#include "bracketlab/simulate.hpp"

using namespace bracketlab;
using namespace bracketlab::simulate;
using model::Domain;
using model::Profile;

TEST_CASE("induced-payoff agents reproduce the point predictions") {
    auto d = model::build_design(Domain::shopping);

    AgentSpec narrow;
    narrow.utility = UtilityModel::induced_sqrt();
    narrow.bracketing = BracketingModel::narrow;
    auto sn = simulate_subject(narrow, d);
    CHECK(sn.choices.choices == induced::predicted_profile(d, BracketingModel::narrow));

    // apples bought in the d1/d3 subdecisions: 1, 6, 5, 4 narrow
    std::vector<int> flats = {d.flat_index(0, 0), d.flat_index(0, 1), d.flat_index(2, 0),
                              d.flat_index(2, 1)};
    std::vector<Rational> apples_narrow = {1, 6, 5, 4}, apples_broad = {0, 10, 10, 0};
    const auto refs = d.subdecisions();
    for (size_t i = 0; i < flats.size(); ++i) {
        const auto& b = d.lines(refs[flats[i]].decision, refs[flats[i]].subdecision)
                            [sn.choices.choices[flats[i]]];
        CHECK(b[0] == apples_narrow[i]);
    }

    AgentSpec broad = narrow;
    broad.bracketing = BracketingModel::broad;
    auto sb = simulate_subject(broad, d);
    CHECK(sb.choices.choices == induced::predicted_profile(d, BracketingModel::broad));
    for (size_t i = 0; i < flats.size(); ++i) {
        const auto& b = d.lines(refs[flats[i]].decision, refs[flats[i]].subdecision)
                            [sb.choices.choices[flats[i]]];
        CHECK(b[0] == apples_broad[i]);
    }
}

TEST_CASE("pnb endpoints coincide with narrow and broad") {
    for (auto domain : {Domain::risk, Domain::shopping}) {
        auto d = model::build_design(domain);
        for (auto utility :
             {UtilityModel::induced_sqrt(), UtilityModel::ces(Rational(1, 2))}) {
            if (domain != Domain::shopping && utility.kind == UtilityModel::Kind::induced_sqrt)
                continue;
            AgentSpec a;
            a.utility = utility;

            a.bracketing = BracketingModel::narrow;
            auto narrow = simulate_subject(a, d);
            a.bracketing = BracketingModel::pnb;
            a.alpha = Rational(1);
            CHECK(simulate_subject(a, d).choices.choices == narrow.choices.choices);

            a.bracketing = BracketingModel::broad;
            auto broad = simulate_subject(a, d);
            a.bracketing = BracketingModel::pnb;
            a.alpha = Rational(0);
            CHECK(simulate_subject(a, d).choices.choices == broad.choices.choices);
        }
    }
}

TEST_CASE("linear equal weights: identical across bracketing, passes both warp families") {
    auto d = model::build_design(Domain::risk);
    AgentSpec a;
    a.utility = UtilityModel::linear({Rational(1), Rational(1)});

    a.bracketing = BracketingModel::narrow;
    auto narrow = simulate_subject(a, d);
    a.bracketing = BracketingModel::broad;
    auto broad = simulate_subject(a, d);
    a.bracketing = BracketingModel::pnb;
    a.alpha = Rational(1, 3);
    auto pnb = simulate_subject(a, d);
    CHECK(narrow.choices.choices == broad.choices.choices);
    CHECK(narrow.choices.choices == pnb.choices.choices);

    auto tests = errors::standard_tests(d);
    for (const auto& test : tests) {
        if (test.name.rfind("nb_warp", 0) != 0 && test.name.rfind("bb_warp", 0) != 0)
            continue;
        CAPTURE(test.name);
        CHECK(test.pass(narrow.choices.choices));
    }
}

TEST_CASE("zero-tremble ces agents satisfy their own axiom") {
    auto d = model::build_design(Domain::risk);
    auto tests = errors::standard_tests(d);
    const auto& nb_sarp = errors::find_test(tests, "nb_sarp");
    const auto& bb_sarp = errors::find_test(tests, "bb_sarp");
    for (auto r : {Rational(3, 10), Rational(1, 2), Rational(4, 5)}) {
        CAPTURE(rational_to_string(r));
        AgentSpec a;
        a.utility = UtilityModel::ces(r);
        a.bracketing = BracketingModel::narrow;
        CHECK(nb_sarp.pass(simulate_subject(a, d).choices.choices));
        a.bracketing = BracketingModel::broad;
        CHECK(bb_sarp.pass(simulate_subject(a, d).choices.choices));
    }
}

TEST_CASE("trembles are seeded, one line wide, and reflect at the edges") {
    auto d = model::build_design(Domain::risk);
    AgentSpec a;
    a.utility = UtilityModel::ces(Rational(1, 2));
    a.bracketing = BracketingModel::narrow;

    auto ideal = simulate_subject(a, d);
    CHECK(ideal.choices.choices == ideal.ideal);

    a.tremble = 0.9;
    a.seed = 5;
    auto noisy = simulate_subject(a, d);
    CHECK(noisy.ideal == ideal.ideal);
    bool moved = false;
    const auto refs = d.subdecisions();
    for (size_t j = 0; j < noisy.choices.choices.size(); ++j) {
        const int delta = std::abs(noisy.choices.choices[j] - noisy.ideal[j]);
        CHECK(delta <= 1);
        moved |= delta == 1;
        const int count = (int)d.lines(refs[j].decision, refs[j].subdecision).size();
        CHECK(noisy.choices.choices[j] >= 0);
        CHECK(noisy.choices.choices[j] < count);
    }
    CHECK(moved);

    auto same = simulate_subject(a, d);
    CHECK(same.choices.choices == noisy.choices.choices);
    a.seed = 6;
    auto different = simulate_subject(a, d);
    CHECK(different.choices.choices != noisy.choices.choices);

    CHECK_THROWS(simulate_subject([] {
        AgentSpec bad;
        bad.tremble = 1.5;
        return bad;
    }(), d));
}

TEST_CASE("recovery experiment classifies noiseless agents correctly") {
    auto d = model::build_design(Domain::risk);
    std::map<BracketingModel, classify::AreaResult> areas;
    for (auto m : {BracketingModel::narrow, BracketingModel::broad})
        areas[m] = classify::predictive_area(d, m, 3);

    std::vector<PopulationMember> population;
    for (auto r : {Rational(3, 10), Rational(1, 2), Rational(4, 5)}) {
        AgentSpec narrow;
        narrow.utility = UtilityModel::ces(r);
        narrow.bracketing = BracketingModel::narrow;
        population.push_back({narrow, 5});
        AgentSpec broad = narrow;
        broad.bracketing = BracketingModel::broad;
        population.push_back({broad, 5});
    }
    auto result = recovery_experiment(population, d, 99, areas);
    CHECK(result.confusion.at("narrow").at("narrow") == 15);
    CHECK(result.confusion.at("broad").at("broad") == 15);
    CHECK(result.subjects.size() == 30);
}

TEST_CASE("shopping pnb agents land in the right alpha range") {
    auto d = model::build_design(Domain::shopping);
    auto ranges = induced::alpha_ranges(d, 100);
    for (auto alpha : {Rational(1, 2), Rational(1, 4), Rational(9, 10)}) {
        CAPTURE(rational_to_string(alpha));
        AgentSpec a;
        a.utility = UtilityModel::induced_sqrt();
        a.bracketing = BracketingModel::pnb;
        a.alpha = alpha;
        auto sim = simulate_subject(a, d);
        auto est = induced::estimate_alpha(d, sim.choices.choices, ranges);
        CHECK(est.errors == 0);
        CHECK(est.range.lower <= alpha);
        CHECK(est.range.upper >= alpha);
    }
}
