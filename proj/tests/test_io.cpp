#include "doctest.h"

#include "bracketlab/io.hpp"

#include <sstream>

using namespace bracketlab;
using namespace bracketlab::io;
using model::Domain;

namespace {

std::string csv_for(const model::ExperimentDesign& d, const std::string& experiment,
                    const std::vector<model::SubjectChoices>& subjects) {
    std::ostringstream out;
    write_choices_csv(out, d, experiment, subjects);
    return out.str();
}

} // namespace

TEST_CASE("choices csv round-trips exactly") {
    auto d = model::build_design(Domain::risk);
    std::vector<model::SubjectChoices> subjects = {
        {"s01", {0, 8, 7, 5, 0, 8, 0}},
        {"s02", {3, 14, 2, 10, 1, 0, 5}},
    };
    const std::string text = csv_for(d, "risk", subjects);

    std::istringstream in(text);
    auto rows = read_choices_csv(in, "mem");
    CHECK(rows.size() == 14);
    CHECK(rows[0].has_qty);

    auto back = assemble_subjects(d, "risk", rows);
    REQUIRE(back.size() == 2);
    CHECK(back[0].subject_id == "s01");
    CHECK(back[0].choices == subjects[0].choices);
    CHECK(back[1].choices == subjects[1].choices);

    // rows for other experiments are ignored
    CHECK(assemble_subjects(d, "social", rows).empty());
}

TEST_CASE("csv validation failures carry line numbers") {
    auto d = model::build_design(Domain::risk);
    const std::string header = "subject_id,experiment,decision,subdecision,line_index\n";

    SUBCASE("bad header") {
        std::istringstream in("id,experiment\n");
        CHECK_THROWS_AS(read_choices_csv(in, "mem"), ValidationError);
    }
    SUBCASE("bad field count") {
        std::istringstream in(header + "s1,risk,1,1\n");
        CHECK_THROWS_WITH_AS(read_choices_csv(in, "mem"),
                             doctest::Contains("line 2"), ValidationError);
    }
    SUBCASE("non-numeric line index") {
        std::istringstream in(header + "s1,risk,1,1,x\n");
        CHECK_THROWS_WITH_AS(read_choices_csv(in, "mem"),
                             doctest::Contains("line 2"), ValidationError);
    }
    SUBCASE("line index out of range") {
        std::istringstream in(header + "s1,risk,1,1,11\n");
        auto rows = read_choices_csv(in, "mem");
        CHECK_THROWS_WITH_AS(assemble_subjects(d, "risk", rows),
                             doctest::Contains("line 2"), ValidationError);
    }
    SUBCASE("decision out of range") {
        std::istringstream in(header + "s1,risk,6,1,0\n");
        auto rows = read_choices_csv(in, "mem");
        CHECK_THROWS_AS(assemble_subjects(d, "risk", rows), ValidationError);
    }
    SUBCASE("duplicate row") {
        std::istringstream in(header + "s1,risk,1,1,0\ns1,risk,1,1,1\n");
        auto rows = read_choices_csv(in, "mem");
        CHECK_THROWS_WITH_AS(assemble_subjects(d, "risk", rows),
                             doctest::Contains("duplicate"), ValidationError);
    }
    SUBCASE("incomplete subject") {
        std::istringstream in(header + "s1,risk,1,1,0\n");
        auto rows = read_choices_csv(in, "mem");
        CHECK_THROWS_WITH_AS(assemble_subjects(d, "risk", rows),
                             doctest::Contains("missing"), ValidationError);
    }
    SUBCASE("quantity cross-check") {
        // d1.1 line 0 is (0, 12): a wrong qty_a must be rejected
        std::istringstream in(
            "subject_id,experiment,decision,subdecision,line_index,qty_a,qty_b\n"
            "s1,risk,1,1,0,1,12\n");
        auto rows = read_choices_csv(in, "mem");
        CHECK_THROWS_WITH_AS(assemble_subjects(d, "risk", rows),
                             doctest::Contains("do not match"), ValidationError);
    }
    SUBCASE("matching quantities are accepted") {
        std::istringstream in(
            "subject_id,experiment,decision,subdecision,line_index,qty_a,qty_b\n"
            "s1,risk,1,1,5,5,6\n");
        auto rows = read_choices_csv(in, "mem");
        CHECK(rows[0].has_qty);
        CHECK(rows[0].qty_b == 6); // line 5 of d1.1 = (5, 1.2 * 5)
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_choices_file("/nonexistent/choices.csv"), IoError);
    }
}

TEST_CASE("design json round-trips for all built-in designs") {
    for (auto domain : {Domain::risk, Domain::social, Domain::shopping}) {
        auto d = model::build_design(domain);
        auto text = design_to_json(d);
        CHECK(text.find("bracketlab-design/1") != std::string::npos);
        auto back = design_from_json(text);
        CHECK(back.domain == d.domain);
        REQUIRE(back.decisions.size() == d.decisions.size());
        for (size_t t = 0; t < d.decisions.size(); ++t) {
            REQUIRE(back.decisions[t].subdecisions.size() ==
                    d.decisions[t].subdecisions.size());
            for (size_t k = 0; k < d.decisions[t].subdecisions.size(); ++k)
                CHECK(back.lines((int)t, (int)k) == d.lines((int)t, (int)k));
        }
        CHECK(design_hash(back) == design_hash(d));
    }
}

TEST_CASE("explicit-line budgets survive serialization") {
    model::ExperimentDesign d;
    d.domain = Domain::custom;
    model::Decision dec;
    dec.id = "d1";
    dec.subdecisions.push_back(model::DiscreteBudget::from_lines(
        {model::Bundle(Rational(1), Rational(2)), model::Bundle(Rational(3, 2), Rational(0))}));
    d.decisions.push_back(dec);
    auto back = design_from_json(design_to_json(d));
    CHECK(back.lines(0, 0) == d.lines(0, 0));
}

TEST_CASE("design loading and error taxonomy") {
    CHECK(load_design("risk").domain == Domain::risk);
    CHECK(load_design("shopping").domain == Domain::shopping);
    CHECK_THROWS_AS(load_design("nonsense"), ValidationError);
    CHECK_THROWS_AS(load_design("file:/nonexistent/design.json"), IoError);
    CHECK_THROWS_AS(design_from_json("{not json"), ValidationError);
    CHECK_THROWS_AS(design_from_json("{\"schema\":\"other/9\"}"), ValidationError);

    // distinct hashes for distinct designs, stable across calls
    auto risk = model::build_design(Domain::risk);
    auto shopping = model::build_design(Domain::shopping);
    CHECK(design_hash(risk) == design_hash(model::build_design(Domain::risk)));
    CHECK(design_hash(risk) != design_hash(shopping));
}
