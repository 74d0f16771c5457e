#pragma once

#include "bracketlab/model.hpp"
#include "bracketlab/pnb.hpp"
#include "bracketlab/revpref.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bracketlab::errors {

using model::ExperimentDesign;
using model::Profile;

/// A binary pass/fail predicate with a stable report name and the flat
/// subdecision indices it reads (perturbation search and power enumeration
/// stay within the touched coordinates).
struct NamedTest {
    std::string name;
    std::vector<int> touched;
    std::function<bool(const Profile&)> pass;
};

/// Distance between two lines of one budget, in lines.
int line_distance(int line_i, int line_j);

/// Total line distance between two profiles (L1 across subdecisions).
int profile_distance(const Profile& a, const Profile& b);

struct MinErrors {
    bool within_cap = false;
    int errors = 0; // valid iff within_cap
};

/// Least total perturbation cost (in lines, over the test's touched
/// subdecisions) that makes the test pass; searched in increasing cost.
MinErrors min_errors_to_pass(const ExperimentDesign& design, const Profile& profile,
                             const NamedTest& test, int cap = 3);

struct TestSuiteOptions {
    revpref::BbWarpRule bbwarp_rule = revpref::BbWarpRule::exact;
    pnb::PnbOptions pnb;
    int alpha_denominator = 100;
    /// Symmetric (orbit-based) SARP with monotonicity for the token designs;
    /// plain SARP otherwise.
    bool symmetric_sarp = true;
};

/// The full named-test battery for a design. Token designs (risk/social) get
/// the nested-budget WARP pairs, aggregate tests, symmetry families, both
/// SARPs, and the PNB LP test (memoized per profile). Other designs get the
/// tests whose preconditions their budgets satisfy. The returned predicates
/// hold a reference to `design`, which must outlive them.
std::vector<NamedTest> standard_tests(const ExperimentDesign& design,
                                      const TestSuiteOptions& options = {});

/// Lookup by report name; throws on unknown name.
const NamedTest& find_test(const std::vector<NamedTest>& tests, const std::string& name);

} // namespace bracketlab::errors
