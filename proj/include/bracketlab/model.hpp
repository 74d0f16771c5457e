#pragma once

#include "bracketlab/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bracketlab::model {

/// A bundle of goods in value units (dollars for Risk/Social, item counts
/// for Shopping). Coordinates are exact rationals.
struct Bundle {
    std::vector<Rational> q;

    Bundle() = default;
    explicit Bundle(std::vector<Rational> v) : q(std::move(v)) {}
    Bundle(Rational a, Rational b) : q{std::move(a), std::move(b)} {}

    size_t dim() const { return q.size(); }
    const Rational& operator[](size_t i) const { return q[i]; }

    bool operator==(const Bundle& o) const { return q == o.q; }
    bool operator!=(const Bundle& o) const { return q != o.q; }
    bool operator<(const Bundle& o) const { return q < o.q; } // lexicographic

    Bundle operator+(const Bundle& o) const;

    /// Coordinates reversed (the orbit mate under the two-good symmetry).
    Bundle mirrored() const;

    /// All coordinate permutations, deduplicated.
    std::vector<Bundle> orbit() const;

    /// Weak dominance: every coordinate >=, and the bundles differ.
    bool dominates(const Bundle& o) const;

    std::string to_string() const;
};

enum class BudgetKind { walrasian, piecewise, explicit_lines };
enum class GridRule { token, orange_indexed, explicit_order };

/// One decision-sheet budget: a finite ordered list of selectable lines.
///
/// Token budgets (Risk/Social) have an integer token income; line i puts i
/// tokens on the first asset/person. value_per_token converts tokens to the
/// dollar amounts that enter bundles. Orange-indexed budgets (Shopping) list
/// lines from the maximum affordable orange count down to zero, with the
/// maximum affordable apples at each.
struct DiscreteBudget {
    BudgetKind kind = BudgetKind::walrasian;
    GridRule grid_rule = GridRule::token;

    // walrasian / token
    long token_income = 0;
    std::vector<Rational> value_per_token; // per good

    // walrasian / orange_indexed (linear prices)
    std::vector<Rational> prices; // per good, in tokens (or dollars for Shopping)
    Rational income;

    // piecewise: the priced good has a cheap tier up to `threshold` units
    int piecewise_good = -1;
    long threshold = 0;
    Rational low_price, high_price;

    // explicit_lines
    std::vector<Bundle> explicit_bundles;

    // filled by the factories; equal to enumerate_lines(*this)
    std::vector<Bundle> cached_lines;

    static DiscreteBudget token_budget(long income_tokens, Rational value_a, Rational value_b);
    static DiscreteBudget shopping_budget(Rational price_apple, Rational price_orange, Rational income);
    static DiscreteBudget shopping_piecewise(Rational price_apple, long cheap_oranges,
                                             Rational orange_low, Rational orange_high,
                                             Rational income);
    static DiscreteBudget from_lines(std::vector<Bundle> lines);

    /// Price of good g in the budget's currency per value unit. For token
    /// budgets this is tokens per dollar (1 / value_per_token).
    Rational unit_price(size_t g) const;

    bool has_linear_prices() const { return kind == BudgetKind::walrasian; }
};

/// Canonical decision-sheet lines, in sheet order.
std::vector<Bundle> enumerate_lines(const DiscreteBudget& budget);

struct Decision {
    std::string id; // "d1".."d5"
    std::vector<DiscreteBudget> subdecisions;
};

enum class Domain { risk, social, shopping, custom };

std::string domain_name(Domain d);
Domain parse_domain(const std::string& s);

struct SubdecisionRef {
    int decision;    // index into decisions
    int subdecision; // index within the decision
    std::string label; // "d1.1"
};

struct ExperimentDesign {
    Domain domain = Domain::custom;
    std::vector<Decision> decisions;

    /// Flattened subdecisions in decision order.
    std::vector<SubdecisionRef> subdecisions() const;

    const DiscreteBudget& budget(int decision, int subdecision) const {
        return decisions.at(decision).subdecisions.at(subdecision);
    }
    const std::vector<Bundle>& lines(int decision, int subdecision) const;

    int subdecision_count() const;

    /// Finds the flat index of (decision, subdecision).
    int flat_index(int decision, int subdecision) const;
};

/// The three designs of the experiment, five decisions each.
ExperimentDesign build_design(Domain domain);

/// A full choice profile: one line index per subdecision, in flat order.
using Profile = std::vector<int>;

struct SubjectChoices {
    std::string subject_id;
    Profile choices;
};

/// Checks that every index is within its budget's line count.
void validate_profile(const ExperimentDesign& design, const Profile& profile);

/// Chosen bundle of a subdecision under a profile.
const Bundle& chosen_bundle(const ExperimentDesign& design, const Profile& profile,
                            int decision, int subdecision);

/// Coordinatewise sum of the chosen bundles in a decision, in value units.
Bundle aggregate_choice(const ExperimentDesign& design, const Profile& profile, int decision);

struct AggregateBudget {
    std::vector<Bundle> bundles;     // deduplicated Minkowski sum
    std::vector<bool> frontier;      // no other member weakly dominates it
};

/// Minkowski sum of a decision's subdecision line sets, with frontier tags.
/// Cached per (design, decision) inside the design is not done here; callers
/// that enumerate heavily should memoize.
AggregateBudget aggregate_budget(const ExperimentDesign& design, int decision);

} // namespace bracketlab::model
