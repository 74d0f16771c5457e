#include "bracketlab/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bracketlab::model {

Bundle Bundle::operator+(const Bundle& o) const {
    if (q.size() != o.q.size()) throw std::invalid_argument("bundle dimension mismatch");
    Bundle r;
    r.q.reserve(q.size());
    for (size_t i = 0; i < q.size(); ++i) r.q.push_back(q[i] + o.q[i]);
    return r;
}

Bundle Bundle::mirrored() const {
    Bundle r = *this;
    std::reverse(r.q.begin(), r.q.end());
    return r;
}

std::vector<Bundle> Bundle::orbit() const {
    std::vector<Rational> sorted = q;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Bundle> out;
    do {
        out.emplace_back(sorted);
    } while (std::next_permutation(sorted.begin(), sorted.end()));
    return out;
}

bool Bundle::dominates(const Bundle& o) const {
    if (q.size() != o.q.size()) throw std::invalid_argument("bundle dimension mismatch");
    if (q == o.q) return false;
    for (size_t i = 0; i < q.size(); ++i)
        if (q[i] < o.q[i]) return false;
    return true;
}

std::string Bundle::to_string() const {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < q.size(); ++i) {
        if (i) os << ',';
        os << rational_to_string(q[i]);
    }
    os << ')';
    return os.str();
}

DiscreteBudget DiscreteBudget::token_budget(long income_tokens, Rational value_a, Rational value_b) {
    DiscreteBudget b;
    b.kind = BudgetKind::walrasian;
    b.grid_rule = GridRule::token;
    b.token_income = income_tokens;
    b.value_per_token = {std::move(value_a), std::move(value_b)};
    if (income_tokens <= 0) throw std::invalid_argument("token income must be positive");
    if (b.value_per_token[0] <= 0 || b.value_per_token[1] <= 0)
        throw std::invalid_argument("token values must be positive");
    b.cached_lines = enumerate_lines(b);
    return b;
}

DiscreteBudget DiscreteBudget::shopping_budget(Rational price_apple, Rational price_orange,
                                               Rational income) {
    DiscreteBudget b;
    b.kind = BudgetKind::walrasian;
    b.grid_rule = GridRule::orange_indexed;
    b.prices = {std::move(price_apple), std::move(price_orange)};
    b.income = std::move(income);
    if (b.prices[0] <= 0 || b.prices[1] <= 0 || b.income <= 0)
        throw std::invalid_argument("prices and income must be positive");
    b.cached_lines = enumerate_lines(b);
    return b;
}

DiscreteBudget DiscreteBudget::shopping_piecewise(Rational price_apple, long cheap_oranges,
                                                  Rational orange_low, Rational orange_high,
                                                  Rational income) {
    DiscreteBudget b;
    b.kind = BudgetKind::piecewise;
    b.grid_rule = GridRule::orange_indexed;
    b.prices = {std::move(price_apple), Rational(0)};
    b.piecewise_good = 1;
    b.threshold = cheap_oranges;
    b.low_price = std::move(orange_low);
    b.high_price = std::move(orange_high);
    b.income = std::move(income);
    b.cached_lines = enumerate_lines(b);
    return b;
}

DiscreteBudget DiscreteBudget::from_lines(std::vector<Bundle> lines) {
    DiscreteBudget b;
    b.kind = BudgetKind::explicit_lines;
    b.grid_rule = GridRule::explicit_order;
    b.explicit_bundles = std::move(lines);
    if (b.explicit_bundles.empty()) throw std::invalid_argument("empty explicit budget");
    std::set<Bundle> seen(b.explicit_bundles.begin(), b.explicit_bundles.end());
    if (seen.size() != b.explicit_bundles.size())
        throw std::invalid_argument("explicit budget lines must be distinct");
    b.cached_lines = b.explicit_bundles;
    return b;
}

Rational DiscreteBudget::unit_price(size_t g) const {
    switch (grid_rule) {
        case GridRule::token:
            // g costs 1/value tokens per dollar
            return Rational(1) / value_per_token.at(g);
        case GridRule::orange_indexed:
            if (kind == BudgetKind::piecewise)
                throw std::invalid_argument("piecewise budget has no single price");
            return prices.at(g);
        default:
            throw std::invalid_argument("explicit budget has no prices");
    }
}

namespace {

Rational orange_cost(const DiscreteBudget& b, long o) {
    if (b.kind == BudgetKind::walrasian) return b.prices[1] * o;
    if (o <= b.threshold) return b.low_price * o;
    return b.low_price * b.threshold + b.high_price * (o - b.threshold);
}

} // namespace

std::vector<Bundle> enumerate_lines(const DiscreteBudget& budget) {
    std::vector<Bundle> out;
    switch (budget.grid_rule) {
        case GridRule::token: {
            for (long i = 0; i <= budget.token_income; ++i)
                out.emplace_back(budget.value_per_token[0] * i,
                                 budget.value_per_token[1] * (budget.token_income - i));
            break;
        }
        case GridRule::orange_indexed: {
            long o_max = 0;
            while (orange_cost(budget, o_max + 1) <= budget.income) ++o_max;
            for (long o = o_max; o >= 0; --o) {
                Rational ratio = (budget.income - orange_cost(budget, o)) / budget.prices[0];
                BigInt apples = numerator(ratio) / denominator(ratio); // floor, ratio >= 0
                out.emplace_back(Rational(apples), Rational(o));
            }
            break;
        }
        case GridRule::explicit_order:
            out = budget.explicit_bundles;
            break;
    }
    return out;
}

std::string domain_name(Domain d) {
    switch (d) {
        case Domain::risk: return "risk";
        case Domain::social: return "social";
        case Domain::shopping: return "shopping";
        case Domain::custom: return "custom";
    }
    return "custom";
}

Domain parse_domain(const std::string& s) {
    if (s == "risk") return Domain::risk;
    if (s == "social") return Domain::social;
    if (s == "shopping") return Domain::shopping;
    if (s == "custom") return Domain::custom;
    throw std::invalid_argument("unknown design domain: " + s);
}

std::vector<SubdecisionRef> ExperimentDesign::subdecisions() const {
    std::vector<SubdecisionRef> out;
    for (size_t t = 0; t < decisions.size(); ++t)
        for (size_t k = 0; k < decisions[t].subdecisions.size(); ++k) {
            SubdecisionRef r;
            r.decision = static_cast<int>(t);
            r.subdecision = static_cast<int>(k);
            r.label = decisions[t].id + "." + std::to_string(k + 1);
            out.push_back(std::move(r));
        }
    return out;
}

const std::vector<Bundle>& ExperimentDesign::lines(int decision, int subdecision) const {
    return budget(decision, subdecision).cached_lines;
}

int ExperimentDesign::subdecision_count() const {
    int n = 0;
    for (const auto& d : decisions) n += static_cast<int>(d.subdecisions.size());
    return n;
}

int ExperimentDesign::flat_index(int decision, int subdecision) const {
    int idx = 0;
    for (int t = 0; t < decision; ++t) idx += static_cast<int>(decisions[t].subdecisions.size());
    return idx + subdecision;
}

ExperimentDesign build_design(Domain domain) {
    ExperimentDesign d;
    d.domain = domain;
    const Rational one(1), premium(6, 5); // $1.20 stored exactly

    auto tok = [](long income, Rational va, Rational vb) {
        return DiscreteBudget::token_budget(income, std::move(va), std::move(vb));
    };

    switch (domain) {
        case Domain::risk:
        case Domain::social: {
            // Risk and Social budgets are identical up to domain translation.
            d.decisions = {
                {"d1", {tok(10, one, premium), tok(16, one, one)}},
                {"d2", {tok(14, Rational(2), Rational(2))}},
                {"d3", {tok(10, one, one), tok(10, one, premium)}},
                {"d4", {tok(16, one, one)}},
                {"d5", {tok(10, one, premium)}},
            };
            break;
        }
        case Domain::shopping: {
            auto shop = [](Rational pa, Rational po, Rational inc) {
                return DiscreteBudget::shopping_budget(std::move(pa), std::move(po), std::move(inc));
            };
            d.decisions = {
                {"d1", {shop(2, 1, 8), shop(2, 2, 24)}},
                {"d2", {DiscreteBudget::shopping_piecewise(2, 8, 1, 2, 32)}},
                {"d3", {shop(3, 3, 30), shop(3, 2, 24)}},
                {"d4", {shop(1, 1, 12)}},
                {"d5", {shop(6, 4, 48)}},
            };
            break;
        }
        case Domain::custom:
            throw std::invalid_argument("custom designs are built from a design file, not a tag");
    }
    return d;
}

void validate_profile(const ExperimentDesign& design, const Profile& profile) {
    auto subs = design.subdecisions();
    if (profile.size() != subs.size())
        throw std::invalid_argument("profile has " + std::to_string(profile.size()) +
                                    " choices, design has " + std::to_string(subs.size()) +
                                    " subdecisions");
    for (size_t i = 0; i < subs.size(); ++i) {
        const auto& lines = design.lines(subs[i].decision, subs[i].subdecision);
        if (profile[i] < 0 || profile[i] >= static_cast<int>(lines.size()))
            throw std::invalid_argument("line index " + std::to_string(profile[i]) +
                                        " out of range for " + subs[i].label);
    }
}

const Bundle& chosen_bundle(const ExperimentDesign& design, const Profile& profile,
                            int decision, int subdecision) {
    int flat = design.flat_index(decision, subdecision);
    return design.lines(decision, subdecision).at(profile.at(flat));
}

Bundle aggregate_choice(const ExperimentDesign& design, const Profile& profile, int decision) {
    const auto& dec = design.decisions.at(decision);
    if (dec.subdecisions.empty()) throw std::invalid_argument("decision has no subdecisions");
    Bundle sum = chosen_bundle(design, profile, decision, 0);
    for (size_t k = 1; k < dec.subdecisions.size(); ++k)
        sum = sum + chosen_bundle(design, profile, decision, static_cast<int>(k));
    return sum;
}

AggregateBudget aggregate_budget(const ExperimentDesign& design, int decision) {
    const auto& dec = design.decisions.at(decision);
    std::set<Bundle> sums;
    std::vector<Bundle> acc = {Bundle(std::vector<Rational>(
        design.lines(decision, 0)[0].dim(), Rational(0)))};
    for (size_t k = 0; k < dec.subdecisions.size(); ++k) {
        std::vector<Bundle> next;
        for (const auto& partial : acc)
            for (const auto& line : design.lines(decision, static_cast<int>(k)))
                next.push_back(partial + line);
        acc = std::move(next);
    }
    for (auto& b : acc) sums.insert(std::move(b));

    AggregateBudget out;
    out.bundles.assign(sums.begin(), sums.end());
    out.frontier.resize(out.bundles.size(), true);
    for (size_t i = 0; i < out.bundles.size(); ++i)
        for (size_t j = 0; j < out.bundles.size(); ++j)
            if (j != i && out.bundles[j].dominates(out.bundles[i])) {
                out.frontier[i] = false;
                break;
            }
    return out;
}

} // namespace bracketlab::model
