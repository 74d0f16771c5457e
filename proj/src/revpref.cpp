#include "bracketlab/revpref.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bracketlab::revpref {

namespace {

Bundle canonical(const Bundle& b, bool symmetry) {
    if (!symmetry) return b;
    auto orbit = b.orbit();
    return *std::min_element(orbit.begin(), orbit.end());
}

/// Does some representative of orbit u strictly dominate some representative
/// of orbit v? With symmetry off orbits are singletons.
bool orbit_dominates(const Bundle& u, const Bundle& v, bool symmetry) {
    if (!symmetry) return u.dominates(v);
    for (const auto& ru : u.orbit())
        for (const auto& rv : v.orbit())
            if (ru.dominates(rv)) return true;
    return false;
}

struct CycleFinder {
    const std::vector<std::vector<int>>& adj;
    std::vector<int> color; // 0 white, 1 gray, 2 black
    std::vector<int> parent;
    int cycle_start = -1, cycle_end = -1;

    explicit CycleFinder(const std::vector<std::vector<int>>& a)
        : adj(a), color(a.size(), 0), parent(a.size(), -1) {}

    bool dfs(int root) {
        // iterative DFS; frame = (node, next edge index)
        std::vector<std::pair<int, size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [v, i] = stack.back();
            if (i < adj[v].size()) {
                int w = adj[v][i++];
                if (color[w] == 0) {
                    color[w] = 1;
                    parent[w] = v;
                    stack.emplace_back(w, 0);
                } else if (color[w] == 1) {
                    cycle_start = w;
                    cycle_end = v;
                    return true;
                }
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
        return false;
    }

    std::vector<int> cycle() const {
        std::vector<int> path{cycle_start};
        for (int v = cycle_end; v != cycle_start; v = parent[v]) path.push_back(v);
        std::reverse(path.begin() + 1, path.end());
        path.push_back(cycle_start);
        return path;
    }
};

} // namespace

std::vector<Observation> build_nb_dataset(const ExperimentDesign& design, const Profile& profile) {
    model::validate_profile(design, profile);
    std::vector<Observation> out;
    for (const auto& s : design.subdecisions()) {
        Observation obs;
        obs.feasible = design.lines(s.decision, s.subdecision);
        obs.chosen = obs.feasible.at(profile[design.flat_index(s.decision, s.subdecision)]);
        out.push_back(std::move(obs));
    }
    return out;
}

std::vector<Observation> build_bb_dataset(const ExperimentDesign& design, const Profile& profile) {
    model::validate_profile(design, profile);
    std::vector<Observation> out;
    for (size_t t = 0; t < design.decisions.size(); ++t) {
        Observation obs;
        obs.feasible = model::aggregate_budget(design, static_cast<int>(t)).bundles;
        obs.chosen = model::aggregate_choice(design, profile, static_cast<int>(t));
        out.push_back(std::move(obs));
    }
    return out;
}

TestOutcome sarp(const std::vector<Observation>& observations,
                 bool symmetry, bool monotonicity) {
    std::vector<Bundle> nodes;
    std::map<Bundle, int> index;
    auto node_of = [&](const Bundle& b) {
        Bundle c = canonical(b, symmetry);
        auto [it, inserted] = index.try_emplace(c, static_cast<int>(nodes.size()));
        if (inserted) nodes.push_back(c);
        return it->second;
    };

    std::set<std::pair<int, int>> edges;
    for (const auto& obs : observations) {
        int c = node_of(obs.chosen);
        for (const auto& y : obs.feasible) {
            if (y == obs.chosen) continue;
            int n = node_of(y);
            if (n == c)
                return TestOutcome::fail("choice " + obs.chosen.to_string() +
                                         " strictly revealed preferred to its own class via " +
                                         y.to_string());
            edges.emplace(c, n);
        }
    }

    if (monotonicity) {
        size_t n = nodes.size();
        for (size_t u = 0; u < n; ++u)
            for (size_t v = 0; v < n; ++v)
                if (u != v && orbit_dominates(nodes[u], nodes[v], symmetry))
                    edges.emplace(static_cast<int>(u), static_cast<int>(v));
    }

    std::vector<std::vector<int>> adj(nodes.size());
    for (const auto& [a, b] : edges) adj[a].push_back(b);

    CycleFinder finder(adj);
    for (size_t v = 0; v < nodes.size(); ++v) {
        if (finder.color[v] == 0 && finder.dfs(static_cast<int>(v))) {
            std::ostringstream os;
            bool first = true;
            for (int id : finder.cycle()) {
                if (!first) os << " -> ";
                os << nodes[id].to_string();
                first = false;
            }
            return TestOutcome::fail("preference cycle: " + os.str());
        }
    }
    return TestOutcome::pass();
}

TestOutcome nb_warp(const Observation& a, const Observation& b) {
    std::set<Bundle> fa(a.feasible.begin(), a.feasible.end());
    std::set<Bundle> fb(b.feasible.begin(), b.feasible.end());
    bool a_in_b = std::includes(fb.begin(), fb.end(), fa.begin(), fa.end());
    bool b_in_a = std::includes(fa.begin(), fa.end(), fb.begin(), fb.end());
    if (!a_in_b && !b_in_a)
        throw std::invalid_argument("nb_warp requires nested feasible sets");

    const Observation& inner = a_in_b ? a : b;
    const Observation& outer = a_in_b ? b : a;
    const std::set<Bundle>& inner_set = a_in_b ? fa : fb;
    if (!inner_set.count(outer.chosen)) return TestOutcome::pass();
    if (inner.chosen == outer.chosen) return TestOutcome::pass();
    return TestOutcome::fail("nested budgets chose " + inner.chosen.to_string() + " vs " +
                             outer.chosen.to_string());
}

TestOutcome bb_warp(const ExperimentDesign& design, const Profile& profile,
                    int inner_decision, int covering_decision, BbWarpRule rule) {
    model::validate_profile(design, profile);
    if (design.decisions.at(covering_decision).subdecisions.size() != 1)
        throw std::invalid_argument("bb_warp covering decision must have one subdecision");

    Bundle x_inner = model::aggregate_choice(design, profile, inner_decision);
    Bundle x_cov = model::aggregate_choice(design, profile, covering_decision);

    auto agg = model::aggregate_budget(design, inner_decision);
    bool covered = false;
    for (const auto& b : agg.bundles)
        if (b == x_cov || b.dominates(x_cov)) { covered = true; break; }
    if (!covered) return TestOutcome::pass();

    bool equal = rule == BbWarpRule::exact ? x_inner == x_cov
                                           : x_inner[0] == x_cov[0];
    if (equal) return TestOutcome::pass();
    return TestOutcome::fail("aggregate " + x_inner.to_string() +
                             " differs from covering choice " + x_cov.to_string());
}

TestOutcome bb_mon(const ExperimentDesign& design, const Profile& profile, int decision) {
    model::validate_profile(design, profile);
    const auto& dec = design.decisions.at(decision);
    if (dec.subdecisions.size() < 2)
        throw std::invalid_argument("bb_mon requires at least two subdecisions");

    std::vector<Rational> ratios;
    for (const auto& b : dec.subdecisions) {
        if (!b.has_linear_prices())
            throw std::invalid_argument("bb_mon requires linear prices");
        ratios.push_back(b.unit_price(0) / b.unit_price(1));
    }
    bool all_equal = std::all_of(ratios.begin(), ratios.end(),
                                 [&](const Rational& r) { return r == ratios[0]; });
    if (all_equal) return TestOutcome::pass(); // no frontier restriction

    Bundle x = model::aggregate_choice(design, profile, decision);
    auto agg = model::aggregate_budget(design, decision);
    for (size_t i = 0; i < agg.bundles.size(); ++i)
        if (agg.bundles[i] == x)
            return agg.frontier[i]
                       ? TestOutcome::pass()
                       : TestOutcome::fail("aggregate " + x.to_string() +
                                           " is dominated within the aggregate budget");
    throw std::logic_error("aggregate choice not found in aggregate budget");
}

namespace {

/// Maximum quantity of `good` affordable in a linear-price budget.
Rational capacity(const model::DiscreteBudget& b, size_t good) {
    if (b.grid_rule == model::GridRule::token)
        return b.value_per_token.at(good) * b.token_income;
    return b.income / b.prices.at(good);
}

bool equal_prices(const model::DiscreteBudget& b) {
    return b.has_linear_prices() && b.unit_price(0) == b.unit_price(1);
}

/// Per-budget symmetry restriction: the weakly cheaper good gets weakly more.
TestOutcome cheap_good_favoured(const Bundle& x, const model::DiscreteBudget& b) {
    if (!b.has_linear_prices()) return TestOutcome::pass();
    Rational p0 = b.unit_price(0), p1 = b.unit_price(1);
    if (p0 >= p1 && x[1] < x[0])
        return TestOutcome::fail("chose " + x.to_string() + " with good 1 weakly cheaper");
    if (p1 >= p0 && x[0] < x[1])
        return TestOutcome::fail("chose " + x.to_string() + " with good 0 weakly cheaper");
    return TestOutcome::pass();
}

TestOutcome conjoin(std::initializer_list<TestOutcome> outcomes) {
    for (const auto& o : outcomes)
        if (!o.passed) return o;
    return TestOutcome::pass();
}

} // namespace

std::map<std::string, TestOutcome> sym_tests(const ExperimentDesign& design,
                                             const Profile& profile) {
    model::validate_profile(design, profile);
    std::map<std::string, TestOutcome> out;
    TestOutcome nb_both = TestOutcome::pass(), bb_both = TestOutcome::pass(),
                pnb_both = TestOutcome::pass();

    for (size_t t = 0; t < design.decisions.size(); ++t) {
        const auto& dec = design.decisions[t];
        int ti = static_cast<int>(t);

        TestOutcome nb = TestOutcome::pass();
        for (size_t k = 0; k < dec.subdecisions.size(); ++k) {
            auto r = cheap_good_favoured(model::chosen_bundle(design, profile, ti, (int)k),
                                         dec.subdecisions[k]);
            nb = conjoin({nb, r});
        }

        TestOutcome bb = TestOutcome::pass(), pnb = TestOutcome::pass();
        if (dec.subdecisions.size() == 1) {
            bb = nb;
            pnb = nb;
        } else {
            // The aggregate-level hypotheses bind when one subdecision has
            // equal prices and another does not.
            int e = -1, u = -1;
            for (size_t k = 0; k < dec.subdecisions.size(); ++k) {
                if (!dec.subdecisions[k].has_linear_prices()) continue;
                if (equal_prices(dec.subdecisions[k])) e = static_cast<int>(k);
                else u = static_cast<int>(k);
            }
            if (e >= 0 && u >= 0) {
                const auto& bu = dec.subdecisions[u];
                size_t i = bu.unit_price(0) > bu.unit_price(1) ? 0 : 1; // dear good
                size_t j = 1 - i;
                Bundle xe = model::chosen_bundle(design, profile, ti, e);
                Bundle xu = model::chosen_bundle(design, profile, ti, u);
                Bundle xa = model::aggregate_choice(design, profile, ti);

                if (xe[i] + xu[i] > xe[j] + xu[j])
                    bb = TestOutcome::fail("aggregate favours the dear good: " +
                                           xa.to_string());
                if (bb.passed && capacity(bu, j) <= capacity(dec.subdecisions[e], i) &&
                    xu[i] != 0)
                    bb = TestOutcome::fail("expected nothing on the dear good in " +
                                           dec.id + "." + std::to_string(u + 1) +
                                           ", chose " + xu.to_string());

                if (xu[i] > xu[j])
                    pnb = TestOutcome::fail("unequal-price choice favours the dear good: " +
                                            xu.to_string());
                else if (xa[i] > xa[j])
                    pnb = TestOutcome::fail("aggregate favours the dear good: " +
                                            xa.to_string());
            }
            nb_both = conjoin({nb_both, nb});
            bb_both = conjoin({bb_both, bb});
            pnb_both = conjoin({pnb_both, pnb});
        }

        out["nb_sym." + dec.id] = nb;
        out["bb_sym." + dec.id] = bb;
        out["pnb_sym." + dec.id] = pnb;
    }
    out["nb_sym.both"] = nb_both;
    out["bb_sym.both"] = bb_both;
    out["pnb_sym.both"] = pnb_both;
    return out;
}

} // namespace bracketlab::revpref
