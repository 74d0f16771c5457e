#pragma once

#include "bracketlab/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bracketlab::revpref {

using model::Bundle;
using model::ExperimentDesign;
using model::Profile;

/// One revealed-preference data point: a choice and the finite set it was
/// chosen from (which contains it).
struct Observation {
    Bundle chosen;
    std::vector<Bundle> feasible;
};

struct TestOutcome {
    bool passed = false;
    std::optional<std::string> witness; // present iff failed

    static TestOutcome pass() { return {true, std::nullopt}; }
    static TestOutcome fail(std::string w) { return {false, std::move(w)}; }
};

/// One observation per subdecision; feasible set = that subdecision's lines.
std::vector<Observation> build_nb_dataset(const ExperimentDesign& design, const Profile& profile);

/// One observation per decision; chosen = aggregate choice, feasible =
/// aggregate (Minkowski-sum) budget.
std::vector<Observation> build_bb_dataset(const ExperimentDesign& design, const Profile& profile);

/// SARP: the direct strict revealed-preference relation is acyclic.
///
/// With symmetry on, the relation lives on orbit classes (coordinate
/// permutations). With monotonicity on, dominance between orbit
/// representatives adds strict edges. A self-edge (e.g. a distinct orbit
/// mate of a choice affordable in its own budget) is an immediate failure.
TestOutcome sarp(const std::vector<Observation>& observations,
                 bool symmetry, bool monotonicity);

/// Prediction for nested subdecision budgets: same feasible set (or subset
/// containment with the outer choice affordable inside) forces equal choices.
/// Throws if neither feasible set contains the other.
TestOutcome nb_warp(const Observation& a, const Observation& b);

enum class BbWarpRule { exact, a_coordinate };

/// Aggregate-level WARP between a multi-subdecision decision and a covering
/// one-subdecision decision. The single-budget choice is vacuous when no
/// aggregate bundle weakly dominates it; otherwise the aggregates must match
/// (exact rule) or match in the first coordinate (a_coordinate rule).
TestOutcome bb_warp(const ExperimentDesign& design, const Profile& profile,
                    int inner_decision, int covering_decision,
                    BbWarpRule rule = BbWarpRule::exact);

/// Prediction: the aggregate choice lies on the frontier of the aggregate
/// budget. Vacuous when the subdecision price ratios coincide.
TestOutcome bb_mon(const ExperimentDesign& design, const Profile& profile, int decision);

/// Literal symmetry predictions (NB-Sym, BB-Sym, PNB-Sym), evaluated per
/// decision plus a "both" entry over all two-subdecision decisions.
/// Keys: nb_sym.d1 .. nb_sym.both, bb_sym.*, pnb_sym.*.
std::map<std::string, TestOutcome> sym_tests(const ExperimentDesign& design,
                                             const Profile& profile);

} // namespace bracketlab::revpref
