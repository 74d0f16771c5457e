#pragma once

#include "bracketlab/model.hpp"
#include "bracketlab/simplex.hpp"

#include <memory>
#include <string>
#include <vector>

namespace bracketlab::pnb {

using model::Bundle;
using model::ExperimentDesign;
using model::Profile;

struct PnbOptions {
    /// ppe: one observation per decision, the chosen profile against every
    /// feasible joint deviation. per_subdecision: one observation per
    /// subdecision, deviations holding the other subdecisions fixed.
    enum class Mode { ppe, per_subdecision };
    /// Which component of the evaluation lottery alpha multiplies. `narrow`
    /// keeps alpha = 1 equal to fully narrow bracketing in both modes.
    enum class AlphaWeight { narrow, aggregate };

    Mode mode = Mode::ppe;
    AlphaWeight alpha_weight = AlphaWeight::narrow;
    bool symmetry = true;      // utility invariant to coordinate permutation
    bool enrich_grid = false;  // add every budget line to the outcome grid
    simplex::Strategy strategy = simplex::Strategy::hybrid;
};

/// The linear system deciding rationalizability at one alpha: utility values
/// on `grid` must give every strict row a positive value, every weak
/// (free-disposal) row a nonnegative value, and every symmetry row zero.
struct FarkasSystem {
    std::vector<Bundle> grid;
    simplex::Mat strict;
    simplex::Mat weak;
    simplex::Mat equalities;
};

struct LarpResult {
    bool rationalizable = false;
    simplex::Vec utility;         // on grid, if rationalizable
    simplex::Vec strict_weights;  // otherwise: >= 0, sum 1
    simplex::Vec weak_weights;    // >= 0
    simplex::Vec equality_weights;
};

/// Exact decision with certificate, either way.
LarpResult larp_feasibility(const FarkasSystem& system,
                            simplex::Strategy strategy = simplex::Strategy::hybrid);

struct ScanOutcome {
    std::vector<char> feasible; // indexed by k = 0..denominator
    /// One infeasibility certificate covered every grid point.
    bool certificate_all_infeasible = false;
};

/// Caches the alpha-independent parts (outcome grid, deviation menus,
/// symmetry and dominance rows) for one profile, so that scanning an alpha
/// grid only reassembles and solves the small LP.
class PnbEvaluator {
public:
    /// An empty `only_decisions` tests the whole dataset; otherwise just the
    /// listed decisions (a valid necessary condition, used for pruning).
    PnbEvaluator(const ExperimentDesign& design, const Profile& profile,
                 const PnbOptions& options = {}, const std::vector<int>& only_decisions = {});
    ~PnbEvaluator();
    PnbEvaluator(PnbEvaluator&&) noexcept;

    FarkasSystem system(const Rational& alpha) const;
    bool feasible(const Rational& alpha) const;

    /// Decides feasibility at every grid point {k/denominator}. Far cheaper
    /// than per-point solves: a feasible point's separating utility settles
    /// all grid points where it remains valid with integer arithmetic, and
    /// an infeasibility certificate whose weight-derivative lies in the span
    /// of the symmetry rows settles the whole grid at once.
    /// `allowed` (optional) masks grid points to skip; with `early_exit`
    /// the scan stops after the first feasible point.
    ScanOutcome scan(int denominator, const std::vector<char>* allowed = nullptr,
                     bool early_exit = false) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct PnbResult {
    bool passed = false;
    std::vector<std::string> passing_alphas; // "k/denominator", unreduced
};

/// Scans alpha over {k/denominator : k = 0..denominator}.
PnbResult pnb_test(const ExperimentDesign& design, const Profile& profile,
                   int denominator = 100, const PnbOptions& options = {});

} // namespace bracketlab::pnb
