#pragma once

#include "bracketlab/errors.hpp"
#include "bracketlab/induced.hpp"
#include "bracketlab/model.hpp"
#include "bracketlab/pnb.hpp"
#include "bracketlab/stats.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bracketlab::classify {

using induced::BracketingModel;
using model::ExperimentDesign;
using model::Profile;

/// Product of line counts over all subdecisions.
long long total_profiles(const ExperimentDesign& design);

/// Mixed-radix packing of profiles into 64-bit keys (radices = line counts).
class ProfileCodec {
public:
    explicit ProfileCodec(const ExperimentDesign& design);
    uint64_t pack(const Profile& p) const;
    Profile unpack(uint64_t key) const;
    const std::vector<int>& radices() const { return radices_; }

private:
    std::vector<int> radices_;
};

struct BallCount {
    std::vector<long long> counts; // counts[e] = profiles within distance e
    bool truncated = false;        // stopped once the count passed the limit
};

/// Multi-source breadth-first expansion over the full profile space,
/// counting profiles within L1 line distance 0..max_errors of `seeds`.
/// Expansion stops early once the running count exceeds `limit` (if >= 0).
BallCount ball_count(const ExperimentDesign& design, const std::vector<Profile>& seeds,
                     int max_errors, long long limit = -1);

struct AreaOptions {
    int alpha_denominator = 100;
    pnb::PnbOptions pnb;
    /// Sidecar cache file; empty disables caching.
    std::string cache_path;
    bool verbose = false;
};

/// The zero-error consistent profile set of a bracketing model. Token
/// designs: symmetric monotone SARP on the narrow (per-subdecision) or broad
/// (aggregate) dataset, or the partial-narrow LP over the alpha grid.
/// Shopping: induced-payoff point predictions (pnb: union over the grid).
std::vector<Profile> model_pass_set(const ExperimentDesign& design, BracketingModel model,
                                    const AreaOptions& options = {});

struct AreaResult {
    BracketingModel model;
    std::vector<long long> counts; // counts[e], e = 0..max_errors
    std::vector<Profile> pass_set;
    bool from_cache = false;
};

AreaResult predictive_area(const ExperimentDesign& design, BracketingModel model,
                           int max_errors = 3, const AreaOptions& options = {});

/// Zero-error pass counts of the partial-narrow model at the nested alpha
/// grids {k/10} in {k/20} in {k/D} for denominator D (divisible by 20), from
/// one staged sweep. pass_set is the full-grid set, identical to
/// model_pass_set(design, pnb). Both alpha-weight orientations give the same
/// counts: mirroring alpha maps each grid onto itself.
struct PnbGridCounts {
    long long at_coarse = 0; // alpha grid k/10
    long long at_medium = 0; // alpha grid k/20
    long long at_full = 0;   // alpha grid k/D
    std::vector<Profile> pass_set;
};

PnbGridCounts pnb_grid_sensitivity(const ExperimentDesign& design,
                                   const AreaOptions& options = {});

/// Fast staged membership test for the partial-narrow model on one profile:
/// per-decision LP pruning before the full-dataset scan, with early exit on
/// the first feasible alpha. Shares its pruning tables across calls.
class PnbMembership {
public:
    PnbMembership(const ExperimentDesign& design, const AreaOptions& options = {});
    ~PnbMembership();
    PnbMembership(PnbMembership&&) noexcept;

    bool passes(const Profile& profile) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct ClassifyOptions {
    long long unclassified_threshold = 1'000'000;
    int max_errors = 3; // areas precomputed up to here
    AreaOptions area;
};

struct ModelFit {
    int errors = 0;               // line distance to the model's pass set
    long long area = -1;          // profiles consistent at that allowance (-1: beyond threshold)
    double selten_score = 0.0;    // 1 - area/total, when area is known
    bool rationalizes = false;    // area known and within the threshold
};

struct SubjectClassification {
    std::string subject_id;
    std::map<std::string, ModelFit> fits; // keyed by bracketing_name
    std::string assigned;                 // model name or "unclassified"
    bool tie_broken = false;
    std::optional<induced::AlphaEstimate> alpha; // shopping designs
};

/// Highest predictive success (1 - area/total) among the models whose
/// rationalizing area is within the threshold; ties go to fewer errors, then
/// narrow over broad over partial-narrow.
SubjectClassification selten_classify(const ExperimentDesign& design,
                                      const model::SubjectChoices& subject,
                                      const std::map<BracketingModel, AreaResult>& areas,
                                      const ClassifyOptions& options = {});

/// Paired first-vs-second comparisons (e.g. error counts across rounds):
/// exact sign test on the direction of the differences with ties dropped,
/// plus the paired t test. Fisher's exact test on 2x2 classification tables
/// is stats::fisher_exact_p directly.
struct PairedStats {
    int positives = 0; // first > second
    int negatives = 0; // first < second
    int ties = 0;
    double sign_p = 1.0;
    stats::TTestResult t;
};

/// Throws on empty input.
PairedStats secondary_stats(const std::vector<std::pair<double, double>>& first_second);

} // namespace bracketlab::classify
