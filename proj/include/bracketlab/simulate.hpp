#pragma once

#include "bracketlab/classify.hpp"
#include "bracketlab/induced.hpp"
#include "bracketlab/model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bracketlab::simulate {

using induced::BracketingModel;
using induced::UtilityModel;
using model::ExperimentDesign;
using model::Profile;

/// A synthetic subject: a known utility, a bracketing model, and a tremble.
struct AgentSpec {
    UtilityModel utility = UtilityModel::linear({Rational(1), Rational(1)});
    BracketingModel bracketing = BracketingModel::narrow;
    Rational alpha = Rational(1); // pnb only, in [0,1]
    double tremble = 0.0;         // per-subdecision probability of a one-line shift
    std::uint64_t seed = 0;
    std::string label; // optional, defaults to utility/bracketing names
};

struct SimulatedSubject {
    model::SubjectChoices choices; // post-tremble
    Profile ideal;                 // the untrembled optimum
    /// Flat subdecision indices where the lowest-line-index tie rule fired.
    std::vector<int> tied_subdecisions;
};

/// narrow: per-subdecision argmax over lines. broad: joint argmax of the
/// aggregate's utility over line combinations. pnb(alpha): joint argmax of
/// alpha * sum_k u(x^k) + (1 - alpha) * u(sum_k x^k). Ties go to the lowest
/// line indices (first subdecision most significant). Trembles move one line,
/// reflecting at the sheet boundaries, after optimization.
SimulatedSubject simulate_subject(const AgentSpec& agent, const ExperimentDesign& design);

struct PopulationMember {
    AgentSpec agent;
    long count = 1;
};

struct RecoveryResult {
    /// confusion[true bracketing name][assigned name] -> subject count
    std::map<std::string, std::map<std::string, long>> confusion;
    std::vector<classify::SubjectClassification> subjects;
};

/// Simulates `count` copies of each member (per-trial seeds derived from
/// `seed`), runs the classification pipeline against the supplied model
/// areas, and tabulates assigned vs true model.
RecoveryResult recovery_experiment(const std::vector<PopulationMember>& population,
                                   const ExperimentDesign& design, std::uint64_t seed,
                                   const std::map<BracketingModel, classify::AreaResult>& areas,
                                   const classify::ClassifyOptions& options = {});

} // namespace bracketlab::simulate
