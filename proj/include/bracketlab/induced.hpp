#pragma once

#include "bracketlab/model.hpp"
#include "bracketlab/sqrt_sum.hpp"

#include <map>
#include <string>
#include <vector>

namespace bracketlab::induced {

using model::Bundle;
using model::ExperimentDesign;
using model::Profile;

/// The shopping payoff 0.4(sqrt(apples) + sqrt(oranges))^2, exact.
SqrtSum pay(const Rational& apples, const Rational& oranges);

struct UtilityModel {
    enum class Kind { induced_sqrt, ces, linear };

    Kind kind = Kind::induced_sqrt;
    Rational ces_r;                // ces only, nonzero
    std::vector<Rational> weights; // linear only, positive

    static UtilityModel induced_sqrt();
    static UtilityModel ces(Rational r);
    static UtilityModel linear(std::vector<Rational> w);

    std::string name() const;

    double value(const std::vector<double>& x) const;
    /// Analytic gradient; interior points only for induced_sqrt and ces.
    std::vector<double> gradient(const std::vector<double>& x) const;

    /// Exact (or 100-digit, for ces) three-way comparison of u(a) vs u(b);
    /// ties are genuine ties, not numerical noise.
    int compare(const Bundle& a, const Bundle& b) const;
};

enum class BracketingModel { narrow, broad, pnb };

std::string bracketing_name(BracketingModel m);
BracketingModel parse_bracketing(const std::string& s);

struct DecisionPrediction {
    /// All argmax joint line choices for the decision (one entry unless tied).
    std::vector<std::vector<int>> argmax_lines;
};

/// Exhaustive-enumeration predictions of the induced payoff under each
/// bracketing model. narrow maximizes pay per subdecision; broad maximizes
/// pay of the aggregate over joint combinations; pnb maximizes
/// alpha * sum_k pay(x^k) + (1 - alpha) * pay(sum_k x^k).
/// Throws for designs without the induced payoff (non-shopping).
std::vector<DecisionPrediction> point_predictions(const ExperimentDesign& design,
                                                  BracketingModel bracketing,
                                                  const Rational& alpha = Rational(1));

/// The unique predicted full profile; throws if any decision's argmax is tied.
Profile predicted_profile(const ExperimentDesign& design, BracketingModel bracketing,
                          const Rational& alpha = Rational(1));

struct AlphaRange {
    Rational lower, upper; // grid endpoints contained in the range
    /// Flat line indices on the subdecisions the grouping reads
    /// (decisions 1 and 3 of the shopping design).
    std::map<int, int> profile;
    std::map<std::string, Bundle> bundles; // subdecision label -> prediction
};

/// Groups alpha grid points {k/denominator} by their decision-1 and
/// decision-3 predictions. Contiguity is asserted, so the ranges partition
/// the grid.
std::vector<AlphaRange> alpha_ranges(const ExperimentDesign& design, int denominator = 100);

struct AlphaEstimate {
    int range_index = -1;
    AlphaRange range;
    int errors = 0;       // total line distance to the range's profile
    bool tie_broken = false; // true when a smaller-alpha range matched equally
};

AlphaEstimate estimate_alpha(const ExperimentDesign& design, const Profile& choices,
                             const std::vector<AlphaRange>& ranges);

/// Continuous two-subdecision dataset for the closed-form alpha identifier.
struct FocInput {
    UtilityModel utility;
    std::vector<std::vector<double>> prices;  // [subdecision][good]
    std::vector<double> incomes;              // unused by the formula; kept for validation
    std::vector<std::vector<double>> choices; // [subdecision][good]
};

struct FocResult {
    enum class Kind { corner, narrow, interior } kind = Kind::interior;
    double alpha = 0.0;
    double alpha_by_subdecision[2] = {0.0, 0.0}; // interior only
};

/// Case split of the identification argument: a corner choice forces
/// alpha = 0; both narrow first-order conditions holding exactly force
/// alpha = 1; otherwise alpha = A_k / (A_k - B_k) where A_k and B_k are the
/// aggregate and narrow marginal-utility-per-dollar differences in
/// subdecision k. Throws when price ratios coincide or the ratio falls
/// outside (0,1).
FocResult alpha_from_foc(const FocInput& input);

} // namespace bracketlab::induced
