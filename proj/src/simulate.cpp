#include "bracketlab/simulate.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <stdexcept>

namespace bracketlab::simulate {

namespace {

using model::Bundle;
using Float = boost::multiprecision::cpp_bin_float_100;

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Float to_float(const Rational& q) {
    return Float(boost::multiprecision::numerator(q)) /
           Float(boost::multiprecision::denominator(q));
}

/// Exact PPE objective comparison for one decision: candidates are joint
/// line picks; the objective is alpha * sum_k u(x^k) + (1-alpha) * u(agg).
/// Each utility kind gets an evaluation that makes genuine ties exact:
/// rationals (linear), sqrt-sums (induced), or guarded 100-digit floats (ces).
class PpeObjective {
public:
    PpeObjective(const UtilityModel& u, const Rational& alpha) : u_(u), alpha_(alpha) {}

    /// -1 / 0 / +1 for objective(picks) vs the stored best; call update(true)
    /// to adopt the candidate's value as the new best.
    int compare_with_best(const std::vector<Bundle>& picks) {
        switch (u_.kind) {
            case UtilityModel::Kind::linear: {
                // alpha * sum w.x^k + (1-alpha) * w.agg == w.agg: linearity
                // makes the objective alpha-free
                Rational v = 0;
                for (const auto& b : picks)
                    for (size_t i = 0; i < b.dim(); ++i) v += u_.weights[i] * b[i];
                pending_rat_ = v;
                if (!has_best_) return 1;
                return v < best_rat_ ? -1 : (v == best_rat_ ? 0 : 1);
            }
            case UtilityModel::Kind::induced_sqrt: {
                SqrtSum narrow;
                Bundle agg = picks[0];
                narrow = induced::pay(picks[0][0], picks[0][1]);
                for (size_t k = 1; k < picks.size(); ++k) {
                    narrow = narrow + induced::pay(picks[k][0], picks[k][1]);
                    agg = agg + picks[k];
                }
                SqrtSum v = narrow.scaled(alpha_) +
                            induced::pay(agg[0], agg[1]).scaled(Rational(1) - alpha_);
                pending_sqrt_ = v;
                if (!has_best_) return 1;
                return v.compare(best_sqrt_);
            }
            case UtilityModel::Kind::ces: {
                Float narrow = 0;
                Bundle agg = picks[0];
                narrow = ces_value(picks[0]);
                for (size_t k = 1; k < picks.size(); ++k) {
                    narrow += ces_value(picks[k]);
                    agg = agg + picks[k];
                }
                Float a = to_float(alpha_);
                Float v = a * narrow + (Float(1) - a) * ces_value(agg);
                pending_float_ = v;
                if (!has_best_) return 1;
                Float diff = v - best_float_;
                if (abs(diff) < Float("1e-50")) return 0;
                return diff > 0 ? 1 : -1;
            }
        }
        throw std::logic_error("unknown utility kind");
    }

    void adopt_pending() {
        has_best_ = true;
        best_rat_ = pending_rat_;
        best_sqrt_ = pending_sqrt_;
        best_float_ = pending_float_;
    }

private:
    Float ces_value(const Bundle& b) const {
        Float r = to_float(u_.ces_r);
        Float s = 0;
        for (size_t i = 0; i < b.dim(); ++i) {
            Float xi = to_float(b[i]);
            if (xi == 0) {
                if (u_.ces_r < 0) return 0; // limit: any zero coordinate kills u
                continue;                   // limit value for r in (0,1)
            }
            s += pow(xi, r);
        }
        if (s == 0) return 0;
        return pow(s, Float(1) / r);
    }

    const UtilityModel& u_;
    Rational alpha_;
    bool has_best_ = false;
    Rational best_rat_, pending_rat_;
    SqrtSum best_sqrt_, pending_sqrt_;
    Float best_float_ = 0, pending_float_ = 0;
};

} // namespace

SimulatedSubject simulate_subject(const AgentSpec& agent, const ExperimentDesign& design) {
    if (agent.tremble < 0.0 || agent.tremble >= 1.0)
        throw std::invalid_argument("tremble must lie in [0,1)");
    if (agent.alpha < 0 || agent.alpha > 1)
        throw std::invalid_argument("alpha outside [0,1]");

    SimulatedSubject out;
    out.ideal.assign(design.subdecision_count(), 0);

    for (size_t t = 0; t < design.decisions.size(); ++t) {
        const size_t n = design.decisions[t].subdecisions.size();

        if (agent.bracketing == BracketingModel::narrow) {
            for (size_t k = 0; k < n; ++k) {
                const auto& lines = design.lines((int)t, (int)k);
                int best = 0;
                bool tied = false;
                for (size_t i = 1; i < lines.size(); ++i) {
                    int c = agent.utility.compare(lines[i], lines[best]);
                    if (c > 0) {
                        best = (int)i;
                        tied = false;
                    } else if (c == 0) {
                        tied = true; // lower index kept
                    }
                }
                const int flat = design.flat_index((int)t, (int)k);
                out.ideal[flat] = best;
                if (tied) out.tied_subdecisions.push_back(flat);
            }
            continue;
        }

        // broad and pnb: joint argmax over line combinations, first
        // subdecision most significant so the first maximizer found is the
        // lexicographically lowest
        const Rational alpha =
            agent.bracketing == BracketingModel::broad ? Rational(0) : agent.alpha;
        PpeObjective objective(agent.utility, alpha);
        std::vector<size_t> pick(n, 0), best_pick;
        bool tied = false;
        while (true) {
            std::vector<Bundle> picks;
            for (size_t k = 0; k < n; ++k)
                picks.push_back(design.lines((int)t, (int)k)[pick[k]]);
            int c = objective.compare_with_best(picks);
            if (best_pick.empty() || c > 0) {
                objective.adopt_pending();
                best_pick = pick;
                tied = false;
            } else if (c == 0) {
                tied = true;
            }
            size_t k = n;
            while (k > 0) { // last subdecision fastest; carry leftward
                if (++pick[k - 1] < design.lines((int)t, (int)(k - 1)).size()) break;
                pick[k - 1] = 0;
                --k;
            }
            if (k == 0) break;
        }
        for (size_t k = 0; k < n; ++k) {
            const int flat = design.flat_index((int)t, (int)k);
            out.ideal[flat] = (int)best_pick[k];
            if (tied) out.tied_subdecisions.push_back(flat);
        }
    }

    // trembles: one-line shifts, reflecting at the sheet boundaries
    Profile final = out.ideal;
    uint64_t state = agent.seed ^ 0xD1B54A32D192ED03ULL;
    const auto refs = design.subdecisions();
    for (size_t j = 0; j < final.size(); ++j) {
        const int count =
            (int)design.lines(refs[j].decision, refs[j].subdecision).size();
        const double u = (double)(splitmix64(state) >> 11) * 0x1.0p-53;
        const bool up = splitmix64(state) & 1;
        if (u >= agent.tremble || count < 2) continue;
        int v = final[j] + (up ? 1 : -1);
        if (v < 0) v = 1;
        if (v >= count) v = count - 2;
        final[j] = v;
    }

    out.choices.subject_id =
        agent.label.empty()
            ? agent.utility.name() + "/" + induced::bracketing_name(agent.bracketing)
            : agent.label;
    out.choices.choices = std::move(final);
    return out;
}

RecoveryResult recovery_experiment(const std::vector<PopulationMember>& population,
                                   const ExperimentDesign& design, std::uint64_t seed,
                                   const std::map<BracketingModel, classify::AreaResult>& areas,
                                   const classify::ClassifyOptions& options) {
    RecoveryResult out;
    long trial = 0;
    for (size_t m = 0; m < population.size(); ++m) {
        const auto& member = population[m];
        if (member.count < 1) throw std::invalid_argument("population counts must be >= 1");
        for (long c = 0; c < member.count; ++c, ++trial) {
            AgentSpec agent = member.agent;
            uint64_t state = seed ^ (0x9E3779B97F4A7C15ULL * (uint64_t)(trial + 1));
            agent.seed = splitmix64(state);
            if (agent.label.empty())
                agent.label = agent.utility.name() + "/" +
                              induced::bracketing_name(agent.bracketing);
            agent.label += "#" + std::to_string(trial);

            auto sim = simulate_subject(agent, design);
            auto cls = classify::selten_classify(design, sim.choices, areas, options);
            out.confusion[induced::bracketing_name(member.agent.bracketing)][cls.assigned]++;
            out.subjects.push_back(std::move(cls));
        }
    }
    return out;
}

} // namespace bracketlab::simulate
