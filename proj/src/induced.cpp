#include "bracketlab/induced.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bracketlab::induced {

namespace {
using Float = boost::multiprecision::cpp_bin_float_100;
}

SqrtSum pay(const Rational& apples, const Rational& oranges) {
    if (apples < 0 || oranges < 0) throw std::invalid_argument("negative quantity");
    // 0.4 (sqrt a + sqrt o)^2 = 0.4 (a + o) + 0.8 sqrt(a o)
    return SqrtSum::of_rational(Rational(2, 5) * (apples + oranges)) +
           SqrtSum::sqrt_of(apples * oranges).scaled(Rational(4, 5));
}

UtilityModel UtilityModel::induced_sqrt() { return {Kind::induced_sqrt, Rational(0), {}}; }

UtilityModel UtilityModel::ces(Rational r) {
    if (r == 0) throw std::invalid_argument("ces exponent must be nonzero");
    return {Kind::ces, std::move(r), {}};
}

UtilityModel UtilityModel::linear(std::vector<Rational> w) {
    if (w.empty()) throw std::invalid_argument("linear utility needs weights");
    for (const auto& x : w)
        if (x <= 0) throw std::invalid_argument("linear weights must be positive");
    return {Kind::linear, Rational(0), std::move(w)};
}

std::string UtilityModel::name() const {
    switch (kind) {
        case Kind::induced_sqrt: return "induced_sqrt";
        case Kind::ces: return "ces(" + rational_to_string(ces_r) + ")";
        case Kind::linear: {
            std::string s = "linear(";
            for (size_t i = 0; i < weights.size(); ++i)
                s += (i ? "," : "") + rational_to_string(weights[i]);
            return s + ")";
        }
    }
    return "?";
}

double UtilityModel::value(const std::vector<double>& x) const {
    switch (kind) {
        case Kind::induced_sqrt: {
            double s = std::sqrt(x[0]) + std::sqrt(x[1]);
            return 0.4 * s * s;
        }
        case Kind::ces: {
            double r = rational_to_double(ces_r);
            double s = 0;
            for (double xi : x) s += std::pow(xi, r);
            return std::pow(s, 1.0 / r);
        }
        case Kind::linear: {
            double s = 0;
            for (size_t i = 0; i < x.size(); ++i) s += rational_to_double(weights[i]) * x[i];
            return s;
        }
    }
    return 0;
}

std::vector<double> UtilityModel::gradient(const std::vector<double>& x) const {
    std::vector<double> g(x.size());
    switch (kind) {
        case Kind::induced_sqrt: {
            double s = std::sqrt(x[0]) + std::sqrt(x[1]);
            for (size_t j = 0; j < x.size(); ++j) g[j] = 0.4 * s / std::sqrt(x[j]);
            break;
        }
        case Kind::ces: {
            double r = rational_to_double(ces_r);
            double s = 0;
            for (double xi : x) s += std::pow(xi, r);
            double outer = std::pow(s, 1.0 / r - 1.0);
            for (size_t j = 0; j < x.size(); ++j) g[j] = outer * std::pow(x[j], r - 1.0);
            break;
        }
        case Kind::linear:
            for (size_t j = 0; j < x.size(); ++j) g[j] = rational_to_double(weights[j]);
            break;
    }
    return g;
}

int UtilityModel::compare(const Bundle& a, const Bundle& b) const {
    switch (kind) {
        case Kind::induced_sqrt: {
            if (a.dim() != 2 || b.dim() != 2)
                throw std::invalid_argument("induced payoff is two-good");
            return pay(a[0], a[1]).compare(pay(b[0], b[1]));
        }
        case Kind::linear: {
            Rational da(0), db(0);
            for (size_t i = 0; i < a.dim(); ++i) {
                da += weights[i] * a[i];
                db += weights[i] * b[i];
            }
            return da < db ? -1 : (da == db ? 0 : 1);
        }
        case Kind::ces: {
            // compare sum x_i^r directly (a monotone transform for r > 0,
            // antitone for r < 0)
            auto to_float = [](const Rational& q) {
                return Float(boost::multiprecision::numerator(q)) /
                       Float(boost::multiprecision::denominator(q));
            };
            Float r = to_float(ces_r);
            auto power_sum = [&](const Bundle& v) {
                Float s = 0;
                for (size_t i = 0; i < v.dim(); ++i) {
                    Float xi = to_float(v[i]);
                    if (xi == 0) continue; // limit value for r in (0,1)
                    s += pow(xi, r);
                }
                return s;
            };
            Float diff = power_sum(a) - power_sum(b);
            if (abs(diff) < Float("1e-50")) return 0;
            int sign = diff > 0 ? 1 : -1;
            return ces_r > 0 ? sign : -sign;
        }
    }
    return 0;
}

std::string bracketing_name(BracketingModel m) {
    switch (m) {
        case BracketingModel::narrow: return "narrow";
        case BracketingModel::broad: return "broad";
        case BracketingModel::pnb: return "pnb";
    }
    return "?";
}

BracketingModel parse_bracketing(const std::string& s) {
    if (s == "narrow") return BracketingModel::narrow;
    if (s == "broad") return BracketingModel::broad;
    if (s == "pnb") return BracketingModel::pnb;
    throw std::invalid_argument("unknown bracketing model: " + s);
}

namespace {

void require_shopping(const ExperimentDesign& design) {
    if (design.domain != model::Domain::shopping)
        throw std::invalid_argument("induced-payoff predictions need the shopping design");
}

/// Exact PPE objective alpha * sum_k pay(x^k) + (1 - alpha) * pay(aggregate).
SqrtSum ppe_objective(const std::vector<Bundle>& picks, const Rational& alpha) {
    SqrtSum narrow;
    Bundle agg = picks[0];
    narrow = pay(picks[0][0], picks[0][1]);
    for (size_t k = 1; k < picks.size(); ++k) {
        narrow = narrow + pay(picks[k][0], picks[k][1]);
        agg = agg + picks[k];
    }
    return narrow.scaled(alpha) + pay(agg[0], agg[1]).scaled(Rational(1) - alpha);
}

} // namespace

std::vector<DecisionPrediction> point_predictions(const ExperimentDesign& design,
                                                  BracketingModel bracketing,
                                                  const Rational& alpha) {
    require_shopping(design);
    if (alpha < 0 || alpha > 1) throw std::invalid_argument("alpha outside [0,1]");

    std::vector<DecisionPrediction> out;
    for (size_t t = 0; t < design.decisions.size(); ++t) {
        const auto& dec = design.decisions[t];
        const size_t n = dec.subdecisions.size();
        DecisionPrediction pred;

        if (bracketing == BracketingModel::narrow) {
            // independent per-subdecision argmaxes; report their product
            std::vector<std::vector<int>> per_sub(n);
            for (size_t k = 0; k < n; ++k) {
                const auto& lines = design.lines((int)t, (int)k);
                SqrtSum best;
                for (size_t i = 0; i < lines.size(); ++i) {
                    SqrtSum v = pay(lines[i][0], lines[i][1]);
                    if (per_sub[k].empty() || v > best) {
                        per_sub[k] = {(int)i};
                        best = v;
                    } else if (v == best) {
                        per_sub[k].push_back((int)i);
                    }
                }
            }
            std::vector<size_t> sel(n, 0);
            while (true) {
                std::vector<int> combo;
                for (size_t k = 0; k < n; ++k) combo.push_back(per_sub[k][sel[k]]);
                pred.argmax_lines.push_back(std::move(combo));
                size_t k = 0;
                while (k < n && ++sel[k] == per_sub[k].size()) sel[k++] = 0;
                if (k == n) break;
            }
        } else {
            const Rational a =
                bracketing == BracketingModel::broad ? Rational(0) : alpha;
            SqrtSum best;
            std::vector<size_t> pick(n, 0);
            while (true) {
                std::vector<Bundle> picks;
                for (size_t k = 0; k < n; ++k)
                    picks.push_back(design.lines((int)t, (int)k)[pick[k]]);
                SqrtSum v = ppe_objective(picks, a);
                if (pred.argmax_lines.empty() || v > best) {
                    pred.argmax_lines.assign(1, std::vector<int>(pick.begin(), pick.end()));
                    best = v;
                } else if (v == best) {
                    pred.argmax_lines.emplace_back(pick.begin(), pick.end());
                }
                size_t k = 0;
                while (k < n && ++pick[k] == design.lines((int)t, (int)k).size()) pick[k++] = 0;
                if (k == n) break;
            }
        }
        out.push_back(std::move(pred));
    }
    return out;
}

Profile predicted_profile(const ExperimentDesign& design, BracketingModel bracketing,
                          const Rational& alpha) {
    auto preds = point_predictions(design, bracketing, alpha);
    Profile profile;
    for (size_t t = 0; t < preds.size(); ++t) {
        if (preds[t].argmax_lines.size() != 1)
            throw std::logic_error("tied prediction in decision " +
                                   design.decisions[t].id);
        for (int line : preds[t].argmax_lines[0]) profile.push_back(line);
    }
    return profile;
}

std::vector<AlphaRange> alpha_ranges(const ExperimentDesign& design, int denominator) {
    require_shopping(design);
    if (denominator < 1) throw std::invalid_argument("alpha grid denominator must be >= 1");

    // the grouping reads the two-subdecision decisions (1 and 3)
    std::vector<std::pair<int, int>> subs;
    for (size_t t = 0; t < design.decisions.size(); ++t)
        if (design.decisions[t].subdecisions.size() >= 2)
            for (size_t k = 0; k < design.decisions[t].subdecisions.size(); ++k)
                subs.emplace_back((int)t, (int)k);

    const auto refs = design.subdecisions();
    std::vector<AlphaRange> ranges;
    std::map<int, int> prev;
    for (int k = 0; k <= denominator; ++k) {
        Rational alpha(k, denominator);
        auto preds = point_predictions(design, BracketingModel::pnb, alpha);
        std::map<int, int> profile;
        for (auto [t, s] : subs) {
            if (preds[t].argmax_lines.size() != 1)
                throw std::logic_error("tied prediction at alpha " + rational_to_string(alpha));
            profile[design.flat_index(t, s)] = preds[t].argmax_lines[0][s];
        }
        if (ranges.empty() || profile != prev) {
            AlphaRange r;
            r.lower = r.upper = alpha;
            r.profile = profile;
            for (auto [t, s] : subs) {
                const auto& ref = refs[design.flat_index(t, s)];
                r.bundles[ref.label] = design.lines(t, s)[profile[design.flat_index(t, s)]];
            }
            ranges.push_back(std::move(r));
            prev = std::move(profile);
        } else {
            ranges.back().upper = alpha;
        }
    }
    // contiguity: identical profiles must not reappear in a later range
    for (size_t i = 0; i < ranges.size(); ++i)
        for (size_t j = i + 1; j < ranges.size(); ++j)
            if (ranges[i].profile == ranges[j].profile)
                throw std::logic_error("alpha ranges are not contiguous");
    return ranges;
}

AlphaEstimate estimate_alpha(const ExperimentDesign& design, const Profile& choices,
                             const std::vector<AlphaRange>& ranges) {
    model::validate_profile(design, choices);
    if (ranges.empty()) throw std::invalid_argument("no alpha ranges");

    AlphaEstimate best;
    // scan from the largest alpha down so ties keep the larger-alpha range
    for (int i = (int)ranges.size() - 1; i >= 0; --i) {
        int err = 0;
        for (const auto& [flat, line] : ranges[i].profile)
            err += std::abs(choices[flat] - line);
        if (best.range_index < 0 || err < best.errors) {
            best.range_index = i;
            best.range = ranges[i];
            best.errors = err;
            best.tie_broken = false;
        } else if (err == best.errors) {
            best.tie_broken = true; // a smaller-alpha range matched equally
        }
    }
    return best;
}

FocResult alpha_from_foc(const FocInput& input) {
    if (input.prices.size() != 2 || input.choices.size() != 2)
        throw std::invalid_argument("the identifier needs exactly two subdecisions");
    const auto& p = input.prices;
    if (p[0].size() != 2 || p[1].size() != 2)
        throw std::invalid_argument("two goods per subdecision");
    if (p[0][0] * p[1][1] == p[0][1] * p[1][0])
        throw std::invalid_argument("price ratios must differ");

    constexpr double tol = 1e-9;

    for (const auto& x : input.choices)
        for (double xi : x)
            if (xi < tol) return {FocResult::Kind::corner, 0.0, {0.0, 0.0}};

    std::vector<double> agg = {input.choices[0][0] + input.choices[1][0],
                               input.choices[0][1] + input.choices[1][1]};
    auto gagg = input.utility.gradient(agg);

    bool narrow = true;
    double alpha_k[2];
    for (int k = 0; k < 2; ++k) {
        auto g = input.utility.gradient(input.choices[k]);
        // narrow FOC: marginal utility per dollar equal across goods
        double nk = g[0] / p[k][0] - g[1] / p[k][1];
        double scale = std::abs(g[0] / p[k][0]) + std::abs(g[1] / p[k][1]);
        if (std::abs(nk) > 1e-6 * scale) narrow = false;
        double ak = gagg[0] / p[k][0] - gagg[1] / p[k][1];
        alpha_k[k] = ak / (ak - nk);
    }
    if (narrow) return {FocResult::Kind::narrow, 1.0, {1.0, 1.0}};

    FocResult r;
    r.kind = FocResult::Kind::interior;
    r.alpha_by_subdecision[0] = alpha_k[0];
    r.alpha_by_subdecision[1] = alpha_k[1];
    r.alpha = alpha_k[0];
    if (!(r.alpha > 0.0 && r.alpha < 1.0))
        throw std::domain_error("identified alpha outside (0,1)");
    return r;
}

} // namespace bracketlab::induced
