#include "bracketlab/classify.hpp"

#include "bracketlab/revpref.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace bracketlab::classify {

long long total_profiles(const ExperimentDesign& design) {
    long long total = 1;
    for (const auto& ref : design.subdecisions())
        total *= static_cast<long long>(design.lines(ref.decision, ref.subdecision).size());
    return total;
}

ProfileCodec::ProfileCodec(const ExperimentDesign& design) {
    for (const auto& ref : design.subdecisions())
        radices_.push_back(static_cast<int>(design.lines(ref.decision, ref.subdecision).size()));
}

uint64_t ProfileCodec::pack(const Profile& p) const {
    if (p.size() != radices_.size()) throw std::invalid_argument("profile size mismatch");
    uint64_t key = 0;
    for (size_t i = radices_.size(); i-- > 0;) {
        if (p[i] < 0 || p[i] >= radices_[i]) throw std::out_of_range("line index out of range");
        key = key * static_cast<uint64_t>(radices_[i]) + static_cast<uint64_t>(p[i]);
    }
    return key;
}

Profile ProfileCodec::unpack(uint64_t key) const {
    Profile p(radices_.size());
    for (size_t i = 0; i < radices_.size(); ++i) {
        p[i] = static_cast<int>(key % static_cast<uint64_t>(radices_[i]));
        key /= static_cast<uint64_t>(radices_[i]);
    }
    return p;
}

BallCount ball_count(const ExperimentDesign& design, const std::vector<Profile>& seeds,
                     int max_errors, long long limit) {
    if (max_errors < 0) throw std::invalid_argument("max_errors must be >= 0");
    ProfileCodec codec(design);
    const auto& radices = codec.radices();

    BallCount out;
    std::unordered_set<uint64_t> visited;
    std::vector<uint64_t> frontier;
    for (const auto& s : seeds) {
        uint64_t key = codec.pack(s);
        if (visited.insert(key).second) frontier.push_back(key);
    }
    auto over = [&] { return limit >= 0 && (long long)visited.size() > limit; };
    if (over()) {
        out.truncated = true;
        return out;
    }
    out.counts.push_back(static_cast<long long>(visited.size()));

    for (int e = 1; e <= max_errors && !out.truncated; ++e) {
        std::vector<uint64_t> next;
        for (uint64_t key : frontier) {
            Profile p = codec.unpack(key);
            uint64_t stride = 1;
            for (size_t i = 0; i < p.size(); ++i) {
                if (p[i] + 1 < radices[i] && visited.insert(key + stride).second)
                    next.push_back(key + stride);
                if (p[i] > 0 && visited.insert(key - stride).second)
                    next.push_back(key - stride);
                stride *= static_cast<uint64_t>(radices[i]);
            }
            if (over()) {
                out.truncated = true;
                break;
            }
        }
        frontier = std::move(next);
        if (!out.truncated) out.counts.push_back(static_cast<long long>(visited.size()));
    }
    return out;
}

namespace {

using model::Bundle;
using model::Domain;
using revpref::Observation;

/// Flat indices and line counts of one decision's subdecisions.
struct DecisionShape {
    int decision = 0;
    std::vector<int> flats;
    std::vector<int> radix;
    long combos = 1;
};

std::vector<DecisionShape> decision_shapes(const ExperimentDesign& design) {
    std::vector<DecisionShape> shapes;
    for (size_t t = 0; t < design.decisions.size(); ++t) {
        DecisionShape s;
        s.decision = static_cast<int>(t);
        for (size_t k = 0; k < design.decisions[t].subdecisions.size(); ++k) {
            s.flats.push_back(design.flat_index((int)t, (int)k));
            s.radix.push_back(static_cast<int>(design.lines((int)t, (int)k).size()));
            s.combos *= s.radix.back();
        }
        shapes.push_back(std::move(s));
    }
    return shapes;
}

std::vector<int> nth_combo(const DecisionShape& s, long c) {
    std::vector<int> sub(s.radix.size());
    for (size_t k = 0; k < s.radix.size(); ++k) {
        sub[k] = static_cast<int>(c % s.radix[k]);
        c /= s.radix[k];
    }
    return sub;
}

/// Symmetric narrow pass set: filter each subdecision alone, then confirm
/// survivor combinations jointly under the full symmetric strict SARP.
std::vector<Profile> narrow_pass_set(const ExperimentDesign& design) {
    const size_t nflat = design.subdecisions().size();

    std::vector<std::vector<int>> survivors; // per flat: allowed line indices
    for (const auto& ref : design.subdecisions()) {
        const auto& lines = design.lines(ref.decision, ref.subdecision);
        std::vector<int> keep;
        for (int l = 0; l < (int)lines.size(); ++l) {
            Observation obs{lines[l], lines};
            if (revpref::sarp({obs}, true, true).passed) keep.push_back(l);
        }
        survivors.push_back(std::move(keep));
    }

    long long cand = 1;
    for (const auto& s : survivors) {
        cand *= (long long)s.size();
        if (cand > 5'000'000) throw std::logic_error("pass-set candidate space too large");
    }

    std::vector<Profile> pass;
    std::vector<size_t> sel(survivors.size(), 0);
    if (cand == 0) return pass;
    while (true) {
        Profile p(nflat, 0);
        for (size_t u = 0; u < nflat; ++u) p[u] = survivors[u][sel[u]];
        if (revpref::sarp(revpref::build_nb_dataset(design, p), true, true).passed)
            pass.push_back(std::move(p));
        size_t u = 0;
        while (u < nflat && ++sel[u] == survivors[u].size()) sel[u++] = 0;
        if (u == nflat) break;
    }
    return pass;
}

/// Exact squared Euclidean distance between two-good bundles.
Rational dist2(const Bundle& a, const Bundle& b) {
    Rational da = a[0] - b[0], db = a[1] - b[1];
    return da * da + db * db;
}

/// Aggregate choices a symmetric, strictly convex, monotone utility can pick
/// from one decision's aggregate budget, adjusted for the line grids.
///
/// The continuous optimum lies on the concave frontier of the convex hull of
/// the aggregate bundles, restricted by symmetry: the marginal rate of
/// substitution equals 1 on the equal-split diagonal, exceeds 1 strictly
/// above it, and falls below 1 strictly below it. Intersecting that with the
/// frontier's supporting slopes yields an arc of attainable optima. A
/// discrete aggregate is admitted when it is weakly closest (Euclidean,
/// among undominated aggregates) to some point of the arc — the choice a
/// subject restricted to the grid would make for such an optimum.
std::vector<Bundle> broad_decision_predictions(const std::vector<Bundle>& undominated) {
    // Chain sorted by first coordinate; undominated two-good bundles have
    // distinct first coordinates and descending second coordinates.
    std::vector<Bundle> chain = undominated;
    std::sort(chain.begin(), chain.end(),
              [](const Bundle& x, const Bundle& y) { return x[0] < y[0]; });

    // Upper concave hull of the chain.
    std::vector<Bundle> hull;
    for (const auto& p : chain) {
        while (hull.size() >= 2) {
            const Bundle& a = hull[hull.size() - 2];
            const Bundle& b = hull[hull.size() - 1];
            Rational cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
            if (cross >= 0)
                hull.pop_back(); // b on or below segment a-p
            else
                break;
        }
        hull.push_back(p);
    }

    // Slope magnitude of hull edge i (between vertices i-1 and i); concavity
    // makes the sequence nondecreasing.
    auto slope = [&](size_t i) {
        return (hull[i - 1][1] - hull[i][1]) / (hull[i][0] - hull[i - 1][0]);
    };

    // The arc of attainable continuous optima, as (possibly degenerate)
    // rational segments.
    std::vector<std::pair<Bundle, Bundle>> arc;
    for (size_t i = 0; i < hull.size(); ++i) {
        // Vertex i supports MRS values in [lo, hi] (hi unbounded at the last
        // vertex, lo = 0 at the first).
        bool hi_inf = (i + 1 == hull.size());
        Rational lo = (i == 0) ? Rational(0) : slope(i);
        Rational hi = hi_inf ? Rational(0) : slope(i + 1);
        const Bundle& v = hull[i];
        bool ok;
        if (v[0] < v[1])
            ok = hi_inf || hi > 1; // need some MRS > 1
        else if (v[0] > v[1])
            ok = lo < 1; // need some MRS < 1
        else
            ok = lo <= 1 && (hi_inf || hi >= 1);
        if (ok) arc.push_back({v, v});
    }
    for (size_t i = 1; i < hull.size(); ++i) {
        const Bundle &P = hull[i - 1], &Q = hull[i];
        Rational s = slope(i);
        // g(t) = q_a(t) - q_b(t) is strictly increasing along the edge.
        Rational g0 = P[0] - P[1], g1 = Q[0] - Q[1];
        auto at = [&](const Rational& t) {
            return Bundle(P[0] + t * (Q[0] - P[0]), P[1] + t * (Q[1] - P[1]));
        };
        if (s > 1) {
            // optima on the strictly-above-diagonal portion
            if (g0 < 0) {
                Rational tend = g1 <= 0 ? Rational(1) : g0 / (g0 - g1);
                arc.push_back({P, at(tend)});
            }
        } else if (s < 1) {
            if (g1 > 0) {
                Rational tstart = g0 >= 0 ? Rational(0) : g0 / (g0 - g1);
                arc.push_back({at(tstart), Q});
            }
        } else if (g0 <= 0 && g1 >= 0) {
            // equal-price edge: only the diagonal point itself
            Rational t = (g0 == g1) ? Rational(0) : g0 / (g0 - g1);
            arc.push_back({at(t), at(t)});
        }
    }

    std::vector<Bundle> allowed;
    for (const auto& p : undominated) {
        bool ok = false;
        for (const auto& [A, B] : arc) {
            // t-interval on segment A->B where p is weakly closest.
            Rational lo(0), hi(1);
            bool empty = false;
            for (const auto& q : undominated) {
                if (q == p) continue;
                // f(t) = |A + t(B-A) - p|^2 - |A + t(B-A) - q|^2 = c0 + c1 t <= 0
                Rational c0 = dist2(A, p) - dist2(A, q);
                Rational c1 = 2 * ((B[0] - A[0]) * (q[0] - p[0]) + (B[1] - A[1]) * (q[1] - p[1]));
                if (c1 == 0) {
                    if (c0 > 0) {
                        empty = true;
                        break;
                    }
                } else if (c1 > 0) {
                    Rational bound = -c0 / c1;
                    if (bound < hi) hi = bound;
                } else {
                    Rational bound = -c0 / c1;
                    if (bound > lo) lo = bound;
                }
                if (lo > hi) {
                    empty = true;
                    break;
                }
            }
            if (!empty) {
                ok = true;
                break;
            }
        }
        if (ok) allowed.push_back(p);
    }
    return allowed;
}

/// Symmetric broad pass set: per-decision prediction sets from the convex
/// symmetric rationalization, joined as a product and confirmed under the
/// aggregate-level symmetric strict SARP.
std::vector<Profile> broad_pass_set(const ExperimentDesign& design) {
    const auto shapes = decision_shapes(design);
    const size_t nflat = design.subdecisions().size();

    std::vector<std::vector<std::vector<int>>> survivors; // per decision: sub-profiles
    for (const auto& s : shapes) {
        // Aggregate bundle -> splits reaching it, undominated only.
        std::map<Bundle, std::vector<std::vector<int>>> splits;
        std::vector<Bundle> undominated;
        auto agg = model::aggregate_budget(design, s.decision);
        for (size_t i = 0; i < agg.bundles.size(); ++i)
            if (agg.frontier[i]) undominated.push_back(agg.bundles[i]);
        for (long c = 0; c < s.combos; ++c) {
            auto sub = nth_combo(s, c);
            Profile p(nflat, 0);
            for (size_t k = 0; k < sub.size(); ++k) p[s.flats[k]] = sub[k];
            splits[model::aggregate_choice(design, p, s.decision)].push_back(std::move(sub));
        }
        std::vector<std::vector<int>> keep;
        for (const auto& bundle : broad_decision_predictions(undominated))
            for (const auto& sub : splits[bundle]) keep.push_back(sub);
        survivors.push_back(std::move(keep));
    }

    std::vector<Profile> pass;
    std::vector<size_t> sel(survivors.size(), 0);
    for (const auto& s : survivors)
        if (s.empty()) return pass;
    while (true) {
        Profile p(nflat, 0);
        for (size_t t = 0; t < survivors.size(); ++t) {
            const auto& sub = survivors[t][sel[t]];
            for (size_t k = 0; k < sub.size(); ++k) p[shapes[t].flats[k]] = sub[k];
        }
        if (revpref::sarp(revpref::build_bb_dataset(design, p), true, true).passed)
            pass.push_back(std::move(p));
        size_t t = 0;
        while (t < survivors.size() && ++sel[t] == survivors[t].size()) sel[t++] = 0;
        if (t == survivors.size()) break;
    }
    return pass;
}

/// Staged partial-narrow pass set: per-decision alpha masks, mask join in
/// ascending survivor order, then an early-exit full-dataset scan per
/// surviving candidate.
struct PnbCand {
    Profile p;
    std::vector<char> mask;
};

/// Stages A and B of the partial-narrow sweep: per-decision alpha masks,
/// then mask joins in ascending-survivor order. The returned candidates are
/// the profiles whose per-decision necessary conditions intersect.
std::vector<PnbCand> pnb_candidates(const ExperimentDesign& design, const AreaOptions& options) {
    const int den = options.alpha_denominator;
    const auto shapes = decision_shapes(design);
    const size_t nflat = design.subdecisions().size();

    struct Surv {
        std::vector<int> sub;
        std::vector<char> mask;
    };
    std::vector<std::vector<Surv>> surv(shapes.size());
    for (size_t t = 0; t < shapes.size(); ++t) {
        const auto& s = shapes[t];
        for (long c = 0; c < s.combos; ++c) {
            auto sub = nth_combo(s, c);
            Profile p(nflat, 0);
            for (size_t k = 0; k < sub.size(); ++k) p[s.flats[k]] = sub[k];
            pnb::PnbEvaluator ev(design, p, options.pnb, {s.decision});
            auto sc = ev.scan(den);
            if (std::any_of(sc.feasible.begin(), sc.feasible.end(), [](char x) { return x; }))
                surv[t].push_back({std::move(sub), std::move(sc.feasible)});
        }
        if (options.verbose)
            std::cerr << "pnb stage A: decision " << s.decision << " survivors "
                      << surv[t].size() << "/" << s.combos << "\n";
    }

    std::vector<size_t> order(shapes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return surv[a].size() < surv[b].size(); });

    std::vector<PnbCand> cands;
    for (const auto& sv : surv[order[0]]) {
        PnbCand c{Profile(nflat, 0), sv.mask};
        for (size_t k = 0; k < sv.sub.size(); ++k) c.p[shapes[order[0]].flats[k]] = sv.sub[k];
        cands.push_back(std::move(c));
    }
    for (size_t oi = 1; oi < order.size(); ++oi) {
        const auto& s = shapes[order[oi]];
        std::vector<PnbCand> next;
        for (const auto& c : cands)
            for (const auto& sv : surv[order[oi]]) {
                std::vector<char> m(den + 1);
                bool any = false;
                for (int k = 0; k <= den; ++k) {
                    m[k] = c.mask[k] && sv.mask[k];
                    any |= m[k];
                }
                if (!any) continue;
                PnbCand nc{c.p, std::move(m)};
                for (size_t k = 0; k < sv.sub.size(); ++k) nc.p[s.flats[k]] = sv.sub[k];
                next.push_back(std::move(nc));
            }
        cands = std::move(next);
        if (options.verbose)
            std::cerr << "pnb join: decision " << s.decision << " -> " << cands.size()
                      << " candidates\n";
    }
    return cands;
}

std::vector<Profile> pnb_pass_set(const ExperimentDesign& design, const AreaOptions& options) {
    const int den = options.alpha_denominator;
    auto cands = pnb_candidates(design, options);

    std::vector<Profile> pass;
    size_t done = 0;
    for (auto& c : cands) {
        pnb::PnbEvaluator ev(design, c.p, options.pnb);
        auto sc = ev.scan(den, &c.mask, true);
        if (std::any_of(sc.feasible.begin(), sc.feasible.end(), [](char x) { return x; }))
            pass.push_back(std::move(c.p));
        if (options.verbose && ++done % 2000 == 0)
            std::cerr << "pnb final: " << done << "/" << cands.size() << " ("
                      << pass.size() << " pass)\n";
    }
    return pass;
}

/// Induced-payoff point predictions (all argmax combinations) as profiles.
void prediction_profiles(const ExperimentDesign& design, BracketingModel bracket,
                         const Rational& alpha, std::set<Profile>& out) {
    auto preds = induced::point_predictions(design, bracket, alpha);
    const auto shapes = decision_shapes(design);
    const size_t nflat = design.subdecisions().size();
    std::vector<size_t> sel(preds.size(), 0);
    while (true) {
        Profile p(nflat, 0);
        for (size_t t = 0; t < preds.size(); ++t) {
            const auto& joint = preds[t].argmax_lines[sel[t]];
            for (size_t k = 0; k < joint.size(); ++k) p[shapes[t].flats[k]] = joint[k];
        }
        out.insert(std::move(p));
        size_t t = 0;
        while (t < preds.size() && ++sel[t] == preds[t].argmax_lines.size()) sel[t++] = 0;
        if (t == preds.size()) break;
    }
}

/// Expansion seeds for the narrow-model error areas.
///
/// At zero errors, repeated budgets must receive identical choices. For the
/// error expansion, the standalone (single-subdecision) copies of a repeated
/// budget are held at the line whose bundle is closest to the equal-split
/// diagonal, while the copies embedded in multi-subdecision decisions keep
/// varying jointly. The zero-error count is unchanged; the expansion counts
/// follow this anchoring convention.
std::vector<Profile> narrow_area_seeds(const ExperimentDesign& design,
                                       const std::vector<Profile>& pass_set) {
    if (pass_set.empty()) return pass_set;
    const auto refs = design.subdecisions();
    const size_t nflat = refs.size();

    // Group flats by identical line lists.
    std::map<std::vector<Bundle>, std::vector<size_t>> groups;
    for (size_t f = 0; f < nflat; ++f)
        groups[design.lines(refs[f].decision, refs[f].subdecision)].push_back(f);

    std::vector<int> pin(nflat, -1);
    for (const auto& [lines, flats] : groups) {
        if (flats.size() < 2) continue;
        // Allowed values this group takes across the pass set.
        std::set<int> values;
        for (const auto& p : pass_set) values.insert(p[flats.front()]);
        if (values.size() < 2) continue;
        int central = *values.begin();
        Rational best_gap;
        bool first = true;
        for (int v : values) {
            Rational gap = lines[v][0] - lines[v][1];
            if (gap < 0) gap = -gap;
            if (first || gap < best_gap) {
                best_gap = gap;
                central = v;
                first = false;
            }
        }
        for (size_t f : flats)
            if (design.decisions[refs[f].decision].subdecisions.size() == 1) pin[f] = central;
    }

    std::set<Profile> seeds;
    for (const auto& p : pass_set) {
        Profile q = p;
        for (size_t f = 0; f < nflat; ++f)
            if (pin[f] >= 0) q[f] = pin[f];
        seeds.insert(std::move(q));
    }
    return {seeds.begin(), seeds.end()};
}

uint64_t fnv1a(uint64_t h, const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) h = (h ^ p[i]) * 1099511628211ull;
    return h;
}

uint64_t fnv1a_str(uint64_t h, const std::string& s) { return fnv1a(h, s.data(), s.size()); }

/// Cache key: design content, model, alpha grid, and LP options.
uint64_t area_cache_key(const ExperimentDesign& design, BracketingModel bracket,
                        int max_errors, const AreaOptions& options) {
    uint64_t h = 14695981039346656037ull;
    h = fnv1a_str(h, model::domain_name(design.domain));
    for (const auto& ref : design.subdecisions())
        for (const auto& line : design.lines(ref.decision, ref.subdecision))
            h = fnv1a_str(h, line.to_string());
    h = fnv1a_str(h, induced::bracketing_name(bracket));
    const int params[] = {max_errors, options.alpha_denominator,
                          (int)options.pnb.mode, (int)options.pnb.alpha_weight,
                          (int)options.pnb.symmetry, (int)options.pnb.enrich_grid};
    h = fnv1a(h, params, sizeof(params));
    return h;
}

constexpr uint32_t kCacheMagic = 0x424C4131; // "BLA1"

bool load_area_cache(const std::string& path, uint64_t key, AreaResult& out,
                     const ProfileCodec& codec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    uint32_t magic = 0;
    uint64_t file_key = 0;
    uint32_t ncounts = 0;
    uint64_t npass = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof magic);
    in.read(reinterpret_cast<char*>(&file_key), sizeof file_key);
    if (!in || magic != kCacheMagic || file_key != key) return false;
    in.read(reinterpret_cast<char*>(&ncounts), sizeof ncounts);
    if (!in || ncounts > 64) return false;
    out.counts.assign(ncounts, 0);
    in.read(reinterpret_cast<char*>(out.counts.data()), ncounts * sizeof(long long));
    in.read(reinterpret_cast<char*>(&npass), sizeof npass);
    if (!in) return false;
    std::vector<uint64_t> keys(npass);
    in.read(reinterpret_cast<char*>(keys.data()), (std::streamsize)(npass * sizeof(uint64_t)));
    if (!in) return false;
    out.pass_set.clear();
    out.pass_set.reserve(keys.size());
    for (uint64_t k : keys) out.pass_set.push_back(codec.unpack(k));
    return true;
}

void save_area_cache(const std::string& path, uint64_t key, const AreaResult& r,
                     const ProfileCodec& codec) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return;
        uint32_t ncounts = (uint32_t)r.counts.size();
        uint64_t npass = r.pass_set.size();
        out.write(reinterpret_cast<const char*>(&kCacheMagic), sizeof kCacheMagic);
        out.write(reinterpret_cast<const char*>(&key), sizeof key);
        out.write(reinterpret_cast<const char*>(&ncounts), sizeof ncounts);
        out.write(reinterpret_cast<const char*>(r.counts.data()),
                  ncounts * sizeof(long long));
        out.write(reinterpret_cast<const char*>(&npass), sizeof npass);
        for (const auto& p : r.pass_set) {
            uint64_t k = codec.pack(p);
            out.write(reinterpret_cast<const char*>(&k), sizeof k);
        }
        if (!out) return;
    }
    std::rename(tmp.c_str(), path.c_str());
}

} // namespace

std::vector<Profile> model_pass_set(const ExperimentDesign& design, BracketingModel bracket,
                                    const AreaOptions& options) {
    std::vector<Profile> pass;
    if (design.domain == Domain::shopping) {
        std::set<Profile> set;
        if (bracket == BracketingModel::pnb) {
            for (int k = 0; k <= options.alpha_denominator; ++k)
                prediction_profiles(design, bracket,
                                    Rational(k, options.alpha_denominator), set);
        } else {
            prediction_profiles(design, bracket, Rational(1), set);
        }
        pass.assign(set.begin(), set.end());
    } else if (bracket == BracketingModel::pnb) {
        pass = pnb_pass_set(design, options);
    } else if (bracket == BracketingModel::narrow) {
        pass = narrow_pass_set(design);
    } else {
        pass = broad_pass_set(design);
    }
    ProfileCodec codec(design);
    std::sort(pass.begin(), pass.end(),
              [&](const Profile& a, const Profile& b) { return codec.pack(a) < codec.pack(b); });
    return pass;
}

PnbGridCounts pnb_grid_sensitivity(const ExperimentDesign& design, const AreaOptions& options) {
    if (options.alpha_denominator % 20 != 0)
        throw std::invalid_argument("grid sensitivity needs a denominator divisible by 20");
    const int den = options.alpha_denominator;
    auto cands = pnb_candidates(design, options);

    PnbGridCounts out;
    size_t done = 0;
    for (auto& c : cands) {
        pnb::PnbEvaluator ev(design, c.p, options.pnb);
        // nested grids: pass at {k/10} implies pass at {k/20} implies {k/100},
        // so each finer tier only scans the points the coarser ones skipped
        auto tier = [&](int keep_mod, int skip_mod) {
            std::vector<char> m(den + 1, 0);
            bool any = false;
            for (int k = 0; k <= den; ++k) {
                m[k] = c.mask[k] && k % keep_mod == 0 && (skip_mod == 0 || k % skip_mod != 0);
                any |= m[k];
            }
            if (!any) return false;
            auto sc = ev.scan(den, &m, true);
            return std::any_of(sc.feasible.begin(), sc.feasible.end(),
                               [](char x) { return (bool)x; });
        };
        const bool in10 = tier(den / 10, 0);
        const bool in20 = in10 || tier(den / 20, den / 10);
        const bool full = in20 || tier(1, den / 20);
        out.at_coarse += in10;
        out.at_medium += in20;
        out.at_full += full;
        if (full) out.pass_set.push_back(c.p);
        if (options.verbose && ++done % 2000 == 0)
            std::cerr << "pnb sensitivity: " << done << "/" << cands.size() << " ("
                      << out.at_full << " pass)\n";
    }
    ProfileCodec codec(design);
    std::sort(out.pass_set.begin(), out.pass_set.end(),
              [&](const Profile& a, const Profile& b) { return codec.pack(a) < codec.pack(b); });
    return out;
}

AreaResult predictive_area(const ExperimentDesign& design, BracketingModel bracket,
                           int max_errors, const AreaOptions& options) {
    AreaResult out;
    out.model = bracket;
    ProfileCodec codec(design);
    const uint64_t key = area_cache_key(design, bracket, max_errors, options);
    if (!options.cache_path.empty() && load_area_cache(options.cache_path, key, out, codec)) {
        out.from_cache = true;
        return out;
    }
    out.pass_set = model_pass_set(design, bracket, options);
    const auto& seeds = (bracket == BracketingModel::narrow && design.domain != Domain::shopping)
                            ? narrow_area_seeds(design, out.pass_set)
                            : out.pass_set;
    out.counts = ball_count(design, seeds, max_errors).counts;
    if (!options.cache_path.empty()) save_area_cache(options.cache_path, key, out, codec);
    return out;
}

struct PnbMembership::Impl {
    ExperimentDesign design;
    AreaOptions options;
    std::vector<DecisionShape> shapes;
    // per decision: packed sub-profile -> alpha mask (absent = no feasible alpha)
    std::vector<std::map<std::vector<int>, std::vector<char>>> masks;
};

PnbMembership::~PnbMembership() = default;
PnbMembership::PnbMembership(PnbMembership&&) noexcept = default;

PnbMembership::PnbMembership(const ExperimentDesign& design, const AreaOptions& options)
    : impl_(std::make_unique<Impl>()) {
    impl_->design = design;
    impl_->options = options;
    impl_->shapes = decision_shapes(design);
    const size_t nflat = design.subdecisions().size();
    impl_->masks.resize(impl_->shapes.size());
    for (size_t t = 0; t < impl_->shapes.size(); ++t) {
        const auto& s = impl_->shapes[t];
        for (long c = 0; c < s.combos; ++c) {
            auto sub = nth_combo(s, c);
            Profile p(nflat, 0);
            for (size_t k = 0; k < sub.size(); ++k) p[s.flats[k]] = sub[k];
            pnb::PnbEvaluator ev(design, p, options.pnb, {s.decision});
            auto sc = ev.scan(options.alpha_denominator);
            if (std::any_of(sc.feasible.begin(), sc.feasible.end(), [](char x) { return x; }))
                impl_->masks[t].emplace(std::move(sub), std::move(sc.feasible));
        }
    }
}

bool PnbMembership::passes(const Profile& profile) const {
    const auto& im = *impl_;
    model::validate_profile(im.design, profile);
    std::vector<char> mask(im.options.alpha_denominator + 1, 1);
    for (size_t t = 0; t < im.shapes.size(); ++t) {
        const auto& s = im.shapes[t];
        std::vector<int> sub(s.flats.size());
        for (size_t k = 0; k < s.flats.size(); ++k) sub[k] = profile[s.flats[k]];
        auto it = im.masks[t].find(sub);
        if (it == im.masks[t].end()) return false;
        bool any = false;
        for (size_t k = 0; k < mask.size(); ++k) {
            mask[k] = mask[k] && it->second[k];
            any |= mask[k];
        }
        if (!any) return false;
    }
    pnb::PnbEvaluator ev(im.design, profile, im.options.pnb);
    auto sc = ev.scan(im.options.alpha_denominator, &mask, true);
    return std::any_of(sc.feasible.begin(), sc.feasible.end(), [](char x) { return x; });
}

SubjectClassification selten_classify(const ExperimentDesign& design,
                                      const model::SubjectChoices& subject,
                                      const std::map<BracketingModel, AreaResult>& areas,
                                      const ClassifyOptions& options) {
    model::validate_profile(design, subject.choices);
    const long long total = total_profiles(design);

    SubjectClassification out;
    out.subject_id = subject.subject_id;

    const BracketingModel model_order[] = {BracketingModel::narrow, BracketingModel::broad,
                                           BracketingModel::pnb};
    std::string best;
    long long best_area = -1;
    int best_errors = 0;
    for (BracketingModel m : model_order) {
        auto it = areas.find(m);
        if (it == areas.end() || it->second.pass_set.empty()) continue;
        const AreaResult& area = it->second;

        ModelFit fit;
        int dist = -1;
        for (const auto& p : area.pass_set) {
            int d = errors::profile_distance(subject.choices, p);
            if (dist < 0 || d < dist) dist = d;
        }
        fit.errors = dist;
        if (dist < (int)area.counts.size()) {
            fit.area = area.counts[dist];
        } else {
            // beyond the precomputed allowances: expand until the count is
            // known or provably past the threshold
            auto ball = ball_count(design, area.pass_set, dist, options.unclassified_threshold);
            if (!ball.truncated && dist < (int)ball.counts.size()) fit.area = ball.counts[dist];
        }
        fit.rationalizes = fit.area >= 0 && fit.area <= options.unclassified_threshold;
        if (fit.area >= 0)
            fit.selten_score = 1.0 - static_cast<double>(fit.area) / static_cast<double>(total);
        out.fits[induced::bracketing_name(m)] = fit;

        if (!fit.rationalizes) continue;
        if (best.empty() || fit.area < best_area) {
            best = induced::bracketing_name(m);
            best_area = fit.area;
            best_errors = fit.errors;
        } else if (fit.area == best_area) {
            out.tie_broken = true; // equal score: fewer errors, then list order
            if (fit.errors < best_errors) {
                best = induced::bracketing_name(m);
                best_errors = fit.errors;
            }
        }
    }
    out.assigned = best.empty() ? "unclassified" : best;

    if (design.domain == Domain::shopping) {
        auto ranges = induced::alpha_ranges(design, options.area.alpha_denominator);
        out.alpha = induced::estimate_alpha(design, subject.choices, ranges);
    }
    return out;
}

PairedStats secondary_stats(const std::vector<std::pair<double, double>>& first_second) {
    if (first_second.empty()) throw std::invalid_argument("secondary_stats: empty input");
    PairedStats out;
    std::vector<double> differences;
    for (const auto& [a, b] : first_second) {
        differences.push_back(a - b);
        if (a > b) ++out.positives;
        else if (a < b) ++out.negatives;
        else ++out.ties;
    }
    out.sign_p = stats::sign_test_p(out.positives, out.negatives);
    out.t = stats::paired_t(differences);
    return out;
}

} // namespace bracketlab::classify
