#include "bracketlab/pnb.hpp"

#include <algorithm>
#include <bitset>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace bracketlab::pnb {

namespace {

/// An evaluation lottery: point indices filling the narrow slots (one per
/// subdecision in ppe mode, exactly one in per_subdecision mode) plus the
/// aggregate slot.
struct Tuple {
    std::vector<int> narrow;
    int aggregate = -1;
};

using Sparse = std::vector<std::pair<int, int>>; // grid index -> coefficient

void sparse_add(std::map<int, int>& acc, int idx, int coef) {
    if ((acc[idx] += coef) == 0) acc.erase(idx);
}

Sparse to_sparse(const std::map<int, int>& acc) {
    return Sparse(acc.begin(), acc.end());
}

/// One deduplicated strict-row template. The row at mixing weight
/// alpha_narrow = a is proportional to a*U + n*(1-a)*V, where U collects the
/// narrow-slot indicator differences (chosen minus alternative), V the
/// aggregate-slot ones, and n is the narrow slot count of its observation.
struct RowTemplate {
    int n = 1;
    Sparse U, V;
    bool has_zero_alpha = false;
    Rational zero_alpha; // the unique weight where the row vanishes, if any

    bool operator<(const RowTemplate& o) const {
        return std::tie(n, U, V) < std::tie(o.n, o.U, o.V);
    }
};

} // namespace

struct PnbEvaluator::Impl {
    std::vector<Bundle> grid;
    simplex::Mat weak;       // free-disposal rows
    simplex::Mat equalities; // symmetry rows
    std::vector<RowTemplate> rows;
    PnbOptions options;

    // Symmetry quotient: the equality rows identify mirror pairs, so the
    // feasible subspace is coordinatized by orbit classes. Row templates and
    // weak rows are pre-projected there once; the per-alpha LPs then run with
    // no equality rows and no per-call projection.
    std::vector<int> class_of; // grid index -> class coordinate
    size_t n_classes = 0;
    std::vector<Sparse> Up, Vp; // row templates projected onto classes
    simplex::Mat pweak;         // projected nonzero weak rows, deduplicated

    // Grid coordinates rescaled to integers (by the common denominator of all
    // coordinates in play), so dominance tests avoid rational arithmetic.
    BigInt scale = 1;
    std::vector<std::vector<long>> gscaled;
    std::vector<std::bitset<256>> dominated_by; // [i]: the j with g[j] dominating g[i]
    std::map<std::vector<long>, std::vector<int>> mb_cache;

    int index_of(const Bundle& b) const {
        auto it = std::lower_bound(grid.begin(), grid.end(), b);
        if (it == grid.end() || !(*it == b)) throw std::logic_error("bundle not in grid");
        return static_cast<int>(it - grid.begin());
    }

    std::vector<long> scaled(const Bundle& b) const {
        std::vector<long> v(b.dim());
        for (size_t i = 0; i < b.dim(); ++i) {
            BigInt num = scale * boost::multiprecision::numerator(b[i]);
            BigInt den = boost::multiprecision::denominator(b[i]);
            if (num % den != 0) throw std::logic_error("coordinate outside the common scale");
            v[i] = (num / den).convert_to<long>();
        }
        return v;
    }

    /// Maximal grid points weakly below z (free disposal from z), memoized.
    const std::vector<int>& max_below(const Bundle& z) {
        auto zs = scaled(z);
        auto it = mb_cache.find(zs);
        if (it != mb_cache.end()) return it->second;
        std::bitset<256> below;
        for (size_t i = 0; i < gscaled.size(); ++i) {
            bool ok = true;
            for (size_t c = 0; c < zs.size(); ++c)
                if (gscaled[i][c] > zs[c]) {
                    ok = false;
                    break;
                }
            if (ok) below.set(i);
        }
        std::vector<int> maximal;
        for (size_t i = 0; i < gscaled.size(); ++i)
            if (below[i] && (dominated_by[i] & below).none()) maximal.push_back((int)i);
        return mb_cache.emplace(std::move(zs), std::move(maximal)).first->second;
    }

    /// The narrow-slot mixing weight at alpha under the configured
    /// orientation (alpha itself, or its complement).
    Rational narrow_weight(const Rational& alpha) const {
        return options.alpha_weight == PnbOptions::AlphaWeight::narrow ? alpha
                                                                       : Rational(1) - alpha;
    }

    void add_row(const Tuple& chosen, const Tuple& alt, std::set<RowTemplate>& dedupe) {
        RowTemplate r;
        r.n = static_cast<int>(chosen.narrow.size());
        std::map<int, int> u, v;
        for (int idx : chosen.narrow) sparse_add(u, idx, 1);
        for (int idx : alt.narrow) sparse_add(u, idx, -1);
        sparse_add(v, chosen.aggregate, 1);
        sparse_add(v, alt.aggregate, -1);
        r.U = to_sparse(u);
        r.V = to_sparse(v);
        if (r.U.empty() && r.V.empty()) return; // the same lottery at every weight

        // a*U[i] + n*(1-a)*V[i] = 0 for all i at a unique weight, if any
        auto coef = [&](const Sparse& s, int idx) {
            for (const auto& [j, c] : s)
                if (j == idx) return c;
            return 0;
        };
        std::set<int> support;
        for (const auto& [j, c] : r.U) support.insert(j);
        for (const auto& [j, c] : r.V) support.insert(j);
        bool first = true, consistent = true;
        Rational a0;
        for (int idx : support) {
            const long ui = coef(r.U, idx), vi = coef(r.V, idx);
            // a*(ui - n*vi) = -n*vi
            const long slope = ui - r.n * vi;
            if (slope == 0) {
                if (vi != 0) consistent = false;
                continue;
            }
            Rational cand = Rational(-r.n * vi) / Rational(slope);
            if (first) {
                a0 = cand;
                first = false;
            } else if (cand != a0) {
                consistent = false;
            }
            if (!consistent) break;
        }
        if (consistent && !first && a0 >= 0 && a0 <= 1) {
            r.has_zero_alpha = true;
            r.zero_alpha = a0;
        }
        dedupe.insert(std::move(r));
    }

    /// Numerator of each row's vanishing weight on the grid {*/den}, or -1.
    std::vector<long> zero_nums(long den) const {
        std::vector<long> nz(rows.size(), -1);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].has_zero_alpha) continue;
            Rational t = rows[r].zero_alpha * Rational(den);
            if (boost::multiprecision::denominator(t) == 1)
                nz[r] = boost::multiprecision::numerator(t).convert_to<long>();
        }
        return nz;
    }

    /// The scaled strict rows at narrow weight a = num/den (row scaling never
    /// changes feasibility). Vanishing rows are the chosen lottery itself at
    /// this weight and are skipped.
    simplex::Mat strict_rows(long num, long den, const std::vector<long>* nz = nullptr) const {
        simplex::Mat out;
        out.reserve(rows.size());
        for (size_t ri = 0; ri < rows.size(); ++ri) {
            const auto& r = rows[ri];
            if (nz ? (*nz)[ri] == num
                   : (r.has_zero_alpha && r.zero_alpha == Rational(num, den)))
                continue;
            simplex::Vec row(grid.size(), Rational(0));
            for (const auto& [j, c] : r.U) row[j] += Rational(c * num);
            for (const auto& [j, c] : r.V) row[j] += Rational((long)c * r.n * (den - num));
            out.push_back(std::move(row));
        }
        return out;
    }

    FarkasSystem assemble(const Rational& alpha) const {
        Rational a = narrow_weight(alpha);
        FarkasSystem sys;
        sys.grid = grid;
        sys.weak = weak;
        sys.equalities = equalities;
        BigInt num = boost::multiprecision::numerator(a);
        BigInt den = boost::multiprecision::denominator(a);
        sys.strict = strict_rows(num.convert_to<long>(), den.convert_to<long>());
        return sys;
    }
};

PnbEvaluator::~PnbEvaluator() = default;
PnbEvaluator::PnbEvaluator(PnbEvaluator&&) noexcept = default;

PnbEvaluator::PnbEvaluator(const ExperimentDesign& design, const Profile& profile,
                           const PnbOptions& options, const std::vector<int>& only_decisions)
    : impl_(std::make_unique<Impl>()) {
    model::validate_profile(design, profile);
    impl_->options = options;

    std::vector<int> decisions = only_decisions;
    if (decisions.empty())
        for (size_t t = 0; t < design.decisions.size(); ++t)
            decisions.push_back(static_cast<int>(t));

    // Outcome grid: supports of the chosen evaluation lotteries plus the
    // zero bundle; optionally every budget line; mirrors under symmetry.
    const size_t dim = design.lines(decisions[0], 0)[0].dim();
    std::set<Bundle> grid;
    grid.insert(Bundle(std::vector<Rational>(dim, Rational(0))));
    for (int t : decisions) {
        const auto& dec = design.decisions[t];
        for (size_t k = 0; k < dec.subdecisions.size(); ++k) {
            grid.insert(model::chosen_bundle(design, profile, t, static_cast<int>(k)));
            if (options.enrich_grid)
                for (const auto& line : design.lines(t, static_cast<int>(k)))
                    grid.insert(line);
        }
        grid.insert(model::aggregate_choice(design, profile, t));
    }
    if (options.symmetry) {
        std::set<Bundle> mirrored;
        for (const auto& b : grid)
            for (const auto& m : b.orbit()) mirrored.insert(m);
        grid = std::move(mirrored);
    }
    impl_->grid.assign(grid.begin(), grid.end());
    if (impl_->grid.size() > 200)
        throw std::logic_error("outcome grid unexpectedly large");

    // common integer scale across grid points and budget lines, so that every
    // bundle compared later (chosen, lines, aggregates) lands on it
    for (const auto& b : impl_->grid)
        for (size_t i = 0; i < b.dim(); ++i)
            impl_->scale = boost::multiprecision::lcm(
                impl_->scale, boost::multiprecision::denominator(b[i]));
    for (int t : decisions)
        for (size_t k = 0; k < design.decisions[t].subdecisions.size(); ++k)
            for (const auto& line : design.lines(t, (int)k))
                for (size_t i = 0; i < line.dim(); ++i)
                    impl_->scale = boost::multiprecision::lcm(
                        impl_->scale, boost::multiprecision::denominator(line[i]));
    for (const auto& b : impl_->grid) impl_->gscaled.push_back(impl_->scaled(b));

    const auto& g = impl_->grid;
    const auto& gs = impl_->gscaled;
    impl_->dominated_by.assign(g.size(), {});
    std::vector<std::bitset<256>> dominates_set(g.size());
    for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j) {
            if (i == j) continue;
            bool ge = true;
            for (size_t c = 0; c < gs[i].size(); ++c)
                if (gs[i][c] < gs[j][c]) {
                    ge = false;
                    break;
                }
            if (!ge) continue; // distinct grid points, so >= means dominates
            impl_->dominated_by[j].set(i);
            dominates_set[i].set(j);
        }
    // Only the cover edges of the dominance order enter as rows: longer
    // chains are conic sums of covers, so the feasible set, the Motzkin
    // certificates, and the transfer cone are all unchanged.
    for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j) {
            if (!impl_->dominated_by[j][i]) continue;
            if ((dominates_set[i] & impl_->dominated_by[j]).any()) continue;
            simplex::Vec row(g.size(), Rational(0));
            row[i] = 1;
            row[j] = -1;
            impl_->weak.push_back(std::move(row));
        }
    if (options.symmetry) {
        for (size_t i = 0; i < g.size(); ++i) {
            Bundle m = g[i].mirrored();
            if (m == g[i]) continue;
            size_t j = static_cast<size_t>(impl_->index_of(m));
            if (j <= i) continue;
            simplex::Vec row(g.size(), Rational(0));
            row[i] = 1;
            row[j] = -1;
            impl_->equalities.push_back(std::move(row));
        }
    }

    // Deviation menus. For each feasible joint choice z in a decision, the
    // reachable lotteries fill each slot with any grid point obtainable by
    // free disposal; only the maximal fillings are kept, the rest being
    // implied by the dominance rows.
    std::set<RowTemplate> dedupe;
    auto pack = [&](const Tuple& t) {
        uint64_t key = (uint64_t)t.aggregate;
        for (int idx : t.narrow) key = (key << 8) | (uint64_t)(idx + 1);
        return key;
    };

    for (int t : decisions) {
        const auto& dec = design.decisions[t];
        const size_t n = dec.subdecisions.size();
        if (n > 7) throw std::logic_error("too many subdecisions for menu packing");

        if (options.mode == PnbOptions::Mode::ppe) {
            Tuple chosen;
            for (size_t k = 0; k < n; ++k)
                chosen.narrow.push_back(
                    impl_->index_of(model::chosen_bundle(design, profile, t, (int)k)));
            std::sort(chosen.narrow.begin(), chosen.narrow.end());
            chosen.aggregate = impl_->index_of(model::aggregate_choice(design, profile, t));
            const uint64_t chosen_key = pack(chosen);

            std::unordered_set<uint64_t> seen;
            // enumerate joint choices z by mixed-radix counting
            std::vector<size_t> pick(n, 0);
            while (true) {
                Bundle agg = design.lines(t, 0)[pick[0]];
                for (size_t k = 1; k < n; ++k) agg = agg + design.lines(t, (int)k)[pick[k]];
                std::vector<const std::vector<int>*> slot_options;
                for (size_t k = 0; k < n; ++k)
                    slot_options.push_back(&impl_->max_below(design.lines(t, (int)k)[pick[k]]));
                slot_options.push_back(&impl_->max_below(agg));
                // product over slots
                std::vector<size_t> sel(n + 1, 0);
                while (true) {
                    Tuple tup;
                    for (size_t k = 0; k < n; ++k) tup.narrow.push_back((*slot_options[k])[sel[k]]);
                    std::sort(tup.narrow.begin(), tup.narrow.end());
                    tup.aggregate = (*slot_options[n])[sel[n]];
                    uint64_t key = pack(tup);
                    if (key != chosen_key && seen.insert(key).second)
                        impl_->add_row(chosen, tup, dedupe);
                    size_t s = 0;
                    while (s <= n && ++sel[s] == slot_options[s]->size()) sel[s++] = 0;
                    if (s > n) break;
                }
                size_t k = 0;
                while (k < n && ++pick[k] == design.lines(t, (int)k).size()) pick[k++] = 0;
                if (k == n) break;
            }
        } else {
            for (size_t k = 0; k < n; ++k) {
                Bundle rest(std::vector<Rational>(dim, Rational(0)));
                for (size_t j = 0; j < n; ++j)
                    if (j != k) rest = rest + model::chosen_bundle(design, profile, t, (int)j);
                Bundle mine = model::chosen_bundle(design, profile, t, (int)k);
                Tuple chosen;
                chosen.narrow = {impl_->index_of(mine)};
                chosen.aggregate = impl_->index_of(mine + rest);
                const uint64_t chosen_key = pack(chosen);

                std::unordered_set<uint64_t> seen;
                for (const auto& line : design.lines(t, (int)k)) {
                    auto below_narrow = impl_->max_below(line);
                    auto below_agg = impl_->max_below(line + rest);
                    for (int yn : below_narrow)
                        for (int ya : below_agg) {
                            Tuple tup;
                            tup.narrow = {yn};
                            tup.aggregate = ya;
                            uint64_t key = pack(tup);
                            if (key != chosen_key && seen.insert(key).second)
                                impl_->add_row(chosen, tup, dedupe);
                        }
                }
            }
        }
    }
    impl_->rows.assign(dedupe.begin(), dedupe.end());

    // Orbit classes. The equality rows identify each grid point with its
    // mirror image, so the feasible subspace is coordinatized by one value per
    // orbit; a dot product against any lifted utility equals the dot of the
    // class-summed row against the class values. Projecting the templates and
    // the weak rows here, once, lets every scan-time LP run with no equality
    // rows at all.
    auto& im = *impl_;
    im.class_of.assign(g.size(), -1);
    int nc = 0;
    for (size_t i = 0; i < g.size(); ++i) {
        if (im.class_of[i] >= 0) continue;
        im.class_of[i] = nc;
        if (options.symmetry) {
            Bundle m = g[i].mirrored();
            if (!(m == g[i])) im.class_of[im.index_of(m)] = nc;
        }
        ++nc;
    }
    im.n_classes = static_cast<size_t>(nc);
    auto project_sparse = [&](const Sparse& s) {
        std::map<int, int> acc;
        for (const auto& [j, c] : s) sparse_add(acc, im.class_of[j], c);
        return to_sparse(acc);
    };
    for (const auto& r : im.rows) {
        im.Up.push_back(project_sparse(r.U));
        im.Vp.push_back(project_sparse(r.V));
    }
    std::set<std::pair<int, int>> edges;
    for (const auto& w : im.weak) {
        int pi = -1, pj = -1;
        for (size_t c = 0; c < w.size(); ++c) {
            if (w[c] == 1)
                pi = im.class_of[c];
            else if (w[c] == -1)
                pj = im.class_of[c];
        }
        if (pi != pj) edges.insert({pi, pj});
    }
    for (const auto& [pi, pj] : edges) {
        simplex::Vec row(im.n_classes, Rational(0));
        row[pi] = 1;
        row[pj] = -1;
        im.pweak.push_back(std::move(row));
    }
}

FarkasSystem PnbEvaluator::system(const Rational& alpha) const {
    return impl_->assemble(alpha);
}

bool PnbEvaluator::feasible(const Rational& alpha) const {
    auto sys = impl_->assemble(alpha);
    if (sys.strict.empty()) return true; // no data points at this weight
    return simplex::strict_feasibility(sys.strict, sys.weak, sys.equalities, sys.grid.size(),
                                       impl_->options.strategy)
        .feasible;
}

ScanOutcome PnbEvaluator::scan(int denominator, const std::vector<char>* allowed,
                               bool early_exit) const {
    if (denominator < 1) throw std::invalid_argument("alpha grid denominator must be >= 1");
    const auto& im = *impl_;
    const bool narrow_orient = im.options.alpha_weight == PnbOptions::AlphaWeight::narrow;

    ScanOutcome out;
    out.feasible.assign(denominator + 1, 0);
    std::vector<char> determined(denominator + 1, 0);
    if (allowed) {
        if ((int)allowed->size() != denominator + 1)
            throw std::invalid_argument("allowed mask size mismatch");
        for (int k = 0; k <= denominator; ++k)
            if (!(*allowed)[k]) determined[k] = 1;
    }

    const std::vector<long> nz = im.zero_nums(denominator);

    // The class-space strict rows at narrow weight num/den; vanishing rows
    // are the chosen lottery itself there and are skipped.
    auto strict_at = [&](long num, long den) {
        simplex::Mat out;
        out.reserve(im.rows.size());
        for (size_t ri = 0; ri < im.rows.size(); ++ri) {
            if (nz[ri] == num) continue;
            simplex::Vec row(im.n_classes, Rational(0));
            const long f = (long)im.rows[ri].n * (den - num);
            for (const auto& [j, c] : im.Up[ri]) row[j] += Rational(c * num);
            for (const auto& [j, c] : im.Vp[ri]) row[j] += Rational(c * f);
            out.push_back(std::move(row));
        }
        return out;
    };

    // Probe the endpoints (pure narrow / pure broad) first, then adapt: after
    // a certificate that only transfers toward larger k, probe the smallest
    // undetermined point so its transfer can sweep the rest, and vice versa.
    auto pick = [&](bool low) {
        if (low) {
            for (int k = 0; k <= denominator; ++k)
                if (!determined[k]) return k;
        } else {
            for (int k = denominator; k >= 0; --k)
                if (!determined[k]) return k;
        }
        return -1;
    };
    // When only existence is asked, probe the median undetermined point
    // instead: feasible weights cluster in an interval away from the
    // endpoints, so a hit usually comes on the first try.
    auto pick_median = [&]() {
        std::vector<int> open;
        for (int k = 0; k <= denominator; ++k)
            if (!determined[k]) open.push_back(k);
        return open.empty() ? -1 : open[open.size() / 2];
    };
    bool prefer_low = false;
    int probe_count = 0;
    while (true) {
        int k = -1;
        if (early_exit)
            k = pick_median();
        else if (probe_count == 0 && !determined[denominator])
            k = denominator;
        else if (probe_count <= 1 && !determined[0])
            k = 0;
        else
            k = pick(prefer_low);
        if (k < 0) break;
        ++probe_count;
        // narrow weight a = num/den at this grid point
        const long num = narrow_orient ? k : denominator - k;
        const long den = denominator;

        auto strict = strict_at(num, den);
        if (strict.empty()) { // no data points at this weight
            out.feasible[k] = 1;
            determined[k] = 1;
            if (early_exit) return out;
            continue;
        }
        auto res = simplex::strict_feasibility(strict, im.pweak, {}, im.n_classes,
                                               im.options.strategy);
        if (res.feasible) {
            // The separator u settles every grid point where each present row
            // keeps a positive value. f_r(m) = m*x_r + n_r*(den-m)*y_r is
            // linear in the weight numerator m, so each row contributes an
            // integer interval of valid m, closed at a root exactly when the
            // row vanishes (and so drops out) there.
            auto floordiv = [](const BigInt& a, const BigInt& b) { // b > 0
                BigInt q = a / b;
                if (a % b != 0 && a < 0) q -= 1;
                return q;
            };
            long lo = 0, hi = den;
            for (size_t r = 0; r < im.rows.size() && lo <= hi; ++r) {
                Rational xr(0), yr(0);
                for (const auto& [j, c] : im.Up[r]) xr += Rational(c) * res.u[j];
                for (const auto& [j, c] : im.Vp[r]) yr += Rational(c) * res.u[j];
                // positivity is invariant to the common positive rescaling
                BigInt x = boost::multiprecision::numerator(xr) *
                           boost::multiprecision::denominator(yr);
                BigInt y = boost::multiprecision::numerator(yr) *
                           boost::multiprecision::denominator(xr);
                const long n = im.rows[r].n;
                BigInt s = x - n * y; // f(m) = m*s + c0
                BigInt c0 = BigInt(n) * den * y;
                if (s == 0) {
                    if (c0 > 0) continue; // valid at every weight
                    // valid only where the row itself vanishes
                    if (nz[r] >= 0) {
                        lo = std::max(lo, nz[r]);
                        hi = std::min(hi, nz[r]);
                    } else {
                        lo = 1;
                        hi = 0;
                    }
                    continue;
                }
                if (s > 0) { // valid m > -c0/s
                    BigInt q = floordiv(-c0, s);
                    BigInt L = (s * q == -c0 && nz[r] == q) ? q : q + 1;
                    if (L > lo) lo = L > den ? den + 1 : L.convert_to<long>();
                } else { // valid m < c0/(-s)
                    BigInt q = floordiv(c0, -s);
                    BigInt U = ((-s) * q == c0 && nz[r] == q) ? q : ((-s) * q == c0 ? q - 1 : q);
                    if (U < hi) hi = U < 0 ? -1 : U.convert_to<long>();
                }
            }
            for (int k2 = 0; k2 <= denominator; ++k2) {
                if (determined[k2]) continue;
                const long m = narrow_orient ? k2 : denominator - k2;
                if (m >= lo && m <= hi) {
                    out.feasible[k2] = 1;
                    determined[k2] = 1;
                }
            }
            if (!out.feasible[k])
                throw std::logic_error("separator rejected at its own grid point");
            if (early_exit) return out;
        } else {
            determined[k] = 1;
            // One Motzkin certificate can settle whole sides of the grid.
            // Moving from k to k' shifts the weighted strict combination by
            // (k' - k) * S with S = sum_r phi_r * d(row_r)/dk; when -S stays
            // inside cone(weak) + span(equalities) the same weights certify
            // every k' > k, and symmetrically +S covers every k' < k. Grid
            // points where a weighted row vanishes leave the certificate
            // short a row, so they stay undetermined and get solved directly.
            const auto& phi = res.strict_weights;
            simplex::Vec d(im.n_classes, Rational(0));
            std::set<int> shielded;
            size_t ri = 0;
            for (size_t r = 0; r < im.rows.size(); ++r) {
                const auto& row = im.rows[r];
                if (nz[r] == num) continue; // was skipped when building the system
                const Rational& w = phi[ri++];
                if (w == 0) continue;
                for (const auto& [j, c] : im.Up[r]) d[j] += w * Rational(c);
                for (const auto& [j, c] : im.Vp[r]) d[j] -= w * Rational((long)c * row.n);
                if (nz[r] >= 0) {
                    long k2 = narrow_orient ? nz[r] : den - nz[r];
                    if (k2 >= 0 && k2 <= denominator) shielded.insert((int)k2);
                }
            }
            if (!narrow_orient)
                for (auto& x : d) x = -x; // d(num)/dk = -1 under this orientation

            simplex::Vec nd(d.size());
            for (size_t i = 0; i < d.size(); ++i) nd[i] = -d[i];
            const bool right = simplex::in_cone(im.pweak, nd);
            const bool left = simplex::in_cone(im.pweak, d);
            if (right)
                for (int k2 = k + 1; k2 <= denominator; ++k2)
                    if (!shielded.count(k2)) determined[k2] = 1;
            if (left)
                for (int k2 = 0; k2 < k; ++k2)
                    if (!shielded.count(k2)) determined[k2] = 1;
            if (left && right && shielded.empty()) out.certificate_all_infeasible = true;
            if (right && !left) prefer_low = true;
            if (left && !right) prefer_low = false;
        }
    }
    return out;
}

LarpResult larp_feasibility(const FarkasSystem& system, simplex::Strategy strategy) {
    auto r = simplex::strict_feasibility(system.strict, system.weak, system.equalities,
                                         system.grid.size(), strategy);
    LarpResult out;
    out.rationalizable = r.feasible;
    if (r.feasible) {
        out.utility = std::move(r.u);
    } else {
        out.strict_weights = std::move(r.strict_weights);
        out.weak_weights = std::move(r.weak_weights);
        out.equality_weights = std::move(r.equality_weights);
    }
    return out;
}

PnbResult pnb_test(const ExperimentDesign& design, const Profile& profile,
                   int denominator, const PnbOptions& options) {
    PnbEvaluator eval(design, profile, options);
    auto scan = eval.scan(denominator);
    PnbResult out;
    for (int k = 0; k <= denominator; ++k)
        if (scan.feasible[k])
            out.passing_alphas.push_back(std::to_string(k) + "/" + std::to_string(denominator));
    out.passed = !out.passing_alphas.empty();
    return out;
}

} // namespace bracketlab::pnb
