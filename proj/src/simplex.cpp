#include "bracketlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bracketlab::simplex {

namespace {

/// In-place reduced row echelon form; returns pivot column per pivot row.
std::vector<size_t> rref(Mat& m, size_t dim) {
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t col = 0; col < dim && row < m.size(); ++col) {
        size_t sel = row;
        while (sel < m.size() && m[sel][col] == 0) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[row], m[sel]);
        Rational inv = Rational(1) / m[row][col];
        for (auto& x : m[row]) x *= inv;
        for (size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col] == 0) continue;
            Rational f = m[r][col];
            for (size_t c = 0; c < m[r].size(); ++c) m[r][c] -= f * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

Mat transpose(const Mat& m, size_t dim) {
    Mat t(dim, Vec(m.size(), Rational(0)));
    for (size_t r = 0; r < m.size(); ++r)
        for (size_t c = 0; c < dim; ++c) t[c][r] = m[r][c];
    return t;
}

Rational dot(const Vec& a, const Vec& b) {
    Rational s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Phase-1 simplex for: find phi >= 0 with
///   sum_j phi_j point_j = 0  and  sum_{j < n_strict} phi_j = 1.
/// Rows are the n coordinate constraints plus the convexity row (which only
/// the first n_strict columns enter); one artificial per row.
struct Phase1Result {
    bool mass_at_zero = false; // a valid phi exists (min artificial mass == 0)
    Vec phi;                   // populated when mass_at_zero
    Vec dual;                  // populated otherwise; length n + 1
};

Phase1Result exact_phase1(const Mat& points, size_t n, size_t n_strict) {
    const size_t m = points.size();
    const size_t rows = n + 1;
    const size_t cols = m + rows + 1; // vars, artificials, rhs
    Mat t(rows, Vec(cols, Rational(0)));
    for (size_t j = 0; j < m; ++j) {
        for (size_t i = 0; i < n; ++i) t[i][j] = points[j][i];
        if (j < n_strict) t[rows - 1][j] = 1;
    }
    for (size_t i = 0; i < rows; ++i) t[i][m + i] = 1;
    t[rows - 1][cols - 1] = 1;

    std::vector<size_t> basis(rows);
    for (size_t i = 0; i < rows; ++i) basis[i] = m + i;

    auto cost = [&](size_t j) { return j >= m && j < m + rows ? Rational(1) : Rational(0); };

    Vec redcost(cols - 1);
    while (true) {
        size_t entering = cols;
        for (size_t j = 0; j < cols - 1 && entering == cols; ++j) {
            Rational rc = cost(j);
            for (size_t i = 0; i < rows; ++i)
                if (cost(basis[i]) != 0) rc -= t[i][j];
            if (rc < 0) entering = j; // Bland: first improving column
        }
        if (entering == cols) {
            for (size_t j = 0; j < cols - 1; ++j) {
                Rational rc = cost(j);
                for (size_t i = 0; i < rows; ++i)
                    if (cost(basis[i]) != 0) rc -= t[i][j];
                redcost[j] = rc;
            }
            break;
        }
        size_t leaving = rows;
        Rational best;
        for (size_t i = 0; i < rows; ++i) {
            if (t[i][entering] <= 0) continue;
            Rational ratio = t[i][cols - 1] / t[i][entering];
            if (leaving == rows || ratio < best ||
                (ratio == best && basis[i] < basis[leaving]))
                { leaving = i; best = ratio; }
        }
        if (leaving == rows) throw std::logic_error("phase-1 simplex unbounded");
        Rational piv = t[leaving][entering];
        for (auto& x : t[leaving]) x /= piv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == leaving || t[i][entering] == 0) continue;
            Rational f = t[i][entering];
            for (size_t c = 0; c < cols; ++c) t[i][c] -= f * t[leaving][c];
        }
        basis[leaving] = entering;
    }

    Rational objective = 0;
    for (size_t i = 0; i < rows; ++i)
        if (cost(basis[i]) != 0) objective += t[i][cols - 1];

    Phase1Result out;
    if (objective == 0) {
        out.mass_at_zero = true;
        out.phi.assign(m, Rational(0));
        for (size_t i = 0; i < rows; ++i)
            if (basis[i] < m) out.phi[basis[i]] = t[i][cols - 1];
    } else {
        out.dual.resize(rows);
        for (size_t i = 0; i < rows; ++i) out.dual[i] = Rational(1) - redcost[m + i];
    }
    return out;
}

/// Floating-point mirror of exact_phase1 (Dantzig rule, iteration capped).
/// ok=false means "could not decide; use the exact solver".
struct FloatPhase1 {
    bool ok = false;
    bool mass_at_zero = false;
    std::vector<size_t> basis;
    std::vector<double> dual;
};

FloatPhase1 float_phase1(const Mat& points, size_t n, size_t n_strict) {
    const size_t m = points.size();
    const size_t rows = n + 1;
    const size_t cols = m + rows + 1;
    std::vector<std::vector<double>> t(rows, std::vector<double>(cols, 0.0));
    for (size_t j = 0; j < m; ++j) {
        for (size_t i = 0; i < n; ++i) t[i][j] = rational_to_double(points[j][i]);
        if (j < n_strict) t[rows - 1][j] = 1.0;
    }
    for (size_t i = 0; i < rows; ++i) t[i][m + i] = 1.0;
    t[rows - 1][cols - 1] = 1.0;

    std::vector<size_t> basis(rows);
    for (size_t i = 0; i < rows; ++i) basis[i] = m + i;
    auto cost = [&](size_t j) { return j >= m && j < m + rows ? 1.0 : 0.0; };

    FloatPhase1 out;
    std::vector<double> redcost(cols - 1);
    const double eps = 1e-9;
    for (size_t iter = 0; iter < 20000; ++iter) {
        size_t entering = cols;
        double most = -eps;
        for (size_t j = 0; j < cols - 1; ++j) {
            double rc = cost(j);
            for (size_t i = 0; i < rows; ++i)
                if (cost(basis[i]) != 0.0) rc -= t[i][j];
            redcost[j] = rc;
            if (rc < most) { most = rc; entering = j; }
        }
        if (entering == cols) {
            double objective = 0;
            for (size_t i = 0; i < rows; ++i)
                if (cost(basis[i]) != 0.0) objective += t[i][cols - 1];
            out.ok = true;
            out.mass_at_zero = objective < 1e-7;
            out.basis = basis;
            out.dual.resize(rows);
            for (size_t i = 0; i < rows; ++i) out.dual[i] = 1.0 - redcost[m + i];
            return out;
        }
        size_t leaving = rows;
        double best = 0;
        for (size_t i = 0; i < rows; ++i) {
            if (t[i][entering] <= eps) continue;
            double ratio = t[i][cols - 1] / t[i][entering];
            if (leaving == rows || ratio < best) { leaving = i; best = ratio; }
        }
        if (leaving == rows) return out; // numerically unbounded: bail
        double piv = t[leaving][entering];
        for (auto& x : t[leaving]) x /= piv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == leaving) continue;
            double f = t[i][entering];
            if (f == 0.0) continue;
            for (size_t c = 0; c < cols; ++c) t[i][c] -= f * t[leaving][c];
        }
        basis[leaving] = entering;
    }
    return out;
}

} // namespace

Mat nullspace(const Mat& rows, size_t dim) {
    Mat m = rows;
    auto pivots = rref(m, dim);
    std::vector<bool> is_pivot(dim, false);
    for (size_t p : pivots) is_pivot[p] = true;

    Mat basis;
    for (size_t free = 0; free < dim; ++free) {
        if (is_pivot[free]) continue;
        Vec v(dim, Rational(0));
        v[free] = 1;
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

bool solve_linear(Mat A, Vec b, Vec& x) {
    const size_t dim = A.empty() ? 0 : A[0].size();
    for (size_t r = 0; r < A.size(); ++r) A[r].push_back(b[r]);
    auto pivots = rref(A, dim);
    for (size_t r = pivots.size(); r < A.size(); ++r)
        if (A[r][dim] != 0) return false;
    x.assign(dim, Rational(0));
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = A[r][dim];
    return true;
}

namespace {

/// Equality multipliers closing the certificate: psi with
/// sum phi_s strict + sum phi_w weak + sum psi eq = 0.
Vec closing_weights(const Mat& strict_rows, const Vec& phi_s, const Mat& weak_rows,
                    const Vec& phi_w, const Mat& equality_rows, size_t dim) {
    Vec target(dim, Rational(0));
    for (size_t i = 0; i < strict_rows.size(); ++i)
        if (phi_s[i] != 0)
            for (size_t c = 0; c < dim; ++c) target[c] -= phi_s[i] * strict_rows[i][c];
    for (size_t i = 0; i < weak_rows.size(); ++i)
        if (phi_w[i] != 0)
            for (size_t c = 0; c < dim; ++c) target[c] -= phi_w[i] * weak_rows[i][c];
    if (equality_rows.empty()) {
        for (const auto& v : target)
            if (v != 0) throw std::logic_error("Farkas combination does not vanish");
        return {};
    }
    Vec psi;
    if (!solve_linear(transpose(equality_rows, dim), target, psi))
        throw std::logic_error("Farkas combination outside the equality row space");
    return psi;
}

/// Best rational approximation with denominator <= max_den (continued
/// fractions). Keeps certificate arithmetic cheap.
Rational approx_rational(double x, long max_den) {
    if (!std::isfinite(x)) return Rational(0);
    bool neg = x < 0;
    double v = neg ? -x : x;
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = v;
    for (int iter = 0; iter < 64; ++iter) {
        double fl = std::floor(frac);
        if (fl > 1e17) break;
        long a = static_cast<long>(fl);
        if (q0 + a * q1 > max_den || p1 > (1L << 60) / (a > 0 ? a : 1)) break;
        long p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double rem = frac - fl;
        if (rem < 1e-12) break;
        frac = 1.0 / rem;
    }
    if (q1 == 0) return Rational(0);
    Rational r(p1, q1);
    return neg ? -r : r;
}

/// Rescales to integer entries (positive scaling preserves the system).
void normalize_integer(Vec& v) {
    BigInt lcm = 1;
    for (const auto& x : v) {
        BigInt d = denominator(x);
        lcm = lcm / gcd(lcm, d) * d;
    }
    if (lcm != 1)
        for (auto& x : v) x *= lcm;
}

bool verify_separator(const Mat& strict_rows, const Mat& weak_rows, const Vec& u) {
    for (const auto& row : strict_rows)
        if (dot(row, u) <= 0) return false;
    for (const auto& row : weak_rows)
        if (dot(row, u) < 0) return false;
    return true;
}

} // namespace

bool in_cone(const Mat& rows, const Vec& v) {
    if (std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; })) return true;
    if (rows.empty()) return false;
    Mat points;
    points.reserve(rows.size() + 1);
    Vec neg(v.size());
    for (size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
    points.push_back(std::move(neg));
    for (const auto& r : rows) points.push_back(r);
    // phi_0 = 1 on -v plus a nonnegative combination of the rows hitting zero
    return exact_phase1(points, v.size(), 1).mass_at_zero;
}

StrictFeasibility strict_feasibility(const Mat& strict_rows, const Mat& weak_rows,
                                     const Mat& equality_rows, size_t dim,
                                     Strategy strategy) {
    StrictFeasibility out;
    if (strict_rows.empty()) {
        out.feasible = true;
        out.u.assign(dim, Rational(0));
        return out;
    }

    Mat basis = equality_rows.empty() ? Mat() : nullspace(equality_rows, dim);
    const size_t n = equality_rows.empty() ? dim : basis.size();
    auto project = [&](const Vec& row) {
        if (equality_rows.empty()) return row;
        Vec v(n);
        for (size_t k = 0; k < n; ++k) v[k] = dot(row, basis[k]);
        return v;
    };

    const size_t n_strict = strict_rows.size();
    Mat points;
    points.reserve(n_strict + weak_rows.size());
    for (const auto& row : strict_rows) points.push_back(project(row));
    // Zero-projected weak rows are vacuous; keep indices of the others.
    std::vector<size_t> weak_index;
    for (size_t i = 0; i < weak_rows.size(); ++i) {
        Vec v = project(weak_rows[i]);
        if (std::any_of(v.begin(), v.end(), [](const Rational& x) { return x != 0; })) {
            weak_index.push_back(i);
            points.push_back(std::move(v));
        }
    }

    auto make_infeasible = [&](const Vec& phi_all) {
        out.feasible = false;
        out.strict_weights.assign(strict_rows.size(), Rational(0));
        out.weak_weights.assign(weak_rows.size(), Rational(0));
        for (size_t j = 0; j < n_strict; ++j) out.strict_weights[j] = phi_all[j];
        for (size_t j = 0; j < weak_index.size(); ++j)
            out.weak_weights[weak_index[j]] = phi_all[n_strict + j];
        out.equality_weights = closing_weights(strict_rows, out.strict_weights, weak_rows,
                                               out.weak_weights, equality_rows, dim);
    };

    // A strict row orthogonal to the whole feasible subspace can never be
    // positive; it alone certifies infeasibility.
    for (size_t i = 0; i < n_strict; ++i) {
        if (std::all_of(points[i].begin(), points[i].end(),
                        [](const Rational& v) { return v == 0; })) {
            Vec phi(points.size(), Rational(0));
            phi[i] = 1;
            make_infeasible(phi);
            return out;
        }
    }

    auto lift = [&](const Vec& w) {
        if (equality_rows.empty()) return w;
        Vec u(dim, Rational(0));
        for (size_t k = 0; k < n; ++k)
            for (size_t c = 0; c < dim; ++c) u[c] += w[k] * basis[k][c];
        return u;
    };

    auto fp = strategy == Strategy::hybrid ? float_phase1(points, n, n_strict)
                                           : FloatPhase1{};
    if (fp.ok) {
        if (fp.mass_at_zero) {
            // Re-solve the basic system exactly and accept if it checks out.
            std::vector<size_t> cols;
            for (size_t b : fp.basis)
                if (b < points.size()) cols.push_back(b);
            Mat sys(n + 1, Vec(cols.size(), Rational(0)));
            for (size_t j = 0; j < cols.size(); ++j) {
                for (size_t i = 0; i < n; ++i) sys[i][j] = points[cols[j]][i];
                if (cols[j] < n_strict) sys[n][j] = 1;
            }
            Vec rhs(n + 1, Rational(0));
            rhs[n] = 1;
            Vec sol;
            if (solve_linear(sys, rhs, sol) &&
                std::all_of(sol.begin(), sol.end(), [](const Rational& v) { return v >= 0; })) {
                Vec check(n, Rational(0));
                bool consistent = true;
                for (size_t j = 0; j < cols.size(); ++j)
                    for (size_t i = 0; i < n; ++i) check[i] += sol[j] * points[cols[j]][i];
                for (const auto& v : check)
                    if (v != 0) consistent = false;
                if (consistent) {
                    Vec phi(points.size(), Rational(0));
                    for (size_t j = 0; j < cols.size(); ++j) phi[cols[j]] = sol[j];
                    make_infeasible(phi);
                    return out;
                }
            }
        } else {
            // Small-denominator candidate first: far cheaper to verify.
            for (long max_den : {1000000L, -1L}) {
                Vec w(n);
                for (size_t k = 0; k < n; ++k)
                    w[k] = max_den > 0 ? approx_rational(-fp.dual[k], max_den)
                                       : Rational(-fp.dual[k]);
                normalize_integer(w);
                Vec u = lift(w);
                if (verify_separator(strict_rows, weak_rows, u)) {
                    out.feasible = true;
                    out.u = std::move(u);
                    return out;
                }
            }
        }
    }

    // Exact fallback.
    auto ex = exact_phase1(points, n, n_strict);
    if (ex.mass_at_zero) {
        make_infeasible(ex.phi);
    } else {
        Vec w(n);
        for (size_t k = 0; k < n; ++k) w[k] = -ex.dual[k];
        out.u = lift(w);
        if (!verify_separator(strict_rows, weak_rows, out.u))
            throw std::logic_error("exact separator failed verification");
        out.feasible = true;
    }
    return out;
}

} // namespace bracketlab::simplex
