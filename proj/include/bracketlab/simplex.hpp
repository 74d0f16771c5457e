#pragma once

#include "bracketlab/rational.hpp"

#include <vector>

namespace bracketlab::simplex {

using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>; // row-major

/// Basis of {x : rows * x = 0}, by exact reduced row echelon form.
/// Each returned vector has dimension = column count of `rows`.
Mat nullspace(const Mat& rows, size_t dim);

/// Solves A x = b exactly. Returns false when inconsistent.
bool solve_linear(Mat A, Vec b, Vec& x);

/// Outcome of the homogeneous strict-feasibility question
///   find u with  s . u > 0  for every strict row s,
///                w . u >= 0 for every weak row w,
///            and e . u = 0  for every equality row e.
/// Exactly one certificate is populated, and both are exact:
/// - feasible: `u` satisfies every row with exact rational arithmetic;
/// - infeasible (Motzkin transposition): nonnegative `strict_weights`
///   summing to one, nonnegative `weak_weights`, and free-signed
///   `equality_weights` combine the rows to zero.
struct StrictFeasibility {
    bool feasible = false;
    Vec u;
    Vec strict_weights;
    Vec weak_weights;
    Vec equality_weights;
};

/// Exact test whether v lies in the convex cone of the rows.
bool in_cone(const Mat& rows, const Vec& v);

enum class Strategy { hybrid, exact_only };

/// Decides strict feasibility. A fast floating-point phase-1 simplex proposes
/// the answer; the certificate is then reconstructed and verified in exact
/// rational arithmetic, with an exact Bland's-rule simplex as fallback
/// (or as the only solver under Strategy::exact_only).
StrictFeasibility strict_feasibility(const Mat& strict_rows, const Mat& weak_rows,
                                     const Mat& equality_rows, size_t dim,
                                     Strategy strategy = Strategy::hybrid);

} // namespace bracketlab::simplex
