#pragma once

#include "cmmc/summaries.hpp"

#include <cstddef>
#include <vector>

namespace cmmc {

/// Rows are curves, columns are grid points. Scalar scores are the M = 1 case.
using ValueMatrix = std::vector<std::vector<double>>;

/// Pointwise two-sided rank p-values u(r) = R*(r) / K for one curve, where
/// R* = min(ascending rank, descending rank) among the K curves at that r
/// and tied values share the minimum (most extreme) rank.
struct PointwisePValues {
    std::vector<double> u;
};

/// Sorted (nondecreasing) vector of pointwise p-values; the ERL conformity
/// score. Smaller in the lexicographic order means more extreme.
struct ErlScore {
    std::vector<double> sorted_u;
};

enum class ErlOrder { precedes, equivalent, succeeds };

/// u-values for every row of the matrix; O(M K log K).
std::vector<PointwisePValues> pointwise_pvalue_matrix(const ValueMatrix& rows);

std::vector<ErlScore> erl_scores(const ValueMatrix& rows);

/// Extracts values from curves sharing one grid and kind; throws on mismatch.
ValueMatrix curves_to_matrix(const std::vector<CurveStatistic>& curves);

PointwisePValues pointwise_pvalues(const std::vector<CurveStatistic>& curves,
                                   std::size_t target_index);

ErlScore erl_score(const PointwisePValues& pw);

/// Lexicographic comparison of the sorted vectors; `equivalent` iff equal.
ErlOrder erl_compare(const ErlScore& a, const ErlScore& b);

/// a precedes-or-equivalent b.
inline bool erl_preceq(const ErlScore& a, const ErlScore& b) {
    return erl_compare(a, b) != ErlOrder::succeeds;
}

} // namespace cmmc
