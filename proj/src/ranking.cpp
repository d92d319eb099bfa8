#include "cmmc/ranking.hpp"

#include <algorithm>
#include <stdexcept>

namespace cmmc {

std::vector<PointwisePValues> pointwise_pvalue_matrix(const ValueMatrix& rows) {
    const std::size_t k = rows.size();
    if (k < 2) throw std::invalid_argument("pointwise ranks need at least 2 curves");
    const std::size_t m = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != m) throw std::invalid_argument("curve length mismatch");

    std::vector<PointwisePValues> out(k);
    for (auto& pw : out) pw.u.resize(m);

    std::vector<double> column(k);
    const double kd = static_cast<double>(k);
    for (std::size_t t = 0; t < m; ++t) {
        for (std::size_t i = 0; i < k; ++i) column[i] = rows[i][t];
        std::sort(column.begin(), column.end());
        for (std::size_t i = 0; i < k; ++i) {
            const double v = rows[i][t];
            const auto lo = std::lower_bound(column.begin(), column.end(), v) - column.begin();
            const auto hi = column.end() - std::upper_bound(column.begin(), column.end(), v);
            // ascending min-rank = 1 + #strictly-below, descending = 1 + #strictly-above
            const auto rank_min = 1 + std::min<std::ptrdiff_t>(lo, hi);
            out[i].u[t] = static_cast<double>(rank_min) / kd;
        }
    }
    return out;
}

std::vector<ErlScore> erl_scores(const ValueMatrix& rows) {
    auto pw = pointwise_pvalue_matrix(rows);
    std::vector<ErlScore> scores(pw.size());
    for (std::size_t i = 0; i < pw.size(); ++i) {
        scores[i].sorted_u = std::move(pw[i].u);
        std::sort(scores[i].sorted_u.begin(), scores[i].sorted_u.end());
    }
    return scores;
}

ValueMatrix curves_to_matrix(const std::vector<CurveStatistic>& curves) {
    if (curves.empty()) throw std::invalid_argument("empty curve set");
    ValueMatrix rows;
    rows.reserve(curves.size());
    for (const auto& c : curves) {
        if (!(c.grid == curves[0].grid))
            throw std::invalid_argument("curves evaluated on different grids");
        rows.push_back(c.values);
    }
    return rows;
}

PointwisePValues pointwise_pvalues(const std::vector<CurveStatistic>& curves,
                                   std::size_t target_index) {
    if (target_index >= curves.size())
        throw std::invalid_argument("target index out of range");
    auto all = pointwise_pvalue_matrix(curves_to_matrix(curves));
    return all[target_index];
}

ErlScore erl_score(const PointwisePValues& pw) {
    ErlScore s{pw.u};
    std::sort(s.sorted_u.begin(), s.sorted_u.end());
    return s;
}

ErlOrder erl_compare(const ErlScore& a, const ErlScore& b) {
    if (a.sorted_u.size() != b.sorted_u.size())
        throw std::invalid_argument("ERL scores of different length");
    for (std::size_t l = 0; l < a.sorted_u.size(); ++l) {
        if (a.sorted_u[l] < b.sorted_u[l]) return ErlOrder::precedes;
        if (a.sorted_u[l] > b.sorted_u[l]) return ErlOrder::succeeds;
    }
    return ErlOrder::equivalent;
}

} // namespace cmmc
