#include "cmmc/envelopes.hpp"

#include "cmmc/pattern_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace cmmc {

namespace {

// c_i = #{j : s_j preceq s_i} for all i, via one lexicographic sort of the
// sorted-u vectors; equal vectors share the count of their group's last
// member.
std::vector<long> preceq_counts(const std::vector<ErlScore>& scores) {
    const std::size_t k = scores.size();
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return scores[a].sorted_u < scores[b].sorted_u;
    });
    std::vector<long> counts(k, 0);
    std::size_t pos = 0;
    while (pos < k) {
        std::size_t end = pos + 1;
        while (end < k && scores[idx[end]].sorted_u == scores[idx[pos]].sorted_u) ++end;
        for (std::size_t t = pos; t < end; ++t) counts[idx[t]] = static_cast<long>(end);
        pos = end;
    }
    return counts;
}

} // namespace

int critical_rank(const std::vector<ErlScore>& scores, double alpha) {
    const std::size_t k_total = scores.size();
    if (k_total < 2) throw std::invalid_argument("critical_rank: need at least 2 curves");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("critical_rank: alpha must be in (0,1)");

    std::vector<long> counts = preceq_counts(scores);
    std::sort(counts.begin(), counts.end());
    const double budget = alpha * static_cast<double>(k_total);
    int best = 1;
    for (std::size_t k = 1; k <= k_total; ++k) {
        const auto below = std::lower_bound(counts.begin(), counts.end(), static_cast<long>(k)) -
                           counts.begin();
        if (static_cast<double>(below) <= budget + 1e-12) best = static_cast<int>(k);
    }
    return best;
}

Envelope rank_envelope(const std::vector<CurveStatistic>& curves, int k) {
    if (curves.empty()) throw std::invalid_argument("rank_envelope: empty curve set");
    const std::size_t k_total = curves.size();
    if (k < 1 || static_cast<std::size_t>(2 * k) > k_total + 1)
        throw std::invalid_argument("rank_envelope: need 1 <= k <= ceil(K/2)");
    const ValueMatrix rows = curves_to_matrix(curves);
    const std::size_t m = rows[0].size();

    Envelope env{curves[0].grid, std::vector<double>(m), std::vector<double>(m), 0.0, k};
    std::vector<double> column(k_total);
    for (std::size_t t = 0; t < m; ++t) {
        for (std::size_t i = 0; i < k_total; ++i) column[i] = rows[i][t];
        std::sort(column.begin(), column.end());
        env.lower[t] = column[static_cast<std::size_t>(k - 1)];
        env.upper[t] = column[k_total - static_cast<std::size_t>(k)];
    }
    return env;
}

Envelope erl_global_envelope(const std::vector<CurveStatistic>& curves,
                             const std::vector<ErlScore>& scores, double alpha) {
    if (curves.size() != scores.size())
        throw std::invalid_argument("erl_global_envelope: curves/scores size mismatch");
    const int k_alpha = critical_rank(scores, alpha);
    const auto counts = preceq_counts(scores);

    std::vector<CurveStatistic> kept;
    for (std::size_t i = 0; i < curves.size(); ++i)
        if (counts[i] >= k_alpha) kept.push_back(curves[i]);
    if (kept.empty())
        throw std::logic_error("erl_global_envelope: empty keep set"); // cannot happen, c_i >= 1

    Envelope env = rank_envelope(kept, 1);
    env.coverage_label = 1.0 - alpha;
    env.critical_rank = k_alpha;
    return env;
}

namespace {

std::vector<std::size_t> exit_points(const CurveStatistic& curve, const Envelope& env) {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < curve.values.size(); ++t)
        if (curve.values[t] < env.lower[t] || curve.values[t] > env.upper[t]) out.push_back(t);
    return out;
}

} // namespace

GraphicalReport single_get_report(const std::vector<CurveStatistic>& nulls,
                                  const CurveStatistic& test, double alpha) {
    if (nulls.empty()) throw std::invalid_argument("single_get_report: need null curves");
    std::vector<CurveStatistic> all = nulls;
    all.push_back(test);
    const auto scores = erl_scores(curves_to_matrix(all));

    Envelope env = erl_global_envelope(all, scores, alpha);
    std::vector<std::size_t> exits = exit_points(test, env);
    long count = 0;
    for (std::size_t i = 0; i < nulls.size(); ++i)
        if (erl_compare(scores[i], scores.back()) != ErlOrder::succeeds) ++count;
    const double p_value =
        static_cast<double>(1 + count) / static_cast<double>(nulls.size() + 1);
    const bool rejected = !exits.empty();
    const bool attainable = alpha * static_cast<double>(nulls.size() + 1) >= 1.0 - 1e-12;
    return GraphicalReport{0,        test,  std::move(env), std::move(exits),
                           rejected, p_value, alpha,        attainable};
}

std::vector<GraphicalReport> storey_bh_envelopes(const TestSetup& setup, double alpha,
                                                 double lambda) {
    const std::size_t n = setup.n(), m = setup.m();
    const PValueVector pv = conformal_pvalues_parallel(setup);
    const double lambda_snapped = snap_lambda(lambda, pv.n_effective);
    const double pi0 = storey_estimator(pv, lambda_snapped);
    const double m0_hat = pi0 * static_cast<double>(m);

    std::vector<CurveStatistic> all = setup.null_curves;
    all.insert(all.end(), setup.test_curves.begin(), setup.test_curves.end());
    const auto scores = erl_scores(curves_to_matrix(all));

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pv.p[a] < pv.p[b]; });

    std::vector<GraphicalReport> reports;
    reports.reserve(m);
    for (std::size_t rank = 0; rank < m; ++rank) {
        const std::size_t j = order[rank];
        const double t_j = static_cast<double>(rank + 1) * alpha / m0_hat;
        // the band needs a usable level in (0,1) even when t_j saturates
        const double level = std::min(std::max(t_j, 1e-12), 1.0 - 1e-12);

        Envelope env = erl_global_envelope(all, scores, level);
        env.coverage_label = 1.0 - t_j;
        std::vector<std::size_t> exits = exit_points(setup.test_curves[j], env);
        const bool rejected = !exits.empty();
        const bool attainable = t_j * static_cast<double>(n + 1) >= 1.0 - 1e-12;
        reports.push_back(GraphicalReport{j, setup.test_curves[j], std::move(env),
                                          std::move(exits), rejected, pv.p[j], t_j, attainable});
    }
    std::sort(reports.begin(), reports.end(),
              [](const GraphicalReport& a, const GraphicalReport& b) {
                  return a.test_index < b.test_index;
              });
    return reports;
}

void write_envelope_csv(const GraphicalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "r,lower,upper,curve_value,exit_flag\n";
    const auto& grid = report.curve.grid;
    for (std::size_t t = 0; t < grid.size(); ++t) {
        const bool exits = std::binary_search(report.exit_indices.begin(),
                                              report.exit_indices.end(), t);
        out << format_double(grid.r[t]) << ',' << format_double(report.envelope.lower[t]) << ','
            << format_double(report.envelope.upper[t]) << ','
            << format_double(report.curve.values[t]) << ',' << (exits ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_envelope_manifest(const std::vector<GraphicalReport>& reports,
                             const std::vector<std::string>& files, const std::string& path) {
    if (files.size() != reports.size())
        throw std::invalid_argument("write_envelope_manifest: files/reports size mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "test_index,p_value,threshold,rejected,attainable,file\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        out << (r.test_index + 1) << ',' << format_double(r.p_value) << ','
            << format_double(r.threshold) << ',' << (r.rejected ? 1 : 0) << ','
            << (r.attainable ? 1 : 0) << ',' << files[i] << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace cmmc
