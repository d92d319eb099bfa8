#pragma once

#include "cmmc/conformal.hpp"
#include "cmmc/multiplicity.hpp"
#include "cmmc/ranking.hpp"
#include "cmmc/summaries.hpp"

#include <string>
#include <vector>

namespace cmmc {

struct Envelope {
    DistanceGrid grid;
    std::vector<double> lower, upper;
    double coverage_label;  // 1 - alpha (or 1 - t_j for the multi-envelope)
    int critical_rank;
};

/// k_alpha = max{k : #{i : #{j : s_j preceq s_i} < k} <= alpha * K} over the
/// K score vectors; always in [1, K].
int critical_rank(const std::vector<ErlScore>& scores, double alpha);

/// Pointwise order-statistic band: lower = k-th smallest curve value at each
/// r, upper = k-th largest. Requires 1 <= k <= ceil(K/2).
Envelope rank_envelope(const std::vector<CurveStatistic>& curves, int k);

/// Global ERL envelope: the pointwise min/max hull of the curves that remain
/// after discarding the ERL-most-extreme ones (those with fewer than
/// k_alpha curves preceq them). For tie-free scores, a curve exits this band
/// somewhere iff its ERL conformal p-value is <= alpha, which is what gives
/// the test its graphical reading.
Envelope erl_global_envelope(const std::vector<CurveStatistic>& curves,
                             const std::vector<ErlScore>& scores, double alpha);

struct GraphicalReport {
    std::size_t test_index = 0;     // 0-based position in the test sample
    CurveStatistic curve;
    Envelope envelope;
    std::vector<std::size_t> exit_indices; // grid indices strictly outside the band
    bool rejected = false;          // exit set non-empty
    double p_value = 1.0;
    double threshold = 0.0;         // threshold this test point was compared to
    bool attainable = true;         // false when threshold < 1/(n+1)
};

/// Single global envelope test of one test curve against n null curves at
/// level alpha; the envelope is built over the n+1 curves.
GraphicalReport single_get_report(const std::vector<CurveStatistic>& nulls,
                                  const CurveStatistic& test, double alpha);

/// Storey-BH multi-envelope report: parallel ERL conformal p-values,
/// Storey-BH decisions, and for the test point with the j-th smallest
/// p-value an envelope at coverage 1 - t_j (t_j = j alpha / m0_hat) built
/// over all n+m curves under the joint ranking.
std::vector<GraphicalReport> storey_bh_envelopes(const TestSetup& setup, double alpha,
                                                 double lambda);

/// Per-test CSV: r,lower,upper,curve_value,exit_flag.
void write_envelope_csv(const GraphicalReport& report, const std::string& path);

/// Manifest CSV: test_index,p_value,threshold,rejected,attainable,file.
void write_envelope_manifest(const std::vector<GraphicalReport>& reports,
                             const std::vector<std::string>& files, const std::string& path);

} // namespace cmmc
