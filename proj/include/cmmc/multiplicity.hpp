#pragma once

#include "cmmc/conformal.hpp"
#include "cmmc/rng.hpp"

#include <string>
#include <vector>

namespace cmmc {

enum class Procedure { bh, storey_bh, hochberg, hommel, bonferroni, sidak };

std::string procedure_name(Procedure p);
Procedure parse_procedure(const std::string& name);

/// Nondecreasing rejection thresholds on the ordered p-values.
struct ThresholdSequence {
    std::vector<double> t;

    explicit ThresholdSequence(std::vector<double> values);
    std::size_t size() const { return t.size(); }
};

/// Indices are 0-based in memory; reports and CSV output use 1-based test
/// indices.
struct RejectionSet {
    std::vector<std::size_t> rejected; // sorted ascending
    ThresholdSequence thresholds;
    Procedure procedure;

    bool contains(std::size_t index) const;
    std::size_t count() const { return rejected.size(); }
};

struct ErrorMetrics {
    long v = 0;  // false rejections
    long s = 0;  // true rejections
    long r = 0;  // total rejections
    long m0 = 0; // number of true nulls
    double fdp = 0.0;
    double tdp = 0.0;
};

/// Step-up evaluation: reject the k smallest p-values where k is the largest
/// j with p_(j) <= t_j. All procedures below reduce to this.
RejectionSet step_up(const PValueVector& p, const ThresholdSequence& thresholds,
                     Procedure label);

/// Benjamini-Hochberg at level q_star in (0,1); thresholds t_j = j q*/m.
RejectionSet bh_procedure(const PValueVector& p, double q_star);

/// Storey's estimator (1 + #{p_i > lambda}) / (m (1-lambda)). Deliberately
/// not capped at 1. For conformal p-values lambda should sit on the lattice
/// K/(n+1); a warning is emitted otherwise.
double storey_estimator(const PValueVector& p, double lambda);

/// Nearest lattice point K/(n+1), K in {1..n}.
double snap_lambda(double lambda, int n_effective);

/// BH at the data-driven level alpha / pi0_hat.
RejectionSet storey_bh(const PValueVector& p, double alpha, double lambda);

/// Hochberg step-up, thresholds t_j = alpha / (m - j + 1).
RejectionSet hochberg_procedure(const PValueVector& p, double alpha);

/// Hommel's closed-testing shortcut with Simes local tests; rejects a
/// superset of Hochberg's set.
RejectionSet hommel_procedure(const PValueVector& p, double alpha);

RejectionSet bonferroni(const PValueVector& p, double alpha, double m0_hat);

/// Threshold 1 - (1-alpha)^(1/m0_hat).
RejectionSet sidak(const PValueVector& p, double alpha, double m0_hat);

/// truth = indices (0-based) of the non-null test points.
ErrorMetrics error_metrics(const RejectionSet& rej, const std::vector<std::size_t>& truth,
                           std::size_t m);

/// Fisher combination -2 sum log p_j against the chi-square(2m) upper tail.
/// Requires independent p-values and therefore refuses anything but the
/// naive method (plain Fisher is not calibrated for dependent conformal
/// p-values).
bool global_null_fisher(const PValueVector& p, double alpha);

/// Concatenates the m test curves into one long curve, builds n/m null long
/// curves from disjoint groups (grouped after a random shuffle), and runs a
/// single ERL conformal test at level alpha.
bool global_null_concatenated_get(const TestSetup& setup, double alpha, RngStream& rng);

/// True iff the Hochberg procedure rejects at least one hypothesis.
bool global_null_hochberg(const PValueVector& p, double alpha);

/// CSV columns: test_index,p_value,threshold,rejected. The threshold column
/// holds the threshold the p-value was compared against (by sorted position).
void write_rejection_csv(const PValueVector& p, const RejectionSet& rej,
                         const std::string& path);

/// Comparison slack for p <= t on the p-value lattice; spacing is never
/// finer than 1/(n+1) so 1e-10 cannot flip a genuine inequality, but it does
/// make boundary equalities (which the exactness theorems rely on) robust to
/// floating-point rounding of j*q/m.
inline bool leq_threshold(double p, double t) { return p <= t + 1e-10; }

} // namespace cmmc
