#pragma once

#include "cmmc/ranking.hpp"
#include "cmmc/summaries.hpp"

#include <string>
#include <vector>

namespace cmmc {

/// Shared null sample and test sample of functional summary statistics.
struct TestSetup {
    std::vector<CurveStatistic> null_curves;
    std::vector<CurveStatistic> test_curves;

    TestSetup(std::vector<CurveStatistic> nulls, std::vector<CurveStatistic> tests);

    std::size_t n() const { return null_curves.size(); }
    std::size_t m() const { return test_curves.size(); }
};

enum class PValueMethod { joint_erl, parallel_erl, naive, scalar };

std::string pvalue_method_name(PValueMethod m);

/// Conformal (or naive Monte Carlo) p-values for the m test points. Values
/// live on {1/(n_eff+1), ..., 1}. tie_events counts ERL equivalences between
/// a test score and a null score; assumption A3 (no ties) is only
/// approximate for ERL, so the rate is reported rather than hidden.
struct PValueVector {
    std::vector<double> p;
    PValueMethod method;
    int n_effective;
    long tie_events = 0;

    std::size_t size() const { return p.size(); }
};

/// Joint ERL score: every curve is ranked once among all n+m curves;
/// p_j = (1 + #{i <= n : s_i preceq s_{n+j}}) / (n+1).
PValueVector conformal_pvalues_joint(const TestSetup& setup);

/// Parallel ERL score: for each test point only the n+1 curves
/// {nulls, test j} are ranked. More work, less dependence between p-values.
PValueVector conformal_pvalues_parallel(const TestSetup& setup);

/// Naive multiple Monte Carlo baseline: the null sample is split into m
/// disjoint blocks of size n/m and test j is ranked against block j only,
/// giving independent p-values with n_effective = n/m. Throws if m does not
/// divide n (trim the null sample first).
PValueVector naive_mmctest_pvalues(const std::vector<CurveStatistic>& nulls,
                                   const std::vector<CurveStatistic>& tests);

/// Scalar-score backdoor, p_j = (1 + #{i : s_i <= s_{n+j}}) / (n+1); used to
/// validate the exact finite-sample distribution theory.
PValueVector conformal_pvalues_scalar(const std::vector<double>& null_scores,
                                      const std::vector<double>& test_scores);

/// Matrix-level variants (rows = curves); the concatenated global-null test
/// feeds long curves through these.
PValueVector conformal_pvalues_joint_values(const ValueMatrix& nulls, const ValueMatrix& tests);
PValueVector conformal_pvalues_parallel_values(const ValueMatrix& nulls,
                                               const ValueMatrix& tests);

/// CSV columns: test_index,p_value,method,n_effective.
void write_pvalues_csv(const PValueVector& pv, const std::string& path);

} // namespace cmmc
