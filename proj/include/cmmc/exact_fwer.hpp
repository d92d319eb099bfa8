#pragma once

#include "cmmc/rational.hpp"

#include <vector>

namespace cmmc {

/// Exact finite-sample distribution theory for conformal p-values under the
/// global null (exchangeable scores, no ties). Everything here is exact
/// rational arithmetic; floats appear only through to_double() exports.

/// Joint pmf of the conformal p-value vector:
/// P(p_hat = j/(n+1)) = n!/(n+m)! * prod_k M_k(j)! for j in {1..n+1}^m,
/// where M_k counts entries equal to k.
Rational joint_pmf(int n, int m, const std::vector<int>& j);

/// Joint pmf of the ORDERED p-values: uniform on the integer order set,
/// n! m! / (n+m)! if j is nondecreasing, otherwise 0.
Rational order_pmf(int n, int m, const std::vector<int>& j);

/// Marginal pmf of the i-th smallest p-value (negative hypergeometric):
/// n!m!/(n+m)! * C(j+i-2, i-1) * C(n+m-j-i+1, m-i).
Rational marginal_order_pmf(int n, int m, int i, int j);

/// Sum_{y=1}^{n} (y+m-1)!/(y-1)! = (n+m)!/((m+1)(n-1)!); evaluates the
/// closed form and asserts it equals the direct sum.
Rational hockey_stick_sum(int n, int m);

/// r-th Bernoulli number with the B_1 = +1/2 convention (the sign that makes
/// Faulhaber's formula sum k^p from 1 to n).
Rational bernoulli_number(int r);

/// Number of grid points of {(x_1..x_m) : x_1 <= ... <= x_m,
/// x_j in {t_j+1, ..., n+1}} for nondecreasing integer thresholds
/// t_j in {0..n}, computed by the O(m^3) Faulhaber coefficient recursion.
Rational grid_polynomial(int n, const std::vector<int>& thresholds);

/// FWER under the global null for a step-up threshold sequence
/// t_j/(n+1): 1 - n!m!/(n+m)! * P_m[n+1].
Rational exact_fwer(int n, const std::vector<int>& thresholds);

/// FWER when only m0 of the m hypotheses are true nulls and the m - m0
/// alternatives always occupy the smallest order positions (worst case,
/// their p-values sit below every threshold): the null at sorted position i
/// faces threshold t_{i + m - m0}, so this reduces to exact_fwer over the
/// shifted threshold subsequence.
Rational exact_fwer_partial_nulls(int n, int m, int m0, const std::vector<int>& thresholds);

/// Integer thresholds floor(tau_j * (n+1)) for the named procedures.
std::vector<int> hochberg_thresholds(int n, int m, double alpha);
std::vector<int> sidak_thresholds(int n, int m, double alpha, double m0_hat);

/// Closed-form Sidak FWER: with t = floor((1-(1-alpha)^(1/m))(n+1)),
/// FWER = 1 - n!/(n+m)! * prod_{k=0}^{m-1} (n+1-t+k).  Always <= alpha and
/// approaches alpha as n grows.
Rational sidak_exact_fwer(int n, int m, double alpha);

/// Sharpest constant threshold on the p-value lattice: the largest integer t
/// such that P(p_(1) <= t/(n+1)) <= floor(alpha(n+1))/(n+1), from cumulative
/// sums of the negative-hypergeometric marginal of the minimum. Returns
/// t_hat*(n+1) as an integer; for m = 1 this is the classical Monte Carlo
/// cutoff floor(alpha(n+1)).
int sidak_sharp_threshold(int n, int m, double alpha);

/// P(p_(1) <= t/(n+1)) for integer t, exact.
Rational min_pvalue_cdf(int n, int m, int t);

/// Evaluates the joint pmf at n=2, m=3 for x=(2,2,2), y=(1,3,1) and their
/// componentwise min/max; true iff f(x) f(y) > f(min) f(max), i.e. iff the
/// conformal p-values violate MTP2.
bool mtp2_counterexample_check();

} // namespace cmmc
