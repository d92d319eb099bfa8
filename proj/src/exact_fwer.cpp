#include "cmmc/exact_fwer.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace cmmc {

namespace {

void check_nm(int n, int m) {
    if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 and m >= 1");
}

Rational uniform_order_mass(int n, int m) {
    // n! m! / (n+m)!
    return Rational::factorial(static_cast<unsigned long>(n)) *
           Rational::factorial(static_cast<unsigned long>(m)) /
           Rational::factorial(static_cast<unsigned long>(n + m));
}

void check_thresholds(int n, const std::vector<int>& t) {
    if (t.empty()) throw std::invalid_argument("empty threshold sequence");
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (t[j] < 0 || t[j] > n) throw std::invalid_argument("threshold out of {0..n}");
        if (j > 0 && t[j] < t[j - 1])
            throw std::invalid_argument("thresholds must be nondecreasing");
    }
}

} // namespace

Rational joint_pmf(int n, int m, const std::vector<int>& j) {
    check_nm(n, m);
    if (static_cast<int>(j.size()) != m) throw std::invalid_argument("joint_pmf: |j| != m");
    std::vector<int> counts(static_cast<std::size_t>(n) + 2, 0);
    for (const int v : j) {
        if (v < 1 || v > n + 1) throw std::invalid_argument("joint_pmf: entry out of {1..n+1}");
        ++counts[static_cast<std::size_t>(v)];
    }
    Rational prod(1);
    for (int k = 1; k <= n + 1; ++k)
        prod *= Rational::factorial(static_cast<unsigned long>(counts[static_cast<std::size_t>(k)]));
    return Rational::factorial(static_cast<unsigned long>(n)) /
           Rational::factorial(static_cast<unsigned long>(n + m)) * prod;
}

Rational order_pmf(int n, int m, const std::vector<int>& j) {
    check_nm(n, m);
    if (static_cast<int>(j.size()) != m) throw std::invalid_argument("order_pmf: |j| != m");
    for (const int v : j)
        if (v < 1 || v > n + 1) throw std::invalid_argument("order_pmf: entry out of {1..n+1}");
    if (!std::is_sorted(j.begin(), j.end())) return Rational(0);
    return uniform_order_mass(n, m);
}

Rational marginal_order_pmf(int n, int m, int i, int j) {
    check_nm(n, m);
    if (i < 1 || i > m) throw std::invalid_argument("marginal_order_pmf: i out of {1..m}");
    if (j < 1 || j > n + 1)
        throw std::invalid_argument("marginal_order_pmf: j out of {1..n+1}");
    return uniform_order_mass(n, m) *
           Rational::binomial(static_cast<unsigned long>(j + i - 2),
                              static_cast<unsigned long>(i - 1)) *
           Rational::binomial(static_cast<unsigned long>(n + m - j - i + 1),
                              static_cast<unsigned long>(m - i));
}

Rational hockey_stick_sum(int n, int m) {
    if (n < 1 || m < 0) throw std::invalid_argument("hockey_stick_sum: need n >= 1, m >= 0");
    const Rational closed = Rational::factorial(static_cast<unsigned long>(n + m)) /
                            (Rational(m + 1) * Rational::factorial(static_cast<unsigned long>(n - 1)));
    Rational direct(0);
    for (int y = 1; y <= n; ++y)
        direct += Rational::factorial(static_cast<unsigned long>(y + m - 1)) /
                  Rational::factorial(static_cast<unsigned long>(y - 1));
    if (direct != closed)
        throw std::logic_error("hockey_stick_sum: identity check failed");
    return closed;
}

Rational bernoulli_number(int r) {
    if (r < 0) throw std::invalid_argument("bernoulli_number: r >= 0");
    static std::vector<Rational> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    if (cache.empty()) {
        cache.push_back(Rational(1));        // B_0
        cache.push_back(Rational(1, 2));     // B_1, plus-half convention
    }
    // standard recurrence for the B_1 = -1/2 convention; only B_1 differs
    while (static_cast<int>(cache.size()) <= r) {
        const int k = static_cast<int>(cache.size());
        Rational acc(0);
        for (int i = 0; i < k; ++i) {
            Rational b = (i == 1) ? Rational(-1, 2) : cache[static_cast<std::size_t>(i)];
            acc += Rational::binomial(static_cast<unsigned long>(k + 1),
                                      static_cast<unsigned long>(i)) * b;
        }
        cache.push_back(-acc / Rational(k + 1));
    }
    return cache[static_cast<std::size_t>(r)];
}

namespace {

// One step of the coefficient recursion: from coefficients of P_{m-1} to
// those of P_m[x] = sum_{y = t+1}^{x} P_{m-1}[y], using Faulhaber's formula
// sum_{k=1}^{x} k^p = 1/(p+1) sum_{r=0}^{p} C(p+1, r) B_r x^{p+1-r}
// with the B_1 = +1/2 convention.
std::vector<Rational> recursion_step(const std::vector<Rational>& coeff, int t) {
    const std::size_t deg = coeff.size(); // P_{m-1} has coefficients a_0..a_{deg-1}
    std::vector<Rational> next(deg + 1, Rational(0));
    for (std::size_t j = 0; j < deg; ++j) {
        const Rational scale = coeff[j] / Rational(static_cast<long>(j) + 1);
        // powers i = j+1-r for r = 0..j
        for (std::size_t r = 0; r <= j; ++r) {
            const Rational term = scale *
                Rational::binomial(static_cast<unsigned long>(j + 1),
                                   static_cast<unsigned long>(r)) *
                bernoulli_number(static_cast<int>(r));
            const std::size_t power = j + 1 - r;
            next[power] += term;
            // constant from the inclusion-exclusion lower limit
            next[0] -= term * Rational::pow_int(Rational(t), static_cast<unsigned long>(power));
        }
    }
    return next;
}

Rational eval_poly(const std::vector<Rational>& coeff, long x) {
    Rational acc(0);
    Rational xp(1);
    for (const auto& c : coeff) {
        acc += c * xp;
        xp *= Rational(x);
    }
    return acc;
}

} // namespace

Rational grid_polynomial(int n, const std::vector<int>& thresholds) {
    if (n < 1) throw std::invalid_argument("grid_polynomial: n >= 1");
    check_thresholds(n, thresholds);
    std::vector<Rational> coeff{Rational(1)}; // P_0 == 1
    for (const int t : thresholds) coeff = recursion_step(coeff, t);
    return eval_poly(coeff, n + 1);
}

Rational exact_fwer(int n, const std::vector<int>& thresholds) {
    const int m = static_cast<int>(thresholds.size());
    check_nm(n, m);
    return Rational(1) - uniform_order_mass(n, m) * grid_polynomial(n, thresholds);
}

Rational exact_fwer_partial_nulls(int n, int m, int m0, const std::vector<int>& thresholds) {
    check_nm(n, m);
    if (m0 < 0 || m0 > m) throw std::invalid_argument("exact_fwer_partial_nulls: need 0 <= m0 <= m");
    if (static_cast<int>(thresholds.size()) != m)
        throw std::invalid_argument("exact_fwer_partial_nulls: need m thresholds");
    check_thresholds(n, thresholds);
    if (m0 == 0) return Rational(0);
    const std::vector<int> shifted(thresholds.end() - m0, thresholds.end());
    return exact_fwer(n, shifted);
}

std::vector<int> hochberg_thresholds(int n, int m, double alpha) {
    check_nm(n, m);
    std::vector<int> t(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) {
        const double tau = alpha / static_cast<double>(m - j + 1);
        t[static_cast<std::size_t>(j - 1)] =
            std::min(n, static_cast<int>(std::floor(tau * (n + 1) + 1e-12)));
    }
    return t;
}

std::vector<int> sidak_thresholds(int n, int m, double alpha, double m0_hat) {
    check_nm(n, m);
    const double tau = 1.0 - std::pow(1.0 - alpha, 1.0 / m0_hat);
    const int t = std::min(n, static_cast<int>(std::floor(tau * (n + 1) + 1e-12)));
    return std::vector<int>(static_cast<std::size_t>(m), t);
}

Rational sidak_exact_fwer(int n, int m, double alpha) {
    check_nm(n, m);
    const int t = sidak_thresholds(n, m, alpha, static_cast<double>(m))[0];
    Rational prod(1);
    for (int k = 0; k < m; ++k) prod *= Rational(static_cast<long>(n) + 1 - t + k);
    const Rational ratio = Rational::factorial(static_cast<unsigned long>(n)) /
                           Rational::factorial(static_cast<unsigned long>(n + m));
    return Rational(1) - ratio * prod;
}

Rational min_pvalue_cdf(int n, int m, int t) {
    check_nm(n, m);
    if (t < 0) return Rational(0);
    t = std::min(t, n + 1);
    Rational acc(0);
    for (int j = 1; j <= t; ++j) acc += marginal_order_pmf(n, m, 1, j);
    return acc;
}

int sidak_sharp_threshold(int n, int m, double alpha) {
    check_nm(n, m);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("sidak_sharp_threshold: alpha in (0,1)");
    const long budget_num = static_cast<long>(std::floor(alpha * (n + 1) + 1e-12));
    const Rational budget(budget_num, static_cast<long>(n) + 1);
    Rational cdf(0);
    int best = 0;
    for (int t = 1; t <= n + 1; ++t) {
        cdf += marginal_order_pmf(n, m, 1, t);
        if (cdf <= budget)
            best = t;
        else
            break;
    }
    return best;
}

bool mtp2_counterexample_check() {
    const int n = 2, m = 3;
    const std::vector<int> x{2, 2, 2};
    const std::vector<int> y{1, 3, 1};
    std::vector<int> lo(3), hi(3);
    for (int i = 0; i < 3; ++i) {
        lo[static_cast<std::size_t>(i)] = std::min(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
        hi[static_cast<std::size_t>(i)] = std::max(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
    }
    return joint_pmf(n, m, x) * joint_pmf(n, m, y) >
           joint_pmf(n, m, lo) * joint_pmf(n, m, hi);
}

} // namespace cmmc
