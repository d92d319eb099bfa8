#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace testutil {

// Regularized incomplete gamma Q(a, x) by series / continued fraction,
// standard construction; used for chi-square tail probabilities in tests.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // lower series
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-14) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // upper continued fraction
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-14) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi2_sf(double stat, double dof) { return gamma_q(0.5 * dof, 0.5 * stat); }

struct MeanSe {
    double mean = 0.0, se = 0.0, sd = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    const std::size_t n = xs.size();
    if (n == 0) return out;
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(n - 1));
        out.se = out.sd / std::sqrt(static_cast<double>(n));
    }
    return out;
}

// chi-square goodness of fit of observed counts against expected counts
// (same total); bins with expected < 5 should be merged by the caller.
inline double chi2_gof_stat(const std::vector<double>& observed,
                            const std::vector<double>& expected) {
    if (observed.size() != expected.size()) throw std::invalid_argument("chi2_gof_stat");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    return stat;
}

} // namespace testutil
