#include "cmmc/multiplicity.hpp"

#include "cmmc/pattern_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace cmmc {

std::string procedure_name(Procedure p) {
    switch (p) {
        case Procedure::bh: return "bh";
        case Procedure::storey_bh: return "storey_bh";
        case Procedure::hochberg: return "hochberg";
        case Procedure::hommel: return "hommel";
        case Procedure::bonferroni: return "bonferroni";
        case Procedure::sidak: return "sidak";
    }
    return "?";
}

Procedure parse_procedure(const std::string& name) {
    if (name == "bh") return Procedure::bh;
    if (name == "storey_bh") return Procedure::storey_bh;
    if (name == "hochberg") return Procedure::hochberg;
    if (name == "hommel") return Procedure::hommel;
    if (name == "bonferroni") return Procedure::bonferroni;
    if (name == "sidak") return Procedure::sidak;
    throw std::invalid_argument("unknown procedure: " + name);
}

ThresholdSequence::ThresholdSequence(std::vector<double> values) : t(std::move(values)) {
    for (std::size_t j = 1; j < t.size(); ++j)
        if (t[j] < t[j - 1])
            throw std::invalid_argument("ThresholdSequence: thresholds must be nondecreasing");
}

bool RejectionSet::contains(std::size_t index) const {
    return std::binary_search(rejected.begin(), rejected.end(), index);
}

namespace {

std::vector<std::size_t> order_by_pvalue(const PValueVector& p) {
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return p.p[a] < p.p[b]; });
    return idx;
}

RejectionSet reject_fixed_threshold(const PValueVector& p, double threshold, Procedure label) {
    RejectionSet out{{}, ThresholdSequence(std::vector<double>(p.size(), threshold)), label};
    for (std::size_t j = 0; j < p.size(); ++j)
        if (leq_threshold(p.p[j], threshold)) out.rejected.push_back(j);
    return out;
}

} // namespace

RejectionSet step_up(const PValueVector& p, const ThresholdSequence& thresholds,
                     Procedure label) {
    if (thresholds.size() != p.size())
        throw std::invalid_argument("step_up: threshold length mismatch");
    const auto idx = order_by_pvalue(p);
    std::size_t k = 0;
    for (std::size_t j = p.size(); j-- > 0;) {
        if (leq_threshold(p.p[idx[j]], thresholds.t[j])) {
            k = j + 1;
            break;
        }
    }
    RejectionSet out{{}, thresholds, label};
    out.rejected.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.rejected.begin(), out.rejected.end());
    return out;
}

namespace {

RejectionSet bh_at_level(const PValueVector& p, double q_star, Procedure label) {
    const std::size_t m = p.size();
    std::vector<double> t(m);
    for (std::size_t j = 0; j < m; ++j)
        t[j] = static_cast<double>(j + 1) * q_star / static_cast<double>(m);
    return step_up(p, ThresholdSequence(std::move(t)), label);
}

} // namespace

RejectionSet bh_procedure(const PValueVector& p, double q_star) {
    if (!(q_star > 0.0 && q_star < 1.0))
        throw std::invalid_argument("bh_procedure: q_star must be in (0,1)");
    return bh_at_level(p, q_star, Procedure::bh);
}

double storey_estimator(const PValueVector& p, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("storey_estimator: lambda must be in (0,1)");
    const double grid = lambda * (p.n_effective + 1);
    if (std::fabs(grid - std::round(grid)) > 1e-9) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            std::cerr << "warning: Storey lambda=" << lambda
                      << " is not of the form K/(n+1) for n=" << p.n_effective
                      << "; the FDR guarantee needs the lattice form\n";
    }
    long above = 0;
    for (const double v : p.p)
        if (!leq_threshold(v, lambda)) ++above;
    return static_cast<double>(1 + above) / (static_cast<double>(p.size()) * (1.0 - lambda));
}

double snap_lambda(double lambda, int n_effective) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("snap_lambda: lambda must be in (0,1)");
    const double np1 = static_cast<double>(n_effective) + 1.0;
    long k = std::lround(lambda * np1);
    k = std::max(1L, std::min(static_cast<long>(n_effective), k));
    return static_cast<double>(k) / np1;
}

RejectionSet storey_bh(const PValueVector& p, double alpha, double lambda) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("storey_bh: alpha must be in (0,1)");
    const double pi0 = storey_estimator(p, lambda);
    // alpha/pi0 may exceed 1 when pi0_hat is small; the step-up handles it.
    return bh_at_level(p, alpha / pi0, Procedure::storey_bh);
}

RejectionSet hochberg_procedure(const PValueVector& p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("hochberg_procedure: alpha must be in (0,1)");
    const std::size_t m = p.size();
    std::vector<double> t(m);
    for (std::size_t j = 0; j < m; ++j) t[j] = alpha / static_cast<double>(m - j);
    return step_up(p, ThresholdSequence(std::move(t)), Procedure::hochberg);
}

RejectionSet hommel_procedure(const PValueVector& p, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("hommel_procedure: alpha must be in (0,1)");
    const std::size_t m = p.size();
    const auto idx = order_by_pvalue(p);

    // Hommel (1988): h = max{ i : p_(m-i+k) > k*alpha/i for all k = 1..i };
    // if no such i exists reject everything, else reject all p <= alpha/h.
    std::size_t h = 0;
    for (std::size_t i = m; i >= 1; --i) {
        bool all_above = true;
        for (std::size_t k = 1; k <= i; ++k) {
            const double ps = p.p[idx[m - i + k - 1]];
            if (leq_threshold(ps, static_cast<double>(k) * alpha / static_cast<double>(i))) {
                all_above = false;
                break;
            }
        }
        if (all_above) {
            h = i;
            break;
        }
    }

    RejectionSet out{{}, ThresholdSequence(std::vector<double>(m, alpha)), Procedure::hommel};
    if (h == 0) {
        out.rejected.resize(m);
        std::iota(out.rejected.begin(), out.rejected.end(), 0);
        return out;
    }
    const double thr = alpha / static_cast<double>(h);
    out.thresholds = ThresholdSequence(std::vector<double>(m, thr));
    for (std::size_t j = 0; j < m; ++j)
        if (leq_threshold(p.p[j], thr)) out.rejected.push_back(j);
    return out;
}

RejectionSet bonferroni(const PValueVector& p, double alpha, double m0_hat) {
    if (!(m0_hat >= 1.0)) throw std::invalid_argument("bonferroni: m0_hat must be >= 1");
    return reject_fixed_threshold(p, alpha / m0_hat, Procedure::bonferroni);
}

RejectionSet sidak(const PValueVector& p, double alpha, double m0_hat) {
    if (!(m0_hat >= 1.0)) throw std::invalid_argument("sidak: m0_hat must be >= 1");
    const double threshold = 1.0 - std::pow(1.0 - alpha, 1.0 / m0_hat);
    return reject_fixed_threshold(p, threshold, Procedure::sidak);
}

ErrorMetrics error_metrics(const RejectionSet& rej, const std::vector<std::size_t>& truth,
                           std::size_t m) {
    for (const auto i : truth)
        if (i >= m) throw std::invalid_argument("error_metrics: truth index out of range");
    ErrorMetrics em;
    em.m0 = static_cast<long>(m - truth.size());
    for (const auto j : rej.rejected) {
        if (std::find(truth.begin(), truth.end(), j) != truth.end())
            ++em.s;
        else
            ++em.v;
    }
    em.r = em.v + em.s;
    em.fdp = static_cast<double>(em.v) / std::max(1L, em.r);
    em.tdp = static_cast<double>(em.s) / std::max(1L, static_cast<long>(truth.size()));
    return em;
}

namespace {

// chi-square survival function for even dof = 2m: Q(m, y) = e^-y sum y^k/k!
double chi2_even_dof_sf(double stat, std::size_t m) {
    const double y = 0.5 * stat;
    double term = std::exp(-y);
    double sum = term;
    for (std::size_t k = 1; k < m; ++k) {
        term *= y / static_cast<double>(k);
        sum += term;
    }
    return std::min(sum, 1.0);
}

} // namespace

bool global_null_fisher(const PValueVector& p, double alpha) {
    if (p.method != PValueMethod::naive)
        throw std::invalid_argument(
            "global_null_fisher: requires independent (naive) p-values; the plain Fisher "
            "combination is not calibrated for dependent conformal p-values");
    double stat = 0.0;
    for (const double v : p.p) stat += -2.0 * std::log(v);
    return chi2_even_dof_sf(stat, p.size()) <= alpha + 1e-12;
}

bool global_null_concatenated_get(const TestSetup& setup, double alpha, RngStream& rng) {
    const std::size_t n = setup.n(), m = setup.m();
    if (n % m != 0)
        throw std::invalid_argument("global_null_concatenated_get: m must divide n");
    const std::size_t groups = n / m;

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.uniform_int(i)]);

    const ValueMatrix null_rows = curves_to_matrix(setup.null_curves);
    const ValueMatrix test_rows = curves_to_matrix(setup.test_curves);
    const std::size_t len = null_rows[0].size();

    ValueMatrix long_nulls(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        long_nulls[g].reserve(m * len);
        for (std::size_t j = 0; j < m; ++j) {
            const auto& row = null_rows[perm[g * m + j]];
            long_nulls[g].insert(long_nulls[g].end(), row.begin(), row.end());
        }
    }
    ValueMatrix long_test(1);
    long_test[0].reserve(m * len);
    for (std::size_t j = 0; j < m; ++j)
        long_test[0].insert(long_test[0].end(), test_rows[j].begin(), test_rows[j].end());

    const PValueVector pv = conformal_pvalues_parallel_values(long_nulls, long_test);
    return leq_threshold(pv.p[0], alpha);
}

bool global_null_hochberg(const PValueVector& p, double alpha) {
    return hochberg_procedure(p, alpha).count() >= 1;
}

void write_rejection_csv(const PValueVector& p, const RejectionSet& rej,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const auto idx = order_by_pvalue(p);
    std::vector<double> threshold_of(p.size());
    for (std::size_t j = 0; j < idx.size(); ++j) threshold_of[idx[j]] = rej.thresholds.t[j];
    out << "test_index,p_value,threshold,rejected\n";
    for (std::size_t j = 0; j < p.size(); ++j)
        out << (j + 1) << ',' << format_double(p.p[j]) << ',' << format_double(threshold_of[j])
            << ',' << (rej.contains(j) ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace cmmc
