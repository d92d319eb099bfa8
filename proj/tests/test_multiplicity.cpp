#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmmc/multiplicity.hpp"
#include "cmmc/rng.hpp"
#include "testutil.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace cmmc;

namespace {

PValueVector make_pvals(std::vector<double> p, PValueMethod method = PValueMethod::scalar,
                        int n_eff = 99) {
    return PValueVector{std::move(p), method, n_eff, 0};
}

// independent oracle: step-up set evaluated directly from the definition
std::set<std::size_t> step_up_oracle(const std::vector<double>& p,
                                     const std::vector<double>& t) {
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::size_t k = 0;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (p[idx[j]] <= t[j] + 1e-10) k = j + 1;
    return {idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k)};
}

// closed testing with Simes local tests: the oracle for Hommel
std::set<std::size_t> closed_simes_oracle(const std::vector<double>& p, double alpha) {
    const std::size_t m = p.size();
    std::set<std::size_t> rejected;
    for (std::size_t i = 0; i < m; ++i) {
        bool all_subsets_reject = true;
        for (std::size_t mask = 1; mask < (1u << m); ++mask) {
            if (!(mask & (1u << i))) continue;
            std::vector<double> sub;
            for (std::size_t j = 0; j < m; ++j)
                if (mask & (1u << j)) sub.push_back(p[j]);
            std::sort(sub.begin(), sub.end());
            bool simes = false;
            for (std::size_t k = 0; k < sub.size(); ++k)
                if (sub[k] <=
                    static_cast<double>(k + 1) * alpha / static_cast<double>(sub.size()) + 1e-10)
                    simes = true;
            if (!simes) {
                all_subsets_reject = false;
                break;
            }
        }
        if (all_subsets_reject) rejected.insert(i);
    }
    return rejected;
}

std::set<std::size_t> as_set(const RejectionSet& r) {
    return {r.rejected.begin(), r.rejected.end()};
}

} // namespace

TEST_CASE("bh procedure by hand") {
    const auto r = bh_procedure(make_pvals({0.01, 0.02, 0.04, 0.5}), 0.1);
    CHECK(as_set(r) == std::set<std::size_t>{0, 1, 2}); // p_(3)=0.04 <= 0.075

    CHECK(bh_procedure(make_pvals({1.0, 1.0, 1.0}), 0.1).count() == 0);

    // m = 1 reduces to the fixed level
    CHECK(bh_procedure(make_pvals({0.04}), 0.05).count() == 1);
    CHECK(bh_procedure(make_pvals({0.06}), 0.05).count() == 0);

    CHECK_THROWS_AS(bh_procedure(make_pvals({0.5}), 1.5), std::invalid_argument);
}

TEST_CASE("bh equals the direct step-up evaluation on random inputs") {
    RngStream rng(1, 0);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t m = 1 + rng.uniform_int(8);
        std::vector<double> p(m);
        for (auto& v : p) v = rng.uniform();
        const double q = 0.01 + 0.4 * rng.uniform();
        std::vector<double> t(m);
        for (std::size_t j = 0; j < m; ++j)
            t[j] = static_cast<double>(j + 1) * q / static_cast<double>(m);
        CHECK(as_set(bh_procedure(make_pvals(p), q)) == step_up_oracle(p, t));
    }
}

TEST_CASE("storey estimator") {
    // m=10, lambda=0.5, four p-values above 0.5
    const PValueVector p1 = make_pvals({0.1, 0.2, 0.3, 0.4, 0.45, 0.5, 0.6, 0.7, 0.8, 0.9});
    CHECK(storey_estimator(p1, 0.5) == doctest::Approx(1.0)); // (1+4)/(10*0.5)

    // all p <= lambda
    const PValueVector p2 = make_pvals({0.1, 0.2, 0.3, 0.4});
    CHECK(storey_estimator(p2, 0.5) == doctest::Approx(0.5)); // 1/(4*0.5)

    // estimator above 1 is allowed
    const PValueVector p3 = make_pvals({0.1, 0.2, 0.6, 0.9});
    CHECK(storey_estimator(p3, 0.5) == doctest::Approx(1.5)); // (1+2)/(4*0.5)

    CHECK_THROWS_AS(storey_estimator(p3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(storey_estimator(p3, 1.0), std::invalid_argument);
}

TEST_CASE("lambda snapping to the lattice") {
    CHECK(snap_lambda(0.5, 99) == doctest::Approx(50.0 / 100.0));
    CHECK(snap_lambda(0.5, 4) == doctest::Approx(3.0 / 5.0)); // equidistant tie rounds up
    CHECK(snap_lambda(0.45, 4) == doctest::Approx(2.0 / 5.0));
    CHECK(snap_lambda(0.999, 4) == doctest::Approx(4.0 / 5.0));
    CHECK(snap_lambda(1e-9, 4) == doctest::Approx(1.0 / 5.0));
}

TEST_CASE("storey bh reduces to bh at the adjusted level") {
    RngStream rng(2, 0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> p(10);
        for (auto& v : p) v = rng.uniform();
        const PValueVector pv = make_pvals(p);
        const double lambda = snap_lambda(0.5, pv.n_effective);
        const double pi0 = storey_estimator(pv, lambda);
        const double alpha = 0.05;
        const auto a = storey_bh(pv, alpha, lambda);
        if (alpha / pi0 < 1.0) {
            const auto b = bh_procedure(pv, alpha / pi0);
            CHECK(as_set(a) == as_set(b));
        }
    }
}

TEST_CASE("hochberg procedure by hand") {
    CHECK(as_set(hochberg_procedure(make_pvals({0.01, 0.02, 0.049}), 0.05)) ==
          std::set<std::size_t>{0, 1, 2});
    CHECK(hochberg_procedure(make_pvals({0.03, 0.04, 0.06}), 0.05).count() == 0);
    CHECK(hochberg_procedure(make_pvals({0.04}), 0.05).count() == 1);
    CHECK(hochberg_procedure(make_pvals({0.06}), 0.05).count() == 0);
}

TEST_CASE("hommel against the closed-testing simes oracle") {
    CHECK(as_set(hommel_procedure(make_pvals({0.01, 0.02, 0.049}), 0.05)) ==
          std::set<std::size_t>{0, 1, 2});
    CHECK(hommel_procedure(make_pvals({0.04}), 0.05).count() == 1);

    RngStream rng(3, 0);
    for (int rep = 0; rep < 400; ++rep) {
        const std::size_t m = 1 + rng.uniform_int(5);
        std::vector<double> p(m);
        for (auto& v : p) {
            v = rng.uniform();
            if (rng.uniform() < 0.4) v *= 0.1; // some small p-values
        }
        const double alpha = 0.02 + 0.2 * rng.uniform();
        const auto fast = as_set(hommel_procedure(make_pvals(p), alpha));
        const auto oracle = closed_simes_oracle(p, alpha);
        CHECK_MESSAGE(fast == oracle, "rep=", rep, " m=", m, " alpha=", alpha);
    }
}

TEST_CASE("procedure dominance: hommel >= hochberg >= bonferroni") {
    RngStream rng(4, 0);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t m = 1 + rng.uniform_int(9);
        std::vector<double> p(m);
        for (auto& v : p) v = std::pow(rng.uniform(), 2.0);
        const double alpha = 0.02 + 0.3 * rng.uniform();
        const PValueVector pv = make_pvals(p);
        const auto bonf = as_set(bonferroni(pv, alpha, static_cast<double>(m)));
        const auto hoch = as_set(hochberg_procedure(pv, alpha));
        const auto homm = as_set(hommel_procedure(pv, alpha));
        CHECK(std::includes(hoch.begin(), hoch.end(), bonf.begin(), bonf.end()));
        CHECK(std::includes(homm.begin(), homm.end(), hoch.begin(), hoch.end()));
    }
}

TEST_CASE("step-up procedures are monotone in the p-values") {
    RngStream rng(5, 0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> p(6);
        for (auto& v : p) v = rng.uniform();
        const double alpha = 0.1;
        auto smaller = p;
        const std::size_t which = rng.uniform_int(6);
        smaller[which] *= rng.uniform();
        const auto before_bh = as_set(bh_procedure(make_pvals(p), alpha));
        const auto after_bh = as_set(bh_procedure(make_pvals(smaller), alpha));
        CHECK(std::includes(after_bh.begin(), after_bh.end(), before_bh.begin(),
                            before_bh.end()));
        const auto before_h = as_set(hochberg_procedure(make_pvals(p), alpha));
        const auto after_h = as_set(hochberg_procedure(make_pvals(smaller), alpha));
        CHECK(std::includes(after_h.begin(), after_h.end(), before_h.begin(), before_h.end()));
    }
}

TEST_CASE("bonferroni and sidak thresholds") {
    const PValueVector pv = make_pvals({0.009, 0.011, 0.5});
    const auto b = bonferroni(pv, 0.05, 5.0);
    CHECK(b.contains(0));       // 0.009 <= 0.01
    CHECK_FALSE(b.contains(1)); // 0.011 > 0.01

    // m0_hat = 1 gives exactly alpha
    const auto s1 = sidak(make_pvals({0.05}), 0.05, 1.0);
    CHECK(s1.count() == 1);

    // closed-form threshold value at alpha=0.05, m0=10
    const double thr = 1.0 - std::pow(0.95, 0.1);
    CHECK(thr == doctest::Approx(0.0051162).epsilon(1e-4));
    const auto s2 = sidak(make_pvals({thr - 1e-9, thr + 1e-6}), 0.05, 10.0);
    CHECK(s2.contains(0));
    CHECK_FALSE(s2.contains(1));

    // Sidak threshold dominates Bonferroni's for every m0
    for (const double m0 : {1.0, 2.0, 7.0, 25.0})
        CHECK(1.0 - std::pow(1.0 - 0.05, 1.0 / m0) >= 0.05 / m0);
}

TEST_CASE("error metrics") {
    ThresholdSequence t(std::vector<double>(10, 0.05));
    SUBCASE("no rejections guard") {
        const RejectionSet r{{}, t, Procedure::bh};
        const ErrorMetrics em = error_metrics(r, {0, 1, 2}, 10);
        CHECK(em.fdp == 0.0);
        CHECK(em.tdp == 0.0);
        CHECK(em.m0 == 7);
    }
    SUBCASE("exact recovery") {
        const RejectionSet r{{0, 1, 2}, t, Procedure::bh};
        const ErrorMetrics em = error_metrics(r, {0, 1, 2}, 10);
        CHECK(em.fdp == 0.0);
        CHECK(em.tdp == 1.0);
    }
    SUBCASE("mixed") {
        // m=10, m0=5, rejected = 4 true + 1 null
        const RejectionSet r{{0, 1, 2, 3, 9}, t, Procedure::bh};
        const ErrorMetrics em = error_metrics(r, {0, 1, 2, 3, 4}, 10);
        CHECK(em.fdp == doctest::Approx(0.2));
        CHECK(em.tdp == doctest::Approx(0.8));
        CHECK(em.v + em.s == em.r);
    }
}

TEST_CASE("fisher combination test") {
    SUBCASE("refuses dependent conformal p-values") {
        CHECK_THROWS_AS(
            global_null_fisher(make_pvals({0.1, 0.2}, PValueMethod::parallel_erl), 0.05),
            std::invalid_argument);
    }
    SUBCASE("all ones never rejects") {
        CHECK_FALSE(global_null_fisher(make_pvals({1.0, 1.0, 1.0}, PValueMethod::naive), 0.05));
    }
    SUBCASE("m=1 boundary at p = alpha") {
        CHECK(global_null_fisher(make_pvals({0.05 - 1e-9}, PValueMethod::naive), 0.05));
        CHECK_FALSE(global_null_fisher(make_pvals({0.05 + 1e-6}, PValueMethod::naive), 0.05));
    }
    SUBCASE("calibrated under uniform p-values") {
        const int reps = 10000;
        double rejections = 0;
        for (int i = 0; i < reps; ++i) {
            RngStream rng(6, static_cast<std::uint64_t>(i));
            std::vector<double> p(5);
            for (auto& v : p) v = rng.uniform();
            if (global_null_fisher(make_pvals(std::move(p), PValueMethod::naive), 0.05))
                rejections += 1.0;
        }
        const double rate = rejections / reps;
        const double se = std::sqrt(0.05 * 0.95 / reps);
        CHECK(std::fabs(rate - 0.05) <= 3.5 * se);
    }
}

TEST_CASE("hochberg global test") {
    CHECK(global_null_hochberg(make_pvals({0.01, 0.02, 0.049}), 0.05));
    CHECK_FALSE(global_null_hochberg(make_pvals({1.0, 1.0, 1.0}), 0.05));
    CHECK(global_null_hochberg(make_pvals({0.04}), 0.05));
    CHECK_FALSE(global_null_hochberg(make_pvals({0.06}), 0.05));
}

TEST_CASE("bh on conformal p-values attains fdr pi0 q* when q*(n+1)/m is an integer") {
    // n=49, m=5, q*=0.1: q*(n+1)/m = 1; m0 = 3 alternatives at -3
    const int n = 49, m = 5, m0 = 3, reps = 4000;
    const double q_star = 0.1;
    std::vector<double> fdps;
    fdps.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        RngStream rng(7, static_cast<std::uint64_t>(i));
        std::vector<double> nulls(n), tests(m);
        for (auto& v : nulls) v = rng.normal();
        for (int j = 0; j < m; ++j)
            tests[static_cast<std::size_t>(j)] = j < m - m0 ? rng.normal() - 3.0 : rng.normal();
        const PValueVector pv = conformal_pvalues_scalar(nulls, tests);
        const auto rej = bh_procedure(pv, q_star);
        const ErrorMetrics em = error_metrics(rej, {0, 1}, m);
        fdps.push_back(em.fdp);
    }
    const auto ms = testutil::mean_se(fdps);
    const double target = (static_cast<double>(m0) / m) * q_star;
    CHECK_MESSAGE(std::fabs(ms.mean - target) <= 3.0 * ms.se, "fdr=", ms.mean,
                  " target=", target, " se=", ms.se);
}

TEST_CASE("threshold sequence validation") {
    CHECK_THROWS_AS(ThresholdSequence({0.2, 0.1}), std::invalid_argument);
    CHECK_NOTHROW(ThresholdSequence({0.1, 0.1, 0.3}));
}

TEST_CASE("tie order among equal p-values does not change the rejection count") {
    const PValueVector a = make_pvals({0.02, 0.02, 0.5});
    const PValueVector b = make_pvals({0.02, 0.5, 0.02});
    CHECK(bh_procedure(a, 0.1).count() == bh_procedure(b, 0.1).count());
    CHECK(hochberg_procedure(a, 0.1).count() == hochberg_procedure(b, 0.1).count());
}
