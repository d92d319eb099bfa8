#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmmc/generate.hpp"
#include "testutil.hpp"

#include <cmath>
#include <map>
#include <numeric>

using namespace cmmc;

namespace {

long close_pairs(const PointPattern& p, double radius) {
    const auto& pts = p.points();
    long count = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
            if (dx * dx + dy * dy < radius * radius) ++count;
        }
    return count;
}

} // namespace

TEST_CASE("poisson mean count scales with area") {
    // lambda * area = 50 on the quarter square
    const Window w(0, 0.5, 0, 0.5);
    const int reps = 10000;
    std::vector<double> counts;
    counts.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        RngStream rng(11, static_cast<std::uint64_t>(i));
        counts.push_back(static_cast<double>(simulate_poisson(PoissonParams{200.0}, w, rng).size()));
    }
    const auto ms = testutil::mean_se(counts);
    CHECK(std::fabs(ms.mean - 50.0) <= 3.0 * ms.se);
}

TEST_CASE("poisson mean count 200 on the unit square") {
    const int reps = 2000;
    std::vector<double> counts;
    counts.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        RngStream rng(12, static_cast<std::uint64_t>(i));
        counts.push_back(static_cast<double>(
            simulate_poisson(PoissonParams{200.0}, Window::unit_square(), rng).size()));
    }
    const auto ms = testutil::mean_se(counts);
    CHECK(std::fabs(ms.mean - 200.0) <= 3.0 * ms.se);
}

TEST_CASE("poisson count distribution passes chi-square gof") {
    // N ~ Poisson(lambda * area) with lambda * area = 50
    const Window w(0, 0.5, 0, 0.5);
    const double mean = 50.0;
    const int reps = 10000;
    std::map<long, long> hist;
    for (int i = 0; i < reps; ++i) {
        RngStream rng(13, static_cast<std::uint64_t>(i));
        ++hist[static_cast<long>(simulate_poisson(PoissonParams{200.0}, w, rng).size())];
    }
    std::vector<double> observed, expected;
    double to = 0.0, te = 0.0;
    double p = std::exp(-mean);
    double cum = 0.0;
    for (long k = 0; cum < reps - 1e-9 && k < 1000; ++k) {
        if (k > 0) p *= mean / static_cast<double>(k);
        const double e = p * reps;
        cum += e;
        const auto it = hist.find(k);
        to += it == hist.end() ? 0.0 : static_cast<double>(it->second);
        te += e;
        if (te >= 5.0) {
            observed.push_back(to);
            expected.push_back(te);
            to = te = 0.0;
        }
    }
    expected.back() += reps - std::accumulate(expected.begin(), expected.end(), 0.0);
    observed.back() += reps - std::accumulate(observed.begin(), observed.end(), 0.0);
    const double stat = testutil::chi2_gof_stat(observed, expected);
    CHECK(testutil::chi2_sf(stat, static_cast<double>(observed.size()) - 1.0) > 0.01);
}

TEST_CASE("poisson with vanishing intensity is empty") {
    RngStream rng(14, 0);
    for (int i = 0; i < 200; ++i)
        CHECK(simulate_poisson(PoissonParams{1e-9}, Window::unit_square(), rng).size() == 0);
}

TEST_CASE("strauss with gamma=1 matches poisson in mean count") {
    const int reps = 2000;
    std::vector<double> strauss_counts, poisson_counts;
    for (int i = 0; i < reps; ++i) {
        RngStream r1(21, static_cast<std::uint64_t>(i));
        RngStream r2(22, static_cast<std::uint64_t>(i));
        strauss_counts.push_back(static_cast<double>(
            simulate_strauss(StraussParams{250.0, 1.0, 0.03}, Window::unit_square(), r1, 2000)
                .size()));
        poisson_counts.push_back(static_cast<double>(
            simulate_poisson(PoissonParams{250.0}, Window::unit_square(), r2).size()));
    }
    const auto s = testutil::mean_se(strauss_counts);
    const auto p = testutil::mean_se(poisson_counts);
    const double se = std::sqrt(s.se * s.se + p.se * p.se);
    CHECK(std::fabs(s.mean - p.mean) <= 3.0 * se);
}

TEST_CASE("strauss(250, 0.6, 0.03) has intensity near 200") {
    const int reps = 300;
    std::vector<double> counts;
    for (int i = 0; i < reps; ++i) {
        RngStream rng(23, static_cast<std::uint64_t>(i));
        counts.push_back(static_cast<double>(
            simulate_strauss(StraussParams{250.0, 0.6, 0.03}, Window::unit_square(), rng, 20000)
                .size()));
    }
    const double mean = testutil::mean_se(counts).mean;
    CHECK(mean > 180.0);
    CHECK(mean < 220.0);
}

TEST_CASE("strauss hard core excludes close pairs") {
    for (int i = 0; i < 20; ++i) {
        RngStream rng(24, static_cast<std::uint64_t>(i));
        const PointPattern p =
            simulate_strauss(StraussParams{250.0, 0.0, 0.03}, Window::unit_square(), rng, 20000);
        CHECK(close_pairs(p, 0.03) == 0);
    }
}

TEST_CASE("strauss interaction reduces close pairs") {
    const int reps = 300;
    std::vector<double> inhibited, free_pairs;
    for (int i = 0; i < reps; ++i) {
        RngStream r1(25, static_cast<std::uint64_t>(i));
        RngStream r2(26, static_cast<std::uint64_t>(i));
        inhibited.push_back(static_cast<double>(close_pairs(
            simulate_strauss(StraussParams{250.0, 0.6, 0.03}, Window::unit_square(), r1, 20000),
            0.03)));
        free_pairs.push_back(static_cast<double>(close_pairs(
            simulate_strauss(StraussParams{250.0, 1.0, 0.03}, Window::unit_square(), r2, 2000),
            0.03)));
    }
    const auto a = testutil::mean_se(inhibited);
    const auto b = testutil::mean_se(free_pairs);
    CHECK(a.mean + 3.0 * std::sqrt(a.se * a.se + b.se * b.se) < b.mean);
}

TEST_CASE("lgcp with sigma2=0 is homogeneous poisson with intensity exp(mu)") {
    const double mu = std::log(150.0);
    const int reps = 1000;
    std::vector<double> counts;
    for (int i = 0; i < reps; ++i) {
        RngStream rng(31, static_cast<std::uint64_t>(i));
        counts.push_back(static_cast<double>(
            simulate_lgcp(LgcpParams{mu, 0.0, 0.05}, Window::unit_square(), rng, 16).size()));
    }
    const auto ms = testutil::mean_se(counts);
    CHECK(std::fabs(ms.mean - 150.0) <= 3.0 * ms.se);
}

TEST_CASE("lgcp mean count matches the log-normal identity exp(mu + sigma2/2)") {
    // LGCP(5, 0.6, 0.05): exp(5.3) = 200.34
    const int reps = 2000;
    std::vector<double> counts;
    for (int i = 0; i < reps; ++i) {
        RngStream rng(32, static_cast<std::uint64_t>(i));
        counts.push_back(static_cast<double>(
            simulate_lgcp(LgcpParams{5.0, 0.6, 0.05}, Window::unit_square(), rng, 32).size()));
    }
    const auto ms = testutil::mean_se(counts);
    const double target = std::exp(5.0 + 0.3);
    CHECK(std::fabs(ms.mean - target) <= 3.0 * ms.se);

    // aggregation: counts are over-dispersed relative to Poisson
    CHECK(ms.sd * ms.sd > 1.5 * ms.mean);
}

TEST_CASE("generators are deterministic in the stream") {
    for (int variant = 0; variant < 3; ++variant) {
        RngStream a(77, static_cast<std::uint64_t>(variant));
        RngStream b(77, static_cast<std::uint64_t>(variant));
        PointPattern pa = variant == 0
            ? simulate_poisson(PoissonParams{100.0}, Window::unit_square(), a)
            : variant == 1
                ? simulate_strauss(StraussParams{120.0, 0.5, 0.04}, Window::unit_square(), a, 3000)
                : simulate_lgcp(LgcpParams{4.0, 0.4, 0.08}, Window::unit_square(), a, 16);
        PointPattern pb = variant == 0
            ? simulate_poisson(PoissonParams{100.0}, Window::unit_square(), b)
            : variant == 1
                ? simulate_strauss(StraussParams{120.0, 0.5, 0.04}, Window::unit_square(), b, 3000)
                : simulate_lgcp(LgcpParams{4.0, 0.4, 0.08}, Window::unit_square(), b, 16);
        CHECK(pa == pb);
    }
}

TEST_CASE("simulate_null delegates and mixes") {
    SUBCASE("leaf delegation is draw-for-draw identical") {
        RngStream a(88, 3), b(88, 3);
        const StraussParams sp{150.0, 0.7, 0.03};
        const PointPattern direct = simulate_strauss(sp, Window::unit_square(), a, 2000);
        const PointPattern via = simulate_null(NullModel(sp), Window::unit_square(), b,
                                               SimOptions{2000, 64});
        CHECK(direct == via);
    }
    SUBCASE("singleton mixture matches the component in mean") {
        MixtureModel mix;
        mix.components.push_back(NullModel(PoissonParams{200.0}));
        const NullModel model(mix);
        std::vector<double> counts;
        for (int i = 0; i < 2000; ++i) {
            RngStream rng(89, static_cast<std::uint64_t>(i));
            counts.push_back(
                static_cast<double>(simulate_null(model, Window::unit_square(), rng).size()));
        }
        const auto ms = testutil::mean_se(counts);
        CHECK(std::fabs(ms.mean - 200.0) <= 3.0 * ms.se);
    }
    SUBCASE("two-component mixture has the mixture mean") {
        MixtureModel mix;
        mix.components.push_back(NullModel(PoissonParams{100.0}));
        mix.components.push_back(NullModel(PoissonParams{300.0}));
        const NullModel model(mix);
        std::vector<double> counts;
        for (int i = 0; i < 2000; ++i) {
            RngStream rng(90, static_cast<std::uint64_t>(i));
            counts.push_back(
                static_cast<double>(simulate_null(model, Window::unit_square(), rng).size()));
        }
        const auto ms = testutil::mean_se(counts);
        CHECK(std::fabs(ms.mean - 200.0) <= 3.0 * ms.se);
    }
}

TEST_CASE("model parameter validation") {
    CHECK_THROWS_AS(validate(StraussParams{250.0, 1.2, 0.03}), std::invalid_argument);
    CHECK_THROWS_AS(validate(StraussParams{-1.0, 0.5, 0.03}), std::invalid_argument);
    CHECK_THROWS_AS(validate(LgcpParams{5.0, -0.1, 0.05}), std::invalid_argument);
    CHECK_THROWS_AS(validate(LgcpParams{5.0, 0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(NullModel(MixtureModel{})), std::invalid_argument);
    RngStream rng(1, 1);
    CHECK_THROWS_AS(
        simulate_lgcp(LgcpParams{5.0, 0.5, 0.05}, Window::unit_square(), rng, 8),
        std::invalid_argument);
}

TEST_CASE("model spec strings parse and print") {
    const NullModel m1 = parse_model("poisson:200");
    CHECK(std::get<PoissonParams>(m1.spec).intensity == 200.0);
    const NullModel m2 = parse_model("strauss:250,0.6,0.03");
    CHECK(std::get<StraussParams>(m2.spec).gamma == 0.6);
    const NullModel m3 = parse_model("lgcp:5,0.6,0.05");
    CHECK(std::get<LgcpParams>(m3.spec).scale == 0.05);
    CHECK(model_to_string(m2) == "strauss:250,0.59999999999999998,0.029999999999999999");
    CHECK_THROWS_AS(parse_model("gibbs:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_model("poisson:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_model("strauss:250,1.5,0.03"), std::invalid_argument);
}
