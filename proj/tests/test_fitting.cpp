#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmmc/fitting.hpp"
#include "cmmc/generate.hpp"
#include "testutil.hpp"

#include <algorithm>
#include <cmath>

using namespace cmmc;

TEST_CASE("poisson mle") {
    std::vector<PointXY> pts;
    RngStream rng(1, 0);
    for (int i = 0; i < 200; ++i) pts.push_back({rng.uniform(), rng.uniform()});
    CHECK(fit_poisson(PointPattern(Window::unit_square(), pts)).intensity == 200.0);

    const PointPattern empty(Window::unit_square(), {});
    const PoissonParams fitted = fit_poisson(empty);
    CHECK(fitted.intensity == 0.0);
    CHECK(fitted.degenerate());

    std::vector<PointXY> quarter;
    for (int i = 0; i < 50; ++i) quarter.push_back({0.5 * rng.uniform(), 0.5 * rng.uniform()});
    CHECK(fit_poisson(PointPattern(Window(0, 0.5, 0, 0.5), quarter)).intensity == 200.0);
}

TEST_CASE("poisson mle is invariant to order and translation") {
    RngStream rng(2, 0);
    const PointPattern p = simulate_poisson(PoissonParams{150.0}, Window::unit_square(), rng);
    auto shuffled = p.points();
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(fit_poisson(PointPattern(p.window(), shuffled)).intensity ==
          fit_poisson(p).intensity);

    std::vector<PointXY> moved;
    for (const auto& pt : p.points()) moved.push_back({pt.x + 5.0, pt.y - 2.0});
    CHECK(fit_poisson(PointPattern(Window(5, 6, -2, -1), moved)).intensity ==
          fit_poisson(p).intensity);
}

TEST_CASE("strauss pseudolikelihood recovers no interaction on poisson data") {
    const std::vector<double> r_grid{0.02, 0.03, 0.04};
    const int reps = 60;
    std::vector<double> gammas;
    for (int i = 0; i < reps; ++i) {
        RngStream rng(3, static_cast<std::uint64_t>(i));
        const PointPattern p = simulate_poisson(PoissonParams{200.0}, Window::unit_square(), rng);
        gammas.push_back(fit_strauss(p, r_grid).gamma);
    }
    const double mean = testutil::mean_se(gammas).mean;
    CHECK(mean > 0.9);
    CHECK(mean <= 1.0);
}

TEST_CASE("strauss pseudolikelihood detects inhibition") {
    const std::vector<double> r_grid{0.02, 0.03, 0.04};
    const int reps = 200;
    std::vector<double> gammas, betas;
    for (int i = 0; i < reps; ++i) {
        RngStream rng(4, static_cast<std::uint64_t>(i));
        const PointPattern p =
            simulate_strauss(StraussParams{250.0, 0.6, 0.03}, Window::unit_square(), rng, 20000);
        const StraussParams fit = fit_strauss(p, r_grid);
        gammas.push_back(fit.gamma);
        betas.push_back(fit.beta);
    }
    const double mean_gamma = testutil::mean_se(gammas).mean;
    CHECK(mean_gamma > 0.4);
    CHECK(mean_gamma < 0.8);
    CHECK(testutil::mean_se(betas).mean > 150.0); // beta well above the realized intensity
}

TEST_CASE("strauss pseudolikelihood detects a hard core") {
    const std::vector<double> r_grid{0.03};
    const int reps = 20;
    std::vector<double> gammas;
    for (int i = 0; i < reps; ++i) {
        RngStream rng(5, static_cast<std::uint64_t>(i));
        const PointPattern p =
            simulate_strauss(StraussParams{250.0, 0.0, 0.03}, Window::unit_square(), rng, 20000);
        gammas.push_back(fit_strauss(p, r_grid).gamma);
    }
    CHECK(testutil::mean_se(gammas).mean < 0.15);
}

TEST_CASE("strauss fit input validation") {
    const PointPattern p(Window::unit_square(), {{0.5, 0.5}});
    CHECK_THROWS_AS(fit_strauss(p, {0.03}), std::invalid_argument);
    const PointPattern p2(Window::unit_square(), {{0.5, 0.5}, {0.6, 0.6}});
    CHECK_THROWS_AS(fit_strauss(p2, {}), std::invalid_argument);
}

TEST_CASE("lgcp minimum contrast on poisson data finds a nearly flat field") {
    const DistanceGrid grid = DistanceGrid::regular(0.25, 32);
    const int reps = 30;
    std::vector<double> sigma2s;
    for (int i = 0; i < reps; ++i) {
        RngStream rng(6, static_cast<std::uint64_t>(i));
        const PointPattern p = simulate_poisson(PoissonParams{200.0}, Window::unit_square(), rng);
        const LgcpParams fit = fit_lgcp(p, grid);
        sigma2s.push_back(fit.sigma2);

        // construction identity: exp(mu + sigma2/2) * area == N exactly
        CHECK(std::exp(fit.mu + 0.5 * fit.sigma2) ==
              doctest::Approx(static_cast<double>(p.size())).epsilon(1e-12));
    }
    CHECK(testutil::mean_se(sigma2s).mean < 0.15);
}

TEST_CASE("lgcp minimum contrast recovers clustering strength") {
    const DistanceGrid grid = DistanceGrid::regular(0.25, 32);
    const int reps = 200;
    std::vector<double> sigma2s;
    for (int i = 0; i < reps; ++i) {
        RngStream rng(7, static_cast<std::uint64_t>(i));
        const PointPattern p =
            simulate_lgcp(LgcpParams{5.0, 0.6, 0.05}, Window::unit_square(), rng, 32);
        if (p.size() < 2) continue;
        sigma2s.push_back(fit_lgcp(p, grid).sigma2);
    }
    std::sort(sigma2s.begin(), sigma2s.end());
    const double median = sigma2s[sigma2s.size() / 2];
    CHECK(median > 0.3);
    CHECK(median < 1.0);
}

TEST_CASE("mixture construction") {
    RngStream rng(8, 0);
    std::vector<PointPattern> patterns;
    for (int i = 0; i < 10; ++i)
        patterns.push_back(simulate_poisson(PoissonParams{200.0}, Window::unit_square(), rng));

    const NullModel mix = build_mixture_null(patterns, ModelFamily::poisson);
    REQUIRE(mix.is_mixture());
    const auto& components = std::get<MixtureModel>(mix.spec).components;
    CHECK(components.size() == 10);

    // mixture mean intensity equals the average fitted intensity
    double avg = 0.0;
    for (const auto& p : patterns) avg += fit_poisson(p).intensity;
    avg /= 10.0;
    double mix_mean = 0.0;
    for (const auto& c : components) mix_mean += std::get<PoissonParams>(c.spec).intensity;
    mix_mean /= 10.0;
    CHECK(mix_mean == doctest::Approx(avg));

    // singleton mixture equals the single fit
    const NullModel single = build_mixture_null({patterns[0]}, ModelFamily::poisson);
    CHECK(std::get<PoissonParams>(std::get<MixtureModel>(single.spec).components[0].spec)
              .intensity == fit_poisson(patterns[0]).intensity);

    CHECK_THROWS_AS(build_mixture_null({}, ModelFamily::poisson), std::invalid_argument);
}

TEST_CASE("fitted model report") {
    RngStream rng(9, 0);
    std::vector<PointPattern> patterns;
    for (int i = 0; i < 2; ++i)
        patterns.push_back(simulate_poisson(PoissonParams{100.0}, Window::unit_square(), rng));
    const std::string report = fitted_model_report(patterns, ModelFamily::poisson);
    CHECK(report.find("family poisson") != std::string::npos);
    CHECK(report.find("pattern 0") != std::string::npos);
    CHECK(report.find("poisson:") != std::string::npos);
}
