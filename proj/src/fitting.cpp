#include "cmmc/fitting.hpp"

#include "cmmc/pattern_io.hpp"
#include "optim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cmmc {

std::string model_family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::poisson: return "poisson";
        case ModelFamily::strauss: return "strauss";
        case ModelFamily::lgcp: return "lgcp";
    }
    return "?";
}

ModelFamily parse_model_family(const std::string& name) {
    if (name == "poisson") return ModelFamily::poisson;
    if (name == "strauss") return ModelFamily::strauss;
    if (name == "lgcp") return ModelFamily::lgcp;
    throw std::invalid_argument("unknown model family: " + name);
}

PoissonParams fit_poisson(const PointPattern& p) {
    return PoissonParams{static_cast<double>(p.size()) / window_area(p.window())};
}

namespace {

constexpr int kDummySide = 32;

struct StraussSummary {
    double neighbor_sum = 0.0;          // sum_i #{j != i : d_ij < R}
    std::vector<long> dummy_hist;       // histogram of neighbor counts at dummy points
    double quad_weight = 0.0;           // area / (#dummy points)
};

StraussSummary strauss_summary(const PointPattern& p, double radius) {
    const auto& pts = p.points();
    const std::size_t n = pts.size();
    const Window& w = p.window();
    StraussSummary s;
    s.quad_weight = window_area(w) / (kDummySide * kDummySide);

    const double r2 = radius * radius;
    long pairs2 = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
            if (dx * dx + dy * dy < r2) ++pairs2;
        }
    s.neighbor_sum = static_cast<double>(pairs2);

    s.dummy_hist.assign(64, 0);
    for (int iy = 0; iy < kDummySide; ++iy) {
        for (int ix = 0; ix < kDummySide; ++ix) {
            const double qx = w.x_min + (ix + 0.5) * w.width() / kDummySide;
            const double qy = w.y_min + (iy + 0.5) * w.height() / kDummySide;
            long t = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const double dx = qx - pts[j].x, dy = qy - pts[j].y;
                if (dx * dx + dy * dy < r2) ++t;
            }
            if (t >= static_cast<long>(s.dummy_hist.size()))
                s.dummy_hist.resize(static_cast<std::size_t>(t) + 1, 0);
            ++s.dummy_hist[static_cast<std::size_t>(t)];
        }
    }
    return s;
}

// negative log pseudolikelihood in (log beta, gamma), gamma clamped to [0,1]
double strauss_npl(const StraussSummary& s, double n_points, double log_beta, double gamma_raw) {
    const double gamma = std::min(std::max(gamma_raw, 0.0), 1.0);
    double penalty = 0.0;
    if (gamma_raw < 0.0) penalty = 1e4 * gamma_raw * gamma_raw;
    if (gamma_raw > 1.0) penalty = 1e4 * (gamma_raw - 1.0) * (gamma_raw - 1.0);

    double log_gamma_term;
    if (gamma > 0.0) {
        log_gamma_term = s.neighbor_sum * std::log(gamma);
    } else {
        log_gamma_term = s.neighbor_sum > 0.0 ? -std::numeric_limits<double>::infinity() : 0.0;
    }

    double integral = 0.0;
    double gpow = 1.0; // gamma^0, also for gamma == 0
    for (std::size_t t = 0; t < s.dummy_hist.size(); ++t) {
        if (s.dummy_hist[t] != 0) integral += static_cast<double>(s.dummy_hist[t]) * gpow;
        gpow *= gamma;
    }
    integral *= s.quad_weight * std::exp(log_beta);

    const double logpl = n_points * log_beta + log_gamma_term - integral;
    if (!std::isfinite(logpl)) return 1e30 + penalty;
    return -logpl + penalty;
}

} // namespace

StraussParams fit_strauss(const PointPattern& p, const std::vector<double>& r_grid) {
    if (p.size() < 2) throw std::invalid_argument("fit_strauss: need at least 2 points");
    if (r_grid.empty()) throw std::invalid_argument("fit_strauss: empty radius grid");

    const double n_points = static_cast<double>(p.size());
    const double lambda0 = n_points / window_area(p.window());

    double best_value = -std::numeric_limits<double>::infinity();
    StraussParams best{lambda0, 1.0, r_grid.front()};
    for (const double radius : r_grid) {
        if (!(radius > 0.0)) throw std::invalid_argument("fit_strauss: radius must be > 0");
        const StraussSummary s = strauss_summary(p, radius);
        auto objective = [&](const std::vector<double>& x) {
            return strauss_npl(s, n_points, x[0], x[1]);
        };
        const auto fit = detail::nelder_mead(objective, {std::log(lambda0), 0.5}, 0.4, 1e-9, 400);
        if (!fit.converged)
            throw std::runtime_error("fit_strauss: pseudolikelihood optimizer did not converge at R=" +
                                     format_double(radius) + " after " +
                                     std::to_string(fit.evals) + " evaluations");
        if (-fit.fx > best_value) {
            best_value = -fit.fx;
            best = StraussParams{std::exp(fit.x[0]), std::min(std::max(fit.x[1], 0.0), 1.0), radius};
        }
    }
    return best;
}

namespace {

// LGCP K-function for exponential covariance, trapezoid on [0, r]
double lgcp_k_model(double r, double sigma2, double scale) {
    constexpr int kSteps = 256;
    const double h = r / kSteps;
    double acc = 0.0;
    double prev = 0.0; // integrand at s = 0
    for (int i = 1; i <= kSteps; ++i) {
        const double s = h * i;
        const double cur = 2.0 * std::numbers::pi * s * std::exp(sigma2 * std::exp(-s / scale));
        acc += 0.5 * (prev + cur) * h;
        prev = cur;
    }
    return acc;
}

} // namespace

LgcpParams fit_lgcp(const PointPattern& p, const DistanceGrid& grid) {
    if (p.size() < 2) throw std::invalid_argument("fit_lgcp: need at least 2 points");
    const CurveStatistic k_hat = k_function(p, grid);

    std::vector<double> k_root(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t)
        k_root[t] = std::pow(std::max(k_hat.values[t], 0.0), 0.25);

    auto contrast = [&](const std::vector<double>& x) {
        const double sigma2 = std::exp(x[0]);
        const double scale = std::exp(x[1]);
        if (!std::isfinite(sigma2) || !std::isfinite(scale) || scale <= 0.0) return 1e30;
        double acc = 0.0;
        double prev_d = 0.0, prev_r = 0.0;
        for (std::size_t t = 0; t < grid.size(); ++t) {
            const double model = lgcp_k_model(grid.r[t], sigma2, scale);
            const double d = k_root[t] - std::pow(model, 0.25);
            const double dd = d * d;
            acc += 0.5 * (prev_d + dd) * (grid.r[t] - prev_r);
            prev_d = dd;
            prev_r = grid.r[t];
        }
        return acc;
    };

    const std::vector<std::vector<double>> starts = {
        {std::log(0.5), std::log(0.05)},
        {std::log(0.1), std::log(0.15)},
    };
    detail::NelderMeadResult best;
    best.fx = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (const auto& x0 : starts) {
        const auto fit = detail::nelder_mead(contrast, x0, 0.8, 1e-12, 400);
        any_converged = any_converged || fit.converged;
        if (fit.fx < best.fx) best = fit;
    }
    if (!any_converged)
        throw std::runtime_error("fit_lgcp: minimum contrast optimizer did not converge");

    const double sigma2 = std::exp(best.x[0]);
    const double scale = std::exp(best.x[1]);
    const double mu = std::log(static_cast<double>(p.size()) / window_area(p.window())) -
                      0.5 * sigma2;
    return LgcpParams{mu, sigma2, scale};
}

namespace {

std::vector<double> default_strauss_radii(const Window& w) {
    std::vector<double> r;
    const double side = w.shorter_side();
    for (int i = 1; i <= 10; ++i) r.push_back(side * 0.01 * i);
    return r;
}

NullModel fit_one(const PointPattern& p, ModelFamily family) {
    switch (family) {
        case ModelFamily::poisson: return NullModel(fit_poisson(p));
        case ModelFamily::strauss: return NullModel(fit_strauss(p, default_strauss_radii(p.window())));
        case ModelFamily::lgcp: {
            const DistanceGrid grid = DistanceGrid::regular(p.window().shorter_side() / 4.0, 32);
            return NullModel(fit_lgcp(p, grid));
        }
    }
    throw std::logic_error("fit_one: bad family");
}

} // namespace

NullModel build_mixture_null(const std::vector<PointPattern>& patterns, ModelFamily family) {
    if (patterns.empty()) throw std::invalid_argument("build_mixture_null: empty pattern list");
    MixtureModel mix;
    mix.components.reserve(patterns.size());
    for (const auto& p : patterns) mix.components.push_back(fit_one(p, family));
    return NullModel(std::move(mix));
}

std::string fitted_model_report(const std::vector<PointPattern>& patterns, ModelFamily family) {
    std::ostringstream out;
    out << "family " << model_family_name(family) << "\n";
    out << "patterns " << patterns.size() << "\n";
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const NullModel fitted = fit_one(patterns[i], family);
        out << "pattern " << i << " n_points " << patterns[i].size() << " model "
            << model_to_string(fitted) << "\n";
    }
    return out.str();
}

} // namespace cmmc
