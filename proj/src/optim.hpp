#pragma once

#include <algorithm>
#include <functional>
#include <vector>

namespace cmmc::detail {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int evals = 0;
    bool converged = false;
};

/// Plain Nelder-Mead simplex minimization; good enough for the smooth 2-D
/// objectives used by the model fitters.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, double step, double ftol,
                                    int max_evals) {
    const std::size_t d = x0.size();
    NelderMeadResult res;

    std::vector<std::vector<double>> simplex(d + 1, x0);
    std::vector<double> fx(d + 1);
    for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += step;
    for (std::size_t i = 0; i <= d; ++i) {
        fx[i] = f(simplex[i]);
        ++res.evals;
    }

    while (res.evals < max_evals) {
        std::vector<std::size_t> order(d + 1);
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = order[0], worst = order[d], second = order[d - 1];

        if (fx[worst] - fx[best] < ftol) {
            res.converged = true;
            res.x = simplex[best];
            res.fx = fx[best];
            return res;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k];
        }
        for (auto& c : centroid) c /= static_cast<double>(d);

        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k)
                x[k] = centroid[k] + coef * (simplex[worst][k] - centroid[k]);
            return x;
        };

        const auto reflected = blend(-1.0);
        const double f_ref = f(reflected);
        ++res.evals;
        if (f_ref < fx[order[0]]) {
            const auto expanded = blend(-2.0);
            const double f_exp = f(expanded);
            ++res.evals;
            simplex[worst] = f_exp < f_ref ? expanded : reflected;
            fx[worst] = std::min(f_exp, f_ref);
            continue;
        }
        if (f_ref < fx[second]) {
            simplex[worst] = reflected;
            fx[worst] = f_ref;
            continue;
        }
        const auto contracted = blend(0.5);
        const double f_con = f(contracted);
        ++res.evals;
        if (f_con < fx[worst]) {
            simplex[worst] = contracted;
            fx[worst] = f_con;
            continue;
        }
        for (std::size_t i = 0; i <= d; ++i) { // shrink toward best
            if (i == best) continue;
            for (std::size_t k = 0; k < d; ++k)
                simplex[i][k] = 0.5 * (simplex[i][k] + simplex[best][k]);
            fx[i] = f(simplex[i]);
            ++res.evals;
        }
    }

    const auto best_it = std::min_element(fx.begin(), fx.end());
    res.x = simplex[static_cast<std::size_t>(best_it - fx.begin())];
    res.fx = *best_it;
    res.converged = false;
    return res;
}

} // namespace cmmc::detail
