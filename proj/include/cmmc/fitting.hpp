#pragma once

#include "cmmc/geometry.hpp"
#include "cmmc/models.hpp"
#include "cmmc/summaries.hpp"

#include <string>
#include <vector>

namespace cmmc {

enum class ModelFamily { poisson, strauss, lgcp };

std::string model_family_name(ModelFamily f);
ModelFamily parse_model_family(const std::string& name);

/// Maximum likelihood: lambda_hat = N / area. An empty pattern yields the
/// degenerate intensity 0 (see PoissonParams::degenerate()).
PoissonParams fit_poisson(const PointPattern& p);

/// Maximum profile pseudolikelihood via the Berman-Turner device on a 32x32
/// dummy-point lattice; for each candidate interaction radius the
/// pseudolikelihood is maximized over (beta, gamma) by Nelder-Mead and the
/// profile winner is returned. gamma is clamped to [0,1]; boundary estimates
/// gamma_hat = 1 (collapse to Poisson) are kept as-is.
StraussParams fit_strauss(const PointPattern& p, const std::vector<double>& r_grid);

/// Minimum contrast with Ripley's K (exponent 1/4), integrating the LGCP
/// K-model K(r) = int_0^r 2 pi s exp(sigma2 exp(-s/scale)) ds by a 256-point
/// trapezoid rule; mu_hat = log(N/area) - sigma2_hat/2, so that
/// exp(mu_hat + sigma2_hat/2) * area == N exactly.
LgcpParams fit_lgcp(const PointPattern& p, const DistanceGrid& grid);

/// Fits each pattern independently and returns the equal-weight mixture.
NullModel build_mixture_null(const std::vector<PointPattern>& patterns, ModelFamily family);

/// Per-pattern estimates as a structured text report.
std::string fitted_model_report(const std::vector<PointPattern>& patterns, ModelFamily family);

} // namespace cmmc
