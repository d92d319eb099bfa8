#pragma once

#include "cmmc/geometry.hpp"
#include "cmmc/models.hpp"
#include "cmmc/rng.hpp"

namespace cmmc {

struct SimOptions {
    long strauss_steps = 100000;
    int lgcp_grid = 64;
};

PointPattern simulate_poisson(const PoissonParams& params, const Window& w, RngStream& rng);

/// Approximate Strauss draw via birth-death-shift Metropolis-Hastings
/// (proposal mix 1/3 each), started from an exact Poisson(beta) state and
/// run for n_steps proposals.
PointPattern simulate_strauss(const StraussParams& params, const Window& w, RngStream& rng,
                              long n_steps = 100000);

/// LGCP draw: the zero-mean Gaussian field is simulated on a grid_size x
/// grid_size lattice by dense Cholesky factorization (jitter 1e-10), then
/// per-cell Poisson counts with rate exp(mu + Z_cell) * cell_area are placed
/// uniformly within their cells. Factors are cached per (sigma2, scale,
/// window, grid_size).
PointPattern simulate_lgcp(const LgcpParams& params, const Window& w, RngStream& rng,
                           int grid_size = 64);

/// Dispatch on the model type; a mixture draws one component uniformly at
/// random, a leaf delegates directly (consuming no extra randomness).
PointPattern simulate_null(const NullModel& model, const Window& w, RngStream& rng,
                           const SimOptions& opts = {});

} // namespace cmmc
