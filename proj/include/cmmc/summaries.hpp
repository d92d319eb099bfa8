#pragma once

#include "cmmc/geometry.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace cmmc {

/// Strictly increasing evaluation distances, r_1 > 0.
struct DistanceGrid {
    std::vector<double> r;

    explicit DistanceGrid(std::vector<double> values) : r(std::move(values)) {
        if (r.size() < 2) throw std::invalid_argument("DistanceGrid: need at least 2 points");
        if (!(r.front() > 0.0)) throw std::invalid_argument("DistanceGrid: r_1 must be > 0");
        for (std::size_t i = 1; i < r.size(); ++i)
            if (!(r[i] > r[i - 1]))
                throw std::invalid_argument("DistanceGrid: values must be strictly increasing");
    }

    /// M equally spaced points from r_max/M to r_max.
    static DistanceGrid regular(double r_max, int m) {
        if (m < 2 || !(r_max > 0.0)) throw std::invalid_argument("DistanceGrid::regular");
        std::vector<double> v(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = r_max * (i + 1) / m;
        return DistanceGrid(std::move(v));
    }

    /// Default grid for the unit square: 64 points up to a quarter side.
    static DistanceGrid default_unit_square() { return regular(0.25, 64); }

    std::size_t size() const { return r.size(); }
    bool operator==(const DistanceGrid& o) const { return r == o.r; }
};

enum class CurveKind { raw_k, centered_l, j_function };

std::string curve_kind_name(CurveKind k);

/// A functional summary statistic evaluated on a distance grid.
struct CurveStatistic {
    DistanceGrid grid;
    std::vector<double> values;
    CurveKind kind;
};

class DegeneratePatternError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ripley's K with translation edge correction,
///   K(r) = area/(N(N-1)) * sum_{i != j} 1[d_ij <= r] * e_ij(r),
///   e_ij  = area / ((width - |dx|) * (height - |dy|)).
/// Requires N >= 2 and max(r) <= half the shorter window side.
CurveStatistic k_function(const PointPattern& p, const DistanceGrid& grid);

/// Besag's centered L: sqrt(K(r)/pi) - r.
CurveStatistic centered_l_function(const PointPattern& p, const DistanceGrid& grid);

/// J(r) = (1 - G(r)) / (1 - F(r)) with border-corrected (reduced sample)
/// estimates of the nearest-neighbour distribution G and the empty-space
/// function F; F uses a 64x64 lattice of query points. Where 1 - F < 1e-6
/// the curve is truncated and held at the last valid value.
CurveStatistic j_function(const PointPattern& p, const DistanceGrid& grid);

/// CSV with header `r,value`, 17-significant-digit decimals.
void write_curve_csv(const CurveStatistic& c, const std::string& path);
CurveStatistic read_curve_csv(const std::string& path, CurveKind kind);

} // namespace cmmc
