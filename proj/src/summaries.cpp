#include "cmmc/summaries.hpp"

#include "cmmc/pattern_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace cmmc {

std::string curve_kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::raw_k: return "raw_K";
        case CurveKind::centered_l: return "centered_L";
        case CurveKind::j_function: return "J";
    }
    return "?";
}

namespace {

void check_grid_valid(const PointPattern& p, const DistanceGrid& grid) {
    if (!(grid.r.back() <= 0.5 * p.window().shorter_side() + 1e-12))
        throw std::invalid_argument(
            "summary grid extends beyond half the shorter window side");
}

// Summation order is made canonical by sorting the points, so statistics are
// bit-identical under any permutation of the input.
std::vector<PointXY> sorted_points(const PointPattern& p) {
    std::vector<PointXY> pts = p.points();
    std::sort(pts.begin(), pts.end(), [](const PointXY& a, const PointXY& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    return pts;
}

} // namespace

CurveStatistic k_function(const PointPattern& p, const DistanceGrid& grid) {
    check_grid_valid(p, grid);
    const std::size_t n = p.size();
    if (n < 2) throw DegeneratePatternError("k_function: need at least 2 points");

    const Window& w = p.window();
    const double area = window_area(w);
    const double width = w.width(), height = w.height();
    const double r_max = grid.r.back();
    const auto pts = sorted_points(p);

    std::vector<double> hist(grid.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = std::fabs(pts[i].x - pts[j].x);
            const double dy = std::fabs(pts[i].y - pts[j].y);
            const double d = std::hypot(dx, dy);
            if (d > r_max) continue;
            const double weight = area / ((width - dx) * (height - dy));
            const auto bin = std::lower_bound(grid.r.begin(), grid.r.end(), d) - grid.r.begin();
            hist[static_cast<std::size_t>(bin)] += 2.0 * weight;
        }
    }
    std::vector<double> values(grid.size());
    double cum = 0.0;
    const double scale = area / (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
    for (std::size_t t = 0; t < grid.size(); ++t) {
        cum += hist[t];
        values[t] = scale * cum;
    }
    return CurveStatistic{grid, std::move(values), CurveKind::raw_k};
}

CurveStatistic centered_l_function(const PointPattern& p, const DistanceGrid& grid) {
    CurveStatistic k = k_function(p, grid);
    for (std::size_t t = 0; t < grid.size(); ++t)
        k.values[t] = std::sqrt(k.values[t] / std::numbers::pi) - grid.r[t];
    k.kind = CurveKind::centered_l;
    return k;
}

CurveStatistic j_function(const PointPattern& p, const DistanceGrid& grid) {
    check_grid_valid(p, grid);
    const std::size_t n = p.size();
    if (n < 1) throw DegeneratePatternError("j_function: need at least 1 point");

    const Window& w = p.window();
    const auto pts = sorted_points(p);

    auto border_dist = [&w](double x, double y) {
        return std::min(std::min(x - w.x_min, w.x_max - x), std::min(y - w.y_min, w.y_max - y));
    };

    // nearest-neighbour distance and border distance per data point
    std::vector<double> nnd(n, std::numeric_limits<double>::infinity());
    std::vector<double> bp(n);
    for (std::size_t i = 0; i < n; ++i) {
        bp[i] = border_dist(pts[i].x, pts[i].y);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
            if (d < nnd[i]) nnd[i] = d;
        }
    }

    // empty-space distances from a fixed query lattice
    constexpr int kLattice = 64;
    const std::size_t q_count = kLattice * kLattice;
    std::vector<double> qdist(q_count), qb(q_count);
    for (int iy = 0; iy < kLattice; ++iy) {
        for (int ix = 0; ix < kLattice; ++ix) {
            const double qx = w.x_min + (ix + 0.5) * w.width() / kLattice;
            const double qy = w.y_min + (iy + 0.5) * w.height() / kLattice;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                const double d = std::hypot(qx - pts[j].x, qy - pts[j].y);
                if (d < best) best = d;
            }
            const std::size_t k = static_cast<std::size_t>(iy) * kLattice + ix;
            qdist[k] = best;
            qb[k] = border_dist(qx, qy);
        }
    }

    std::vector<double> values(grid.size(), 1.0);
    double last = 1.0;
    bool truncated = false;
    for (std::size_t t = 0; t < grid.size(); ++t) {
        if (truncated) {
            values[t] = last;
            continue;
        }
        const double r = grid.r[t];
        long g_num = 0, g_den = 0, f_num = 0, f_den = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (bp[i] > r) {
                ++g_den;
                if (nnd[i] <= r) ++g_num;
            }
        }
        for (std::size_t k = 0; k < q_count; ++k) {
            if (qb[k] > r) {
                ++f_den;
                if (qdist[k] <= r) ++f_num;
            }
        }
        if (f_den == 0) {
            truncated = true;
            values[t] = last;
            continue;
        }
        const double g_hat = g_den > 0 ? static_cast<double>(g_num) / g_den : 0.0;
        const double f_hat = static_cast<double>(f_num) / f_den;
        if (1.0 - f_hat < 1e-6) {
            truncated = true;
            values[t] = last;
            continue;
        }
        last = (1.0 - g_hat) / (1.0 - f_hat);
        values[t] = last;
    }
    return CurveStatistic{grid, std::move(values), CurveKind::j_function};
}

void write_curve_csv(const CurveStatistic& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "r,value\n";
    for (std::size_t t = 0; t < c.grid.size(); ++t)
        out << format_double(c.grid.r[t]) << ',' << format_double(c.values[t]) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

CurveStatistic read_curve_csv(const std::string& path, CurveKind kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("r,value", 0) != 0)
        throw std::runtime_error(path + ": expected header `r,value`");
    std::vector<double> rs, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw std::runtime_error(path + ": malformed row `" + line + "`");
        rs.push_back(std::stod(a));
        vs.push_back(std::stod(b));
    }
    return CurveStatistic{DistanceGrid(std::move(rs)), std::move(vs), kind};
}

} // namespace cmmc
