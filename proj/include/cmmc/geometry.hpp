#pragma once

#include <stdexcept>
#include <vector>

namespace cmmc {

/// Rectangular observation window [x_min,x_max] x [y_min,y_max].
struct Window {
    double x_min, x_max, y_min, y_max;

    Window(double x0, double x1, double y0, double y1)
        : x_min(x0), x_max(x1), y_min(y0), y_max(y1) {
        if (!(x_min < x_max) || !(y_min < y_max))
            throw std::invalid_argument("Window: need x_min < x_max and y_min < y_max");
    }

    static Window unit_square() { return Window(0.0, 1.0, 0.0, 1.0); }

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double shorter_side() const { return width() < height() ? width() : height(); }

    /// Boundary points count as inside.
    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }

    bool operator==(const Window& o) const {
        return x_min == o.x_min && x_max == o.x_max && y_min == o.y_min && y_max == o.y_max;
    }
};

inline double window_area(const Window& w) { return w.width() * w.height(); }

struct PointXY {
    double x, y;
    bool operator==(const PointXY& o) const { return x == o.x && y == o.y; }
};

/// A finite planar point pattern together with its observation window.
/// Point order is preserved on I/O but carries no meaning; all summary
/// statistics are permutation-invariant. Immutable after construction.
class PointPattern {
public:
    PointPattern(Window window, std::vector<PointXY> points)
        : window_(window), points_(std::move(points)) {
        for (const auto& p : points_)
            if (!window_.contains(p.x, p.y))
                throw std::invalid_argument("PointPattern: point outside window");
    }

    const Window& window() const { return window_; }
    const std::vector<PointXY>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }

    bool operator==(const PointPattern& o) const {
        return window_ == o.window_ && points_ == o.points_;
    }

private:
    Window window_;
    std::vector<PointXY> points_;
};

} // namespace cmmc
