#include "cmmc/generate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace cmmc {

PointPattern simulate_poisson(const PoissonParams& params, const Window& w, RngStream& rng) {
    validate(params);
    const long n = rng.poisson(params.intensity * window_area(w));
    std::vector<PointXY> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        pts.push_back({rng.uniform(w.x_min, w.x_max), rng.uniform(w.y_min, w.y_max)});
    return PointPattern(w, std::move(pts));
}

namespace {

// Uniform bucket grid with cell size >= R for O(1) expected neighbor counts.
class NeighborGrid {
public:
    NeighborGrid(const Window& w, double radius)
        : w_(w), r2_(radius * radius),
          nx_(std::max(1, static_cast<int>(std::floor(w.width() / radius)))),
          ny_(std::max(1, static_cast<int>(std::floor(w.height() / radius)))),
          buckets_(static_cast<std::size_t>(nx_) * ny_) {
        nx_ = std::min(nx_, 1024);
        ny_ = std::min(ny_, 1024);
        buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    }

    void insert(int id, const PointXY& p) { buckets_[cell(p)].push_back(id); }

    void erase(int id, const PointXY& p) {
        auto& b = buckets_[cell(p)];
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (b[i] == id) {
                b[i] = b.back();
                b.pop_back();
                return;
            }
        }
    }

    // number of points within the interaction radius of q, excluding `skip`
    int count_close(const PointXY& q, const std::vector<PointXY>& pts, int skip) const {
        const int cx = cell_x(q.x), cy = cell_y(q.y);
        int count = 0;
        for (int dy = -1; dy <= 1; ++dy) {
            const int yy = cy + dy;
            if (yy < 0 || yy >= ny_) continue;
            for (int dx = -1; dx <= 1; ++dx) {
                const int xx = cx + dx;
                if (xx < 0 || xx >= nx_) continue;
                for (const int j : buckets_[static_cast<std::size_t>(yy) * nx_ + xx]) {
                    if (j == skip) continue;
                    const double ddx = pts[j].x - q.x;
                    const double ddy = pts[j].y - q.y;
                    if (ddx * ddx + ddy * ddy < r2_) ++count;
                }
            }
        }
        return count;
    }

private:
    int cell_x(double x) const {
        int c = static_cast<int>((x - w_.x_min) / w_.width() * nx_);
        return std::min(std::max(c, 0), nx_ - 1);
    }
    int cell_y(double y) const {
        int c = static_cast<int>((y - w_.y_min) / w_.height() * ny_);
        return std::min(std::max(c, 0), ny_ - 1);
    }
    std::size_t cell(const PointXY& p) const {
        return static_cast<std::size_t>(cell_y(p.y)) * nx_ + cell_x(p.x);
    }

    Window w_;
    double r2_;
    int nx_, ny_;
    std::vector<std::vector<int>> buckets_;
};

inline double interaction_weight(double gamma, int t) {
    if (gamma == 0.0) return t == 0 ? 1.0 : 0.0;
    return std::pow(gamma, t);
}

} // namespace

PointPattern simulate_strauss(const StraussParams& params, const Window& w, RngStream& rng,
                              long n_steps) {
    validate(params);
    if (n_steps < 1) throw std::invalid_argument("simulate_strauss: n_steps must be >= 1");

    const double area = window_area(w);
    std::vector<PointXY> pts;
    NeighborGrid grid(w, params.radius);

    // Poisson(beta) initial state; for gamma = 1 this is already stationary.
    {
        const long n0 = rng.poisson(params.beta * area);
        pts.reserve(static_cast<std::size_t>(n0) + 64);
        for (long i = 0; i < n0; ++i) {
            pts.push_back({rng.uniform(w.x_min, w.x_max), rng.uniform(w.y_min, w.y_max)});
            grid.insert(static_cast<int>(i), pts.back());
        }
    }

    const double beta_area = params.beta * area;
    for (long step = 0; step < n_steps; ++step) {
        const std::uint64_t move = rng.uniform_int(3);
        const int n = static_cast<int>(pts.size());
        if (move == 0) { // birth
            const PointXY u{rng.uniform(w.x_min, w.x_max), rng.uniform(w.y_min, w.y_max)};
            const int t = grid.count_close(u, pts, -1);
            const double accept = beta_area * interaction_weight(params.gamma, t) / (n + 1);
            if (accept >= 1.0 || rng.uniform() < accept) {
                pts.push_back(u);
                grid.insert(n, u);
            }
        } else if (move == 1) { // death
            if (n == 0) continue;
            const int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
            const int t = grid.count_close(pts[i], pts, i);
            const double wgt = interaction_weight(params.gamma, t);
            const double accept = (wgt > 0.0) ? n / (beta_area * wgt) : 1.0;
            if (accept >= 1.0 || rng.uniform() < accept) {
                grid.erase(i, pts[i]);
                if (i != n - 1) {
                    grid.erase(n - 1, pts[n - 1]);
                    pts[i] = pts[n - 1];
                    grid.insert(i, pts[i]);
                }
                pts.pop_back();
            }
        } else { // shift: relocate one point uniformly
            if (n == 0) continue;
            const int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
            const PointXY u{rng.uniform(w.x_min, w.x_max), rng.uniform(w.y_min, w.y_max)};
            const int t_new = grid.count_close(u, pts, i);
            const int t_old = grid.count_close(pts[i], pts, i);
            double accept;
            if (params.gamma == 0.0)
                accept = (t_new == 0) ? 1.0 : 0.0;
            else
                accept = std::pow(params.gamma, t_new - t_old);
            if (accept >= 1.0 || rng.uniform() < accept) {
                grid.erase(i, pts[i]);
                pts[i] = u;
                grid.insert(i, u);
            }
        }
    }
    return PointPattern(w, std::move(pts));
}

namespace {

struct FieldKey {
    double sigma2, scale, wx, wy;
    int grid;
    bool operator<(const FieldKey& o) const {
        return std::tie(sigma2, scale, wx, wy, grid) <
               std::tie(o.sigma2, o.scale, o.wx, o.wy, o.grid);
    }
};

// Cholesky factors are expensive (O(g^6)); keep the few most recent.
std::shared_ptr<const Eigen::MatrixXd> field_cholesky(const FieldKey& key) {
    static std::mutex mu;
    static std::map<FieldKey, std::shared_ptr<const Eigen::MatrixXd>> cache;
    static std::deque<FieldKey> order;
    {
        std::lock_guard<std::mutex> lock(mu);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const int g = key.grid;
    const long cells = static_cast<long>(g) * g;
    const double cw = key.wx / g, ch = key.wy / g;
    Eigen::MatrixXd cov(cells, cells);
    for (long a = 0; a < cells; ++a) {
        const double ax = (a % g + 0.5) * cw;
        const double ay = (a / g + 0.5) * ch;
        for (long b = 0; b <= a; ++b) {
            const double bx = (b % g + 0.5) * cw;
            const double by = (b / g + 0.5) * ch;
            const double d = std::hypot(ax - bx, ay - by);
            const double c = key.sigma2 * std::exp(-d / key.scale);
            cov(a, b) = c;
            cov(b, a) = c;
        }
        cov(a, a) += 1e-10;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("simulate_lgcp: covariance not positive definite");
    auto factor = std::make_shared<const Eigen::MatrixXd>(llt.matrixL());

    std::lock_guard<std::mutex> lock(mu);
    if (cache.find(key) == cache.end()) {
        cache.emplace(key, factor);
        order.push_back(key);
        while (order.size() > 4) {
            cache.erase(order.front());
            order.pop_front();
        }
    }
    return factor;
}

} // namespace

PointPattern simulate_lgcp(const LgcpParams& params, const Window& w, RngStream& rng,
                           int grid_size) {
    validate(params);
    if (grid_size < 16) throw std::invalid_argument("simulate_lgcp: grid_size must be >= 16");

    const int g = grid_size;
    const long cells = static_cast<long>(g) * g;
    const double cw = w.width() / g, ch = w.height() / g;
    const double cell_area = cw * ch;

    Eigen::VectorXd field = Eigen::VectorXd::Zero(cells);
    if (params.sigma2 > 0.0) {
        const auto factor =
            field_cholesky({params.sigma2, params.scale, w.width(), w.height(), g});
        Eigen::VectorXd z(cells);
        for (long i = 0; i < cells; ++i) z(i) = rng.normal();
        field = (*factor) * z;
    }

    std::vector<PointXY> pts;
    for (long k = 0; k < cells; ++k) {
        const double rate = std::exp(params.mu + field(k)) * cell_area;
        const long count = rng.poisson(rate);
        const double x0 = w.x_min + (k % g) * cw;
        const double y0 = w.y_min + (k / g) * ch;
        for (long c = 0; c < count; ++c)
            pts.push_back({rng.uniform(x0, x0 + cw), rng.uniform(y0, y0 + ch)});
    }
    return PointPattern(w, std::move(pts));
}

PointPattern simulate_null(const NullModel& model, const Window& w, RngStream& rng,
                           const SimOptions& opts) {
    return std::visit(
        [&](const auto& p) -> PointPattern {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PoissonParams>) {
                return simulate_poisson(p, w, rng);
            } else if constexpr (std::is_same_v<T, StraussParams>) {
                return simulate_strauss(p, w, rng, opts.strauss_steps);
            } else if constexpr (std::is_same_v<T, LgcpParams>) {
                return simulate_lgcp(p, w, rng, opts.lgcp_grid);
            } else {
                if (p.components.empty())
                    throw std::invalid_argument("simulate_null: empty mixture");
                const auto idx = rng.uniform_int(p.components.size());
                return simulate_null(p.components[idx], w, rng, opts);
            }
        },
        model.spec);
}

} // namespace cmmc
