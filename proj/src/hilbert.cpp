#include "hc/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "hc/error.hpp"

namespace hc {

std::string_view to_string(Space space) noexcept {
    switch (space) {
    case Space::Euclidean: return "euclidean";
    case Space::Curve: return "curve";
    case Space::Quantile: return "quantile";
    }
    return "unknown";
}

Space parse_space(std::string_view text) {
    if (text == "euclidean") return Space::Euclidean;
    if (text == "curve") return Space::Curve;
    if (text == "quantile") return Space::Quantile;
    fail(ErrorCode::InvalidArgument, fmt::format("unknown space '{}'", text));
}

std::shared_ptr<const Grid> make_curve_grid(std::vector<double> nodes) {
    require(!nodes.empty(), ErrorCode::InvalidArgument, "curve grid must be nonempty");
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        require(std::isfinite(nodes[j]), ErrorCode::InvalidArgument, "curve grid nodes must be finite");
        if (j > 0) {
            require(nodes[j] > nodes[j - 1], ErrorCode::InvalidArgument,
                    fmt::format("curve grid must be strictly increasing (node {})", j));
        }
    }
    const std::size_t m = nodes.size();
    std::vector<double> weights(m, 0.0);
    if (m == 1) {
        // A single node carries no quadrature length; treat it as a point evaluation.
        weights[0] = 1.0;
    } else {
        for (std::size_t j = 0; j + 1 < m; ++j) {
            const double half = 0.5 * (nodes[j + 1] - nodes[j]);
            weights[j] += half;
            weights[j + 1] += half;
        }
    }
    return std::make_shared<const Grid>(Grid{std::move(nodes), std::move(weights)});
}

std::shared_ptr<const Grid> make_uniform_grid(std::size_t m, double lo, double hi) {
    require(m >= 2 && hi > lo, ErrorCode::InvalidArgument, "uniform grid needs m >= 2 and hi > lo");
    std::vector<double> nodes(m);
    for (std::size_t j = 0; j < m; ++j) {
        nodes[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(m - 1);
    }
    nodes.back() = hi;
    return make_curve_grid(std::move(nodes));
}

std::shared_ptr<const Grid> make_quantile_grid(std::size_t m) {
    require(m >= 1, ErrorCode::InvalidArgument, "quantile grid needs m >= 1");
    std::vector<double> nodes(m);
    for (std::size_t j = 0; j < m; ++j) {
        nodes[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    }
    return std::make_shared<const Grid>(
        Grid{std::move(nodes), std::vector<double>(m, 1.0 / static_cast<double>(m))});
}

HilbertPoint HilbertPoint::euclidean(std::vector<double> values) {
    require(!values.empty(), ErrorCode::InvalidArgument, "euclidean point must have dimension >= 1");
    return {Space::Euclidean, nullptr, std::move(values)};
}

HilbertPoint HilbertPoint::curve(std::shared_ptr<const Grid> grid, std::vector<double> values) {
    require(grid != nullptr, ErrorCode::InvalidArgument, "curve requires a grid");
    require(grid->nodes.size() == values.size(), ErrorCode::DimensionMismatch,
            fmt::format("curve has {} values on a {}-node grid", values.size(), grid->nodes.size()));
    return {Space::Curve, std::move(grid), std::move(values)};
}

HilbertPoint HilbertPoint::quantile(std::shared_ptr<const Grid> grid, std::vector<double> values) {
    require(grid != nullptr, ErrorCode::InvalidArgument, "quantile function requires a grid");
    require(grid->nodes.size() == values.size(), ErrorCode::DimensionMismatch,
            fmt::format("quantile function has {} values on a {}-node grid", values.size(),
                        grid->nodes.size()));
    for (std::size_t j = 1; j < values.size(); ++j) {
        require(values[j] >= values[j - 1], ErrorCode::InvalidArgument,
                fmt::format("quantile values must be nondecreasing (entry {})", j));
    }
    return {Space::Quantile, std::move(grid), std::move(values)};
}

HilbertPoint HilbertPoint::quantile(std::vector<double> values) {
    auto grid = make_quantile_grid(values.size());
    return quantile(std::move(grid), std::move(values));
}

bool HilbertPoint::comparable(const HilbertPoint& other) const noexcept {
    if (space_ != other.space_ || values_.size() != other.values_.size()) {
        return false;
    }
    if (space_ == Space::Euclidean || grid_ == other.grid_) {
        return true;
    }
    if (!grid_ || !other.grid_) {
        return false;
    }
    return grid_->nodes == other.grid_->nodes;
}

void require_comparable(const HilbertPoint& a, const HilbertPoint& b) {
    if (!a.comparable(b)) {
        fail(ErrorCode::DimensionMismatch,
             fmt::format("incomparable points: {}[{}] vs {}[{}]", to_string(a.space()), a.size(),
                         to_string(b.space()), b.size()));
    }
}

void require_homogeneous(std::span<const HilbertPoint> points) {
    for (std::size_t i = 1; i < points.size(); ++i) {
        require_comparable(points[0], points[i]);
    }
}

namespace {

template <typename Op>
HilbertPoint pointwise(const HilbertPoint& a, const HilbertPoint& b, Op op) {
    require_comparable(a, b);
    std::vector<double> out(a.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = op(a[j], b[j]);
    }
    switch (a.space()) {
    case Space::Euclidean: return HilbertPoint::euclidean(std::move(out));
    case Space::Curve: return HilbertPoint::curve(a.grid(), std::move(out));
    case Space::Quantile: break;
    }
    // Differences of quantile functions are not monotone; they live in L2 as curves.
    return HilbertPoint::curve(a.grid(), std::move(out));
}

} // namespace

HilbertPoint operator+(const HilbertPoint& a, const HilbertPoint& b) {
    return pointwise(a, b, [](double u, double v) { return u + v; });
}

HilbertPoint operator-(const HilbertPoint& a, const HilbertPoint& b) {
    return pointwise(a, b, [](double u, double v) { return u - v; });
}

HilbertPoint operator*(double scale, const HilbertPoint& a) {
    std::vector<double> out(a.values().begin(), a.values().end());
    for (double& v : out) {
        v *= scale;
    }
    if (a.space() == Space::Euclidean) {
        return HilbertPoint::euclidean(std::move(out));
    }
    if (a.space() == Space::Quantile && scale >= 0.0) {
        return HilbertPoint::quantile(a.grid(), std::move(out));
    }
    return HilbertPoint::curve(a.grid(), std::move(out));
}

namespace {

bool same_geometry(const HilbertPoint& a, const HilbertPoint& b) {
    // Quantile and curve points on the same grid share an L2 inner product;
    // this arises for differences of quantile functions.
    if (a.space() == b.space()) {
        return a.comparable(b);
    }
    if (a.space() == Space::Euclidean || b.space() == Space::Euclidean) {
        return false;
    }
    return a.size() == b.size() && a.grid() && b.grid() &&
           (a.grid() == b.grid() || a.grid()->nodes == b.grid()->nodes);
}

} // namespace

double inner(const HilbertPoint& a, const HilbertPoint& b) {
    if (!same_geometry(a, b)) {
        require_comparable(a, b);
    }
    const auto u = a.values();
    const auto v = b.values();
    double sum = 0.0;
    if (a.space() == Space::Euclidean) {
        for (std::size_t j = 0; j < u.size(); ++j) {
            sum += u[j] * v[j];
        }
        return sum;
    }
    const auto& w = a.grid()->weights;
    for (std::size_t j = 0; j < u.size(); ++j) {
        sum += w[j] * u[j] * v[j];
    }
    return sum;
}

double squared_distance(const HilbertPoint& a, const HilbertPoint& b) {
    require_comparable(a, b);
    const auto u = a.values();
    const auto v = b.values();
    double sum = 0.0;
    if (a.space() == Space::Euclidean) {
        for (std::size_t j = 0; j < u.size(); ++j) {
            const double d = u[j] - v[j];
            sum += d * d;
        }
        return sum;
    }
    const auto& w = a.grid()->weights;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double d = u[j] - v[j];
        sum += w[j] * d * d;
    }
    return sum;
}

double distance(const HilbertPoint& a, const HilbertPoint& b) {
    return std::sqrt(squared_distance(a, b));
}

HilbertPoint empirical_quantile_function(std::span<const double> samples, std::size_t m) {
    require(!samples.empty(), ErrorCode::InvalidArgument, "empirical quantile of an empty sample");
    require(m >= 1, ErrorCode::InvalidArgument, "quantile grid needs m >= 1");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> values(m);
    for (std::size_t j = 1; j <= m; ++j) {
        // ceil(p_j * n) with p_j = (2j - 1)/(2m), in exact integer arithmetic.
        const std::size_t rank = ((2 * j - 1) * n + 2 * m - 1) / (2 * m);
        values[j - 1] = sorted[std::clamp<std::size_t>(rank, 1, n) - 1];
    }
    return HilbertPoint::quantile(make_quantile_grid(m), std::move(values));
}

} // namespace hc
