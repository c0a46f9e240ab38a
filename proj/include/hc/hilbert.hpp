#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace hc {

/// The three realized Hilbert spaces.
enum class Space {
    Euclidean, ///< R^d with the dot product
    Curve,     ///< L2 curves on a stored grid, trapezoidal quadrature
    Quantile,  ///< quantile functions on the midpoint grid (j - 0.5)/m
};

std::string_view to_string(Space space) noexcept;
Space parse_space(std::string_view text);

/// Evaluation grid shared between points of one dataset, with the
/// quadrature weights its inner product uses.
struct Grid {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Strictly increasing nodes; trapezoid weights.
std::shared_ptr<const Grid> make_curve_grid(std::vector<double> nodes);
/// p_j = (j - 0.5)/m with equal weights 1/m.
std::shared_ptr<const Grid> make_quantile_grid(std::size_t m);
/// m equispaced nodes on [lo, hi], trapezoid weights.
std::shared_ptr<const Grid> make_uniform_grid(std::size_t m, double lo = 0.0, double hi = 1.0);

/// An element of one of the supported spaces. Immutable after construction.
class HilbertPoint {
public:
    HilbertPoint() = default;

    static HilbertPoint euclidean(std::vector<double> values);
    static HilbertPoint scalar(double value) { return euclidean({value}); }
    static HilbertPoint curve(std::shared_ptr<const Grid> grid, std::vector<double> values);
    /// Values must be nondecreasing and the grid the midpoint grid of the same size.
    static HilbertPoint quantile(std::shared_ptr<const Grid> grid, std::vector<double> values);
    static HilbertPoint quantile(std::vector<double> values);

    Space space() const noexcept { return space_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::shared_ptr<const Grid>& grid() const noexcept { return grid_; }

    /// Same variant, same length and (for grid spaces) identical grid nodes.
    bool comparable(const HilbertPoint& other) const noexcept;

    friend HilbertPoint operator+(const HilbertPoint& a, const HilbertPoint& b);
    friend HilbertPoint operator-(const HilbertPoint& a, const HilbertPoint& b);
    friend HilbertPoint operator*(double scale, const HilbertPoint& a);

private:
    HilbertPoint(Space space, std::shared_ptr<const Grid> grid, std::vector<double> values)
        : space_(space), grid_(std::move(grid)), values_(std::move(values)) {}

    Space space_ = Space::Euclidean;
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
};

double inner(const HilbertPoint& a, const HilbertPoint& b);
double squared_distance(const HilbertPoint& a, const HilbertPoint& b);
double distance(const HilbertPoint& a, const HilbertPoint& b);

/// Throws a dimension-mismatch error unless `a` and `b` are comparable.
void require_comparable(const HilbertPoint& a, const HilbertPoint& b);
/// Throws unless every point is comparable with the first.
void require_homogeneous(std::span<const HilbertPoint> points);

/// Empirical quantile function on the midpoint grid: entry j is the
/// ceil(p_j * n)-th order statistic of the samples.
HilbertPoint empirical_quantile_function(std::span<const double> samples, std::size_t m);

} // namespace hc
