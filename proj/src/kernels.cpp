#include "hc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "hc/error.hpp"

namespace hc {

std::string_view to_string(KernelFamily family) noexcept {
    switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    }
    return "unknown";
}

KernelFamily parse_kernel_family(std::string_view text) {
    if (text == "gaussian") return KernelFamily::Gaussian;
    fail(ErrorCode::InvalidArgument, fmt::format("unknown kernel family '{}'", text));
}

void KernelSpec::validate() const {
    require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::InvalidArgument,
            fmt::format("kernel bandwidth must be positive, got {}", sigma));
}

double KernelSpec::from_squared_distance(double d2) const noexcept {
    return std::exp(-sigma * d2);
}

namespace {

void require_space(const KernelSpec& spec, const HilbertPoint& p) {
    if (p.space() != spec.space) {
        fail(ErrorCode::DimensionMismatch,
             fmt::format("kernel over {} applied to a {} point", to_string(spec.space),
                         to_string(p.space())));
    }
}

} // namespace

double eval_kernel(const KernelSpec& spec, const HilbertPoint& a, const HilbertPoint& b) {
    require_space(spec, a);
    require_space(spec, b);
    return spec.from_squared_distance(squared_distance(a, b));
}

Eigen::MatrixXd gram(const KernelSpec& spec, std::span<const HilbertPoint> points) {
    require(!points.empty(), ErrorCode::InvalidArgument, "gram of an empty point set");
    spec.validate();
    require_space(spec, points[0]);
    require_homogeneous(points);
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        k(j, j) = 1.0;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double v = spec.from_squared_distance(squared_distance(points[i], points[j]));
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

Eigen::VectorXd cross_gram(const KernelSpec& spec, std::span<const HilbertPoint> points,
                           const HilbertPoint& x) {
    require_space(spec, x);
    Eigen::VectorXd k(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        k(static_cast<Eigen::Index>(i)) = spec.from_squared_distance(squared_distance(points[i], x));
    }
    return k;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec, std::span<const HilbertPoint> points,
                           std::span<const HilbertPoint> queries) {
    Eigen::MatrixXd k(static_cast<Eigen::Index>(points.size()),
                      static_cast<Eigen::Index>(queries.size()));
    for (std::size_t j = 0; j < queries.size(); ++j) {
        k.col(static_cast<Eigen::Index>(j)) = cross_gram(spec, points, queries[j]);
    }
    return k;
}

double median_squared_distance(std::span<const HilbertPoint> points) {
    require(points.size() >= 2, ErrorCode::InvalidArgument,
            "median heuristic needs at least two points");
    require_homogeneous(points);
    std::vector<double> d2;
    d2.reserve(points.size() * (points.size() - 1) / 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            d2.push_back(squared_distance(points[i], points[j]));
        }
    }
    const std::size_t mid = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
    const double upper = d2[mid];
    if (d2.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double median_heuristic(std::span<const HilbertPoint> points) {
    const double median = median_squared_distance(points);
    require(median > 0.0, ErrorCode::Numerical,
            "median heuristic: median pairwise distance is zero (degenerate sample)");
    return 1.0 / median;
}

} // namespace hc
