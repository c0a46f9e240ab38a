#pragma once

#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "hc/hilbert.hpp"

namespace hc {

enum class KernelFamily { Gaussian };

std::string_view to_string(KernelFamily family) noexcept;
KernelFamily parse_kernel_family(std::string_view text);

/// Radial kernel k(a, b) = exp(-sigma * d(a, b)^2) over one space.
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double sigma = 1.0;
    Space space = Space::Euclidean;

    /// Throws unless sigma is positive and finite.
    void validate() const;

    double from_squared_distance(double d2) const noexcept;
};

double eval_kernel(const KernelSpec& spec, const HilbertPoint& a, const HilbertPoint& b);

/// Symmetric n x n Gram matrix with unit diagonal.
Eigen::MatrixXd gram(const KernelSpec& spec, std::span<const HilbertPoint> points);

/// Component i is k(points[i], x).
Eigen::VectorXd cross_gram(const KernelSpec& spec, std::span<const HilbertPoint> points,
                           const HilbertPoint& x);

/// Column j is cross_gram(spec, points, queries[j]).
Eigen::MatrixXd cross_gram(const KernelSpec& spec, std::span<const HilbertPoint> points,
                           std::span<const HilbertPoint> queries);

/// sigma = 1 / median of squared distances over all pairs i < j (zero
/// distances included). Throws when that median is zero.
double median_heuristic(std::span<const HilbertPoint> points);

/// Median of the pairwise squared distances over all pairs i < j.
double median_squared_distance(std::span<const HilbertPoint> points);

} // namespace hc
