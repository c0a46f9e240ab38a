#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hc/hilbert.hpp"
#include "hc/kernels.hpp"

namespace hc {

/// Empirical kernel mean embedding of a reference sample, used as a depth:
/// D(y) = (1/n) sum_i k(y, Y_i).
class EmpiricalKME {
public:
    EmpiricalKME(std::vector<HilbertPoint> sample, KernelSpec kernel);

    double depth(const HilbertPoint& y) const;
    std::vector<double> depths(std::span<const HilbertPoint> ys) const;

    const std::vector<HilbertPoint>& sample() const noexcept { return sample_; }
    const KernelSpec& kernel() const noexcept { return kernel_; }

private:
    std::vector<HilbertPoint> sample_;
    KernelSpec kernel_;
};

inline constexpr double default_ridge = 1e-3;

/// Conditional mean embedding by kernel ridge regression. The embedding at
/// x is sum_i w_i(x) k_Y(., Y_i) with w(x) = (K_X + n*lambda*I)^{-1} k_x.
/// Immutable after construction; concurrent queries are safe.
class ConditionalKME {
public:
    ConditionalKME(std::vector<HilbertPoint> x_train, std::vector<HilbertPoint> y_train,
                   KernelSpec kx, KernelSpec ky, double lambda = default_ridge);

    std::size_t size() const noexcept { return x_train_.size(); }

    /// Solves the cached system for one query predictor.
    Eigen::VectorXd weights(const HilbertPoint& x) const;
    /// n x q matrix whose column j holds the weights of xs[j].
    Eigen::MatrixXd weights(std::span<const HilbertPoint> xs) const;

    /// sum_i w_i(x) k_Y(Y_i, y). Signed; not clamped.
    double depth(const HilbertPoint& x, const HilbertPoint& y) const;
    /// Depth of a response given precomputed weights at some x.
    double depth_with_weights(const Eigen::VectorXd& w, const HilbertPoint& y) const;
    /// Depths of the pairs (xs[j], ys[j]).
    std::vector<double> depth_pairs(std::span<const HilbertPoint> xs,
                                    std::span<const HilbertPoint> ys) const;

    /// The cached lower-triangular factor L with L L^T = K_X + n*lambda*I.
    Eigen::MatrixXd factor() const { return llt_.matrixL(); }
    Eigen::MatrixXd system_matrix() const;

    const std::vector<HilbertPoint>& x_train() const noexcept { return x_train_; }
    const std::vector<HilbertPoint>& y_train() const noexcept { return y_train_; }
    const KernelSpec& kx() const noexcept { return kx_; }
    const KernelSpec& ky() const noexcept { return ky_; }
    double lambda() const noexcept { return lambda_; }

private:
    std::vector<HilbertPoint> x_train_;
    std::vector<HilbertPoint> y_train_;
    KernelSpec kx_;
    KernelSpec ky_;
    double lambda_;
    Eigen::MatrixXd kx_gram_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

} // namespace hc
