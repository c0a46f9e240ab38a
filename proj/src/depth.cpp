#include "hc/depth.hpp"

#include <cmath>

#include <fmt/format.h>

#include "hc/error.hpp"

namespace hc {

EmpiricalKME::EmpiricalKME(std::vector<HilbertPoint> sample, KernelSpec kernel)
    : sample_(std::move(sample)), kernel_(kernel) {
    require(!sample_.empty(), ErrorCode::InvalidArgument, "empirical KME needs a nonempty sample");
    kernel_.validate();
    require_homogeneous(sample_);
}

double EmpiricalKME::depth(const HilbertPoint& y) const {
    double sum = 0.0;
    for (const auto& yi : sample_) {
        sum += eval_kernel(kernel_, yi, y);
    }
    return sum / static_cast<double>(sample_.size());
}

std::vector<double> EmpiricalKME::depths(std::span<const HilbertPoint> ys) const {
    std::vector<double> out;
    out.reserve(ys.size());
    for (const auto& y : ys) {
        out.push_back(depth(y));
    }
    return out;
}

ConditionalKME::ConditionalKME(std::vector<HilbertPoint> x_train, std::vector<HilbertPoint> y_train,
                               KernelSpec kx, KernelSpec ky, double lambda)
    : x_train_(std::move(x_train)),
      y_train_(std::move(y_train)),
      kx_(kx),
      ky_(ky),
      lambda_(lambda) {
    require(!x_train_.empty(), ErrorCode::InvalidArgument, "conditional KME needs n >= 1");
    require(x_train_.size() == y_train_.size(), ErrorCode::DimensionMismatch,
            fmt::format("conditional KME: {} predictors vs {} responses", x_train_.size(),
                        y_train_.size()));
    require(std::isfinite(lambda_) && lambda_ > 0.0, ErrorCode::InvalidArgument,
            fmt::format("ridge parameter must be positive, got {}", lambda_));
    ky_.validate();
    require(!y_train_.empty() && y_train_[0].space() == ky_.space, ErrorCode::DimensionMismatch,
            "response kernel space does not match the responses");
    require_homogeneous(y_train_);

    kx_gram_ = gram(kx_, x_train_);
    const double n = static_cast<double>(size());
    Eigen::MatrixXd system = kx_gram_;
    system.diagonal().array() += n * lambda_;
    llt_.compute(system);
    if (llt_.info() != Eigen::Success) {
        fail(ErrorCode::Numerical, "conditional KME: Cholesky factorization of K_X + n*lambda*I failed");
    }
}

Eigen::MatrixXd ConditionalKME::system_matrix() const {
    Eigen::MatrixXd system = kx_gram_;
    system.diagonal().array() += static_cast<double>(size()) * lambda_;
    return system;
}

Eigen::VectorXd ConditionalKME::weights(const HilbertPoint& x) const {
    require_comparable(x_train_[0], x);
    return llt_.solve(cross_gram(kx_, x_train_, x));
}

Eigen::MatrixXd ConditionalKME::weights(std::span<const HilbertPoint> xs) const {
    for (const auto& x : xs) {
        require_comparable(x_train_[0], x);
    }
    return llt_.solve(cross_gram(kx_, x_train_, xs));
}

double ConditionalKME::depth_with_weights(const Eigen::VectorXd& w, const HilbertPoint& y) const {
    require_comparable(y_train_[0], y);
    double sum = 0.0;
    for (std::size_t i = 0; i < y_train_.size(); ++i) {
        sum += w(static_cast<Eigen::Index>(i)) * ky_.from_squared_distance(squared_distance(y_train_[i], y));
    }
    return sum;
}

double ConditionalKME::depth(const HilbertPoint& x, const HilbertPoint& y) const {
    return depth_with_weights(weights(x), y);
}

std::vector<double> ConditionalKME::depth_pairs(std::span<const HilbertPoint> xs,
                                                std::span<const HilbertPoint> ys) const {
    require(xs.size() == ys.size(), ErrorCode::DimensionMismatch,
            fmt::format("depth_pairs: {} predictors vs {} responses", xs.size(), ys.size()));
    const Eigen::MatrixXd w = weights(xs);
    std::vector<double> out(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        out[j] = depth_with_weights(w.col(static_cast<Eigen::Index>(j)), ys[j]);
    }
    return out;
}

} // namespace hc
