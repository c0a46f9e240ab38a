#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hc/depth.hpp"

namespace hc {

/// ceil((n + 1) * content), the number of deepest sample points kept by an
/// content-expectation tolerance region. Throws when content is outside
/// (0, 1) or the rank exceeds n.
std::size_t tolerance_rank(std::size_t n, double content);

/// Unconditional tolerance region {y : D(y) >= tau} where tau is the r-th
/// largest in-sample depth and r = ceil((n + 1) * content). Its expected
/// probability content is r / (n + 1).
class ToleranceRegion {
public:
    static ToleranceRegion fit(std::vector<HilbertPoint> sample, const KernelSpec& kernel,
                               double content);

    bool contains(const HilbertPoint& y) const;
    double depth(const HilbertPoint& y) const { return kme_.depth(y); }
    /// Fraction of `fresh` inside the region.
    double content_estimate(std::span<const HilbertPoint> fresh) const;

    double threshold() const noexcept { return threshold_; }
    std::size_t rank() const noexcept { return rank_; }
    double content() const noexcept { return content_; }
    /// In-sample depths in the order of the training sample.
    const std::vector<double>& sample_depths() const noexcept { return sample_depths_; }
    const EmpiricalKME& kme() const noexcept { return kme_; }

private:
    ToleranceRegion(EmpiricalKME kme, std::vector<double> depths, double threshold,
                    std::size_t rank, double content)
        : kme_(std::move(kme)),
          sample_depths_(std::move(depths)),
          threshold_(threshold),
          rank_(rank),
          content_(content) {}

    EmpiricalKME kme_;
    std::vector<double> sample_depths_;
    double threshold_;
    std::size_t rank_;
    double content_;
};

} // namespace hc
