#include "hc/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "hc/error.hpp"

namespace hc {

std::size_t tolerance_rank(std::size_t n, double content) {
    require(content > 0.0 && content < 1.0, ErrorCode::InvalidArgument,
            fmt::format("tolerance content must lie in (0, 1), got {}", content));
    // The 1e-9 slack keeps products like 10 * 0.8 from rounding up to 9.
    const double raw = static_cast<double>(n + 1) * content;
    const auto rank = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    require(rank >= 1 && rank <= n, ErrorCode::InvalidArgument,
            fmt::format("sample too small for content {}: rank {} exceeds n = {}", content, rank, n));
    return rank;
}

ToleranceRegion ToleranceRegion::fit(std::vector<HilbertPoint> sample, const KernelSpec& kernel,
                                     double content) {
    const std::size_t rank = tolerance_rank(sample.size(), content);
    EmpiricalKME kme(std::move(sample), kernel);
    // Self-terms k(Y_j, Y_j) = 1 are included, matching (1/n) sum over all i.
    std::vector<double> depths = kme.depths(kme.sample());
    std::vector<double> sorted = depths;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     sorted.end(), std::greater<>());
    const double threshold = sorted[rank - 1];
    return ToleranceRegion(std::move(kme), std::move(depths), threshold, rank, content);
}

bool ToleranceRegion::contains(const HilbertPoint& y) const {
    return kme_.depth(y) >= threshold_;
}

double ToleranceRegion::content_estimate(std::span<const HilbertPoint> fresh) const {
    require(!fresh.empty(), ErrorCode::InvalidArgument, "content estimate needs fresh points");
    std::size_t inside = 0;
    for (const auto& y : fresh) {
        inside += contains(y) ? 1 : 0;
    }
    return static_cast<double>(inside) / static_cast<double>(fresh.size());
}

} // namespace hc
