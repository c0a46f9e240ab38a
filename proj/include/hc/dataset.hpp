#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hc/hilbert.hpp"

namespace hc {

/// Paired sample {(X_i, Y_i)}.
struct Dataset {
    std::vector<HilbertPoint> x;
    std::vector<HilbertPoint> y;
    std::string dgp;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return x.size(); }

    /// Throws unless |X| = |Y| >= 1 and each side is mutually comparable.
    void validate() const;

    Dataset subset(std::span<const std::size_t> indices) const;
};

} // namespace hc
