#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "hc/error.hpp"
#include "hc/tolerance.hpp"

using hc::HilbertPoint;

namespace {

hc::KernelSpec gaussian(double sigma, hc::Space space = hc::Space::Euclidean) {
    return hc::KernelSpec{hc::KernelFamily::Gaussian, sigma, space};
}

std::vector<HilbertPoint> uniform_square(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<HilbertPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = u(rng);
        const double b = u(rng);
        pts.push_back(HilbertPoint::euclidean({a, b}));
    }
    return pts;
}

} // namespace

TEST_SUITE("tolerance") {

TEST_CASE("rank follows ceil((n + 1) * content)") {
    CHECK(hc::tolerance_rank(9, 0.8) == 8);
    CHECK(hc::tolerance_rank(199, 0.5) == 100);
    CHECK(hc::tolerance_rank(200, 0.8) == 161);
    CHECK_THROWS_AS(hc::tolerance_rank(9, 0.95), hc::Error);
    CHECK_THROWS_AS(hc::tolerance_rank(9, 0.0), hc::Error);
    CHECK_THROWS_AS(hc::tolerance_rank(9, 1.0), hc::Error);
}

TEST_CASE("three equidistant points on a line") {
    // Depths: centre (1 + 2e^{-s}) / 3, ends (1 + e^{-s} + e^{-4s}) / 3.
    const std::vector<HilbertPoint> line{HilbertPoint::scalar(-1.0), HilbertPoint::scalar(0.0),
                                         HilbertPoint::scalar(1.0)};
    const double s = 0.7;
    const auto region = hc::ToleranceRegion::fit(line, gaussian(s), 0.5);
    CHECK(region.rank() == 2);
    const auto& d = region.sample_depths();
    CHECK(d[1] == doctest::Approx((1.0 + 2.0 * std::exp(-s)) / 3.0).epsilon(1e-15));
    CHECK(d[0] == doctest::Approx((1.0 + std::exp(-s) + std::exp(-4.0 * s)) / 3.0).epsilon(1e-15));
    CHECK(d[1] > d[0]);
    CHECK(region.threshold() == doctest::Approx(d[0]).epsilon(1e-15));
    CHECK(region.contains(line[1]));
    // The ends tie; with the closed rule the one at the threshold is kept.
    CHECK((region.contains(line[0]) || region.contains(line[2])));
    CHECK_FALSE(region.contains(HilbertPoint::scalar(1.5)));
}

TEST_CASE("membership at the deepest and the r-th deepest sample point") {
    std::mt19937_64 rng(1);
    const auto sample = uniform_square(60, rng);
    const auto region = hc::ToleranceRegion::fit(sample, gaussian(4.0), 0.7);
    const auto& d = region.sample_depths();
    std::vector<std::size_t> order(d.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] > d[b]; });
    CHECK(region.contains(sample[order.front()]));
    CHECK(region.contains(sample[order[region.rank() - 1]]));
    CHECK(region.threshold() == d[order[region.rank() - 1]]);
    for (std::size_t k = 0; k < order.size(); ++k) {
        CHECK(region.contains(sample[order[k]]) == (k < region.rank()));
    }
}

TEST_CASE("far queries fall outside") {
    std::mt19937_64 rng(2);
    const auto sample = uniform_square(40, rng);
    const auto k = gaussian(1.0);
    const auto region = hc::ToleranceRegion::fit(sample, k, 0.5);
    const auto far = HilbertPoint::euclidean({10.0, 10.0});
    REQUIRE(region.threshold() > 40.0 * std::exp(-60.0));
    CHECK_FALSE(region.contains(far));
}

TEST_CASE("content on the training sample is r / n") {
    std::mt19937_64 rng(3);
    const auto sample = uniform_square(99, rng);
    const auto region = hc::ToleranceRegion::fit(sample, gaussian(3.0), 0.8);
    CHECK(region.content_estimate(sample) == doctest::Approx(static_cast<double>(region.rank()) / 99.0));
    CHECK(region.content_estimate(sample) >= 1.0 / 99.0);
    CHECK_THROWS_AS(region.content_estimate(std::vector<HilbertPoint>{}), hc::Error);
}

TEST_CASE("mean content is near r / (n + 1) on continuous data") {
    // Smaller version of the acceptance check: 100 replicates, n = 100.
    constexpr std::size_t n = 100;
    double sum = 0.0;
    std::vector<double> contents;
    std::size_t rank = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        std::mt19937_64 rng(1000 + r);
        auto sample = uniform_square(n, rng);
        const auto fresh = uniform_square(4000, rng);
        const auto region = hc::ToleranceRegion::fit(sample, gaussian(hc::median_heuristic(sample)), 0.8);
        rank = region.rank();
        contents.push_back(region.content_estimate(fresh));
        sum += contents.back();
    }
    const double mean = sum / 100.0;
    const double target = static_cast<double>(rank) / static_cast<double>(n + 1);
    CHECK(std::abs(mean - target) <= 0.03);
}

TEST_CASE("quantile-function responses") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    std::vector<HilbertPoint> sample;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> draws(30);
        const double shift = z(rng);
        for (auto& v : draws) v = shift + z(rng);
        sample.push_back(hc::empirical_quantile_function(draws, 20));
    }
    const auto region = hc::ToleranceRegion::fit(sample, gaussian(hc::median_heuristic(sample), hc::Space::Quantile), 0.6);
    CHECK(region.rank() == 31);
    CHECK(region.content_estimate(sample) == doctest::Approx(31.0 / 50.0));
}

}
