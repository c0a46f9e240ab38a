#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "hc/bootstrap.hpp"
#include "hc/error.hpp"
#include "hc/simgen.hpp"

using hc::BootstrapDirection;
using hc::HilbertPoint;

TEST_SUITE("bootstrap") {

TEST_CASE("adjusted rank and threshold") {
    const std::vector<double> t{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK(hc::adjusted_rank(5, 0.8, BootstrapDirection::PaperUpper) == 4);
    CHECK(hc::adjusted_threshold(t, 0.8, BootstrapDirection::PaperUpper) == 0.4);
    CHECK(hc::adjusted_rank(5, 0.8, BootstrapDirection::ConservativeLower) == 1);
    CHECK(hc::adjusted_threshold(t, 0.8, BootstrapDirection::ConservativeLower) == 0.1);
    CHECK(hc::adjusted_rank(200, 0.9, BootstrapDirection::PaperUpper) == 180);
    CHECK(hc::adjusted_rank(200, 0.9, BootstrapDirection::ConservativeLower) == 20);

    const std::vector<double> one{0.37};
    for (const double g : {0.01, 0.5, 0.99}) {
        CHECK(hc::adjusted_threshold(one, g, BootstrapDirection::PaperUpper) == 0.37);
        CHECK(hc::adjusted_threshold(one, g, BootstrapDirection::ConservativeLower) == 0.37);
    }
    CHECK_THROWS_AS(hc::adjusted_rank(0, 0.5, BootstrapDirection::PaperUpper), hc::Error);
    CHECK_THROWS_AS(hc::adjusted_rank(10, 1.0, BootstrapDirection::PaperUpper), hc::Error);
}

TEST_CASE("adjusted threshold is nondecreasing in gamma") {
    std::vector<double> t;
    for (int i = 0; i < 37; ++i) t.push_back(std::sin(static_cast<double>(i)));
    std::sort(t.begin(), t.end());
    double prev = -1e9;
    for (double g = 0.01; g < 1.0; g += 0.01) {
        const double q = hc::adjusted_threshold(t, g, BootstrapDirection::PaperUpper);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("equal bootstrap thresholds reproduce the plain conformal region") {
    const auto data = hc::gen_setting1(200, 1);
    auto model = std::make_shared<const hc::RegionModel>(hc::fit_heteroscedastic(data, {}, 2));
    const double content = 0.8;
    const double plain = model->threshold(1.0 - content);
    const auto x = HilbertPoint::scalar(2.5);
    const hc::BootstrapToleranceRegion region(model, x, std::vector<double>(50, plain), content, 0.9,
                                              BootstrapDirection::PaperUpper);
    const auto pred = model->predict(x, 1.0 - content);
    CHECK(region.threshold() == plain);
    for (double y = 0.0; y < 30.0; y += 0.1) {
        const auto yp = HilbertPoint::scalar(y);
        CHECK(region.contains(yp) == pred.contains(yp));
    }
}

TEST_CASE("bootstrap thresholds are reproducible and independent of worker count") {
    const auto data = hc::gen_setting2(120, 3);
    const auto base = hc::fit_heteroscedastic(data, {}, 4);
    hc::BootstrapOptions options;
    options.replicates = 12;
    const auto a = hc::bootstrap_thresholds(data, base, 0.8, options, 5);
    const auto b = hc::bootstrap_thresholds(data, base, 0.8, options, 5);
    options.workers = 3;
    const auto c = hc::bootstrap_thresholds(data, base, 0.8, options, 5);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a != hc::bootstrap_thresholds(data, base, 0.8, options, 6));

    options.refit = hc::RefitMode::CalibrationOnly;
    const auto d = hc::bootstrap_thresholds(data, base, 0.8, options, 5);
    CHECK(d == hc::bootstrap_thresholds(data, base, 0.8, options, 5));
}

TEST_CASE("a failing refit reports its replicate index") {
    const auto good = hc::gen_setting2(60, 7);
    const auto base = hc::fit_homoscedastic(good, {}, 8);
    hc::Dataset flat = good;
    for (auto& y : flat.y) y = HilbertPoint::scalar(1.0);
    hc::BootstrapOptions options;
    options.algorithm = hc::Algorithm::Homoscedastic;
    options.replicates = 3;
    try {
        (void)hc::bootstrap_thresholds(flat, base, 0.8, options, 9);
        FAIL("expected a refit failure");
    } catch (const hc::Error& e) {
        CHECK(std::string(e.what()).find("bootstrap replicate 0") != std::string::npos);
    }
}

TEST_CASE("direction flag and region accessors") {
    const auto data = hc::gen_setting2(150, 10);
    hc::BootstrapOptions options;
    options.replicates = 20;
    const auto upper = hc::bootstrap_tolerance(data, 0.8, 0.9, HilbertPoint::scalar(2.5), options, 11);
    const auto lower = upper.with_direction(BootstrapDirection::ConservativeLower);
    CHECK(upper.thresholds().size() == 20);
    CHECK(std::is_sorted(upper.thresholds().begin(), upper.thresholds().end()));
    CHECK(upper.threshold() == upper.thresholds()[17]);
    CHECK(lower.threshold() == lower.thresholds()[1]);
    CHECK(lower.threshold() <= upper.threshold());
    for (double y = 0.0; y < 12.0; y += 0.1) {
        const auto yp = HilbertPoint::scalar(y);
        if (upper.contains(yp)) CHECK(lower.contains(yp));
    }
    CHECK(hc::parse_direction("paper-upper") == BootstrapDirection::PaperUpper);
    CHECK(hc::parse_direction("conservative-lower") == BootstrapDirection::ConservativeLower);
    CHECK_THROWS_AS(hc::parse_direction("upper"), hc::Error);
    CHECK(hc::parse_refit_mode("calibration-only") == hc::RefitMode::CalibrationOnly);
}

TEST_CASE("achieved confidence at gamma 0.5 is near one half") {
    hc::ConfidenceStudy cs;
    cs.dgp = hc::Dgp::Setting2;
    cs.n = 1000;
    cs.content = 0.8;
    cs.gamma = 0.5;
    cs.bootstrap.replicates = 100;
    cs.bootstrap.refit = hc::RefitMode::CalibrationOnly;
    // 400 replicates keep the binomial standard error near 0.025.
    cs.replicates = 400;
    cs.fresh = 5000;
    cs.seed = 12;
    const auto report = hc::achieved_confidence(cs);
    MESSAGE("paper-upper ", report.paper_upper, ", conservative-lower ", report.conservative_lower);
    CHECK(std::abs(report.paper_upper - 0.5) <= 0.07);
}

TEST_CASE("lower direction never has less confidence") {
    hc::ConfidenceStudy cs;
    cs.n = 200;
    cs.content = 0.8;
    cs.gamma = 0.9;
    cs.bootstrap.replicates = 30;
    cs.replicates = 20;
    cs.fresh = 2000;
    cs.seed = 13;
    const auto report = hc::achieved_confidence(cs);
    CHECK(report.conservative_lower >= report.paper_upper);
    for (std::size_t r = 0; r < cs.replicates; ++r) {
        CHECK(report.content_lower[r] >= report.content_upper[r]);
    }
}

TEST_CASE("a vanishing content target is always met") {
    // Below 1 / (n_cal + 1) every refit keeps only its top-scoring region.
    hc::ConfidenceStudy cs;
    cs.n = 200;
    cs.content = 1e-3;
    cs.gamma = 0.9;
    cs.bootstrap.replicates = 30;
    cs.replicates = 20;
    cs.fresh = 2000;
    cs.seed = 13;
    const auto report = hc::achieved_confidence(cs);
    MESSAGE("paper-upper ", report.paper_upper, ", conservative-lower ", report.conservative_lower);
    CHECK(report.paper_upper == 1.0);
}

}
