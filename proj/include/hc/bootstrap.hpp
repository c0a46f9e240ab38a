#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "hc/conformal.hpp"
#include "hc/simgen.hpp"

namespace hc {

/// Which order statistic of the bootstrap thresholds becomes the adjusted
/// threshold.
enum class BootstrapDirection {
    PaperUpper,        ///< ceil(gamma * B)-th smallest: F_B(q) >= gamma
    ConservativeLower, ///< ceil((1 - gamma) * B)-th smallest: a larger region
};

/// What each bootstrap replicate refits.
enum class RefitMode {
    Full,            ///< resample all pairs and refit the whole region model
    CalibrationOnly, ///< keep the fitted CME, resample the held-out splits
};

std::string_view to_string(BootstrapDirection direction) noexcept;
BootstrapDirection parse_direction(std::string_view text);
std::string_view to_string(RefitMode mode) noexcept;
RefitMode parse_refit_mode(std::string_view text);

struct BootstrapOptions {
    Algorithm algorithm = Algorithm::Heteroscedastic;
    ModelOptions model;
    std::size_t replicates = 200;
    BootstrapDirection direction = BootstrapDirection::PaperUpper;
    RefitMode refit = RefitMode::Full;
    std::size_t workers = 1;
};

/// 1-based rank of the adjusted threshold among B sorted thresholds.
std::size_t adjusted_rank(std::size_t replicates, double gamma, BootstrapDirection direction);

/// The adjusted threshold from ascending bootstrap thresholds.
double adjusted_threshold(std::span<const double> sorted_thresholds, double gamma,
                          BootstrapDirection direction);

/// Conditional tolerance region {y : g(x, y) >= q_gamma} at a fixed x. The
/// score g comes from the model fitted on the full data; q_gamma is an
/// order statistic of per-replicate conformal thresholds.
class BootstrapToleranceRegion {
public:
    BootstrapToleranceRegion(std::shared_ptr<const RegionModel> model, HilbertPoint x,
                             std::vector<double> thresholds, double content, double gamma,
                             BootstrapDirection direction);

    double score(const HilbertPoint& y) const { return predicate_.score(y); }
    bool contains(const HilbertPoint& y) const { return predicate_.contains(y); }
    double threshold() const noexcept { return predicate_.threshold(); }
    /// Same bootstrap distribution, other direction rule.
    BootstrapToleranceRegion with_direction(BootstrapDirection direction) const;

    const RegionModel& model() const noexcept { return *model_; }
    const HilbertPoint& x() const noexcept { return x_; }
    /// Per-replicate thresholds, ascending.
    const std::vector<double>& thresholds() const noexcept { return thresholds_; }
    double content() const noexcept { return content_; }
    double gamma() const noexcept { return gamma_; }
    BootstrapDirection direction() const noexcept { return direction_; }
    const RegionPredicate& predicate() const noexcept { return predicate_; }

private:
    std::shared_ptr<const RegionModel> model_;
    HilbertPoint x_;
    std::vector<double> thresholds_;
    double content_;
    double gamma_;
    BootstrapDirection direction_;
    RegionPredicate predicate_;
};

/// Per-replicate thresholds (unsorted, replicate order) of region models
/// refit on bootstrap resamples at miscoverage 1 - content.
std::vector<double> bootstrap_thresholds(const Dataset& data, const RegionModel& base,
                                         double content, const BootstrapOptions& options,
                                         std::uint64_t seed);

/// Content-`content` tolerance region at confidence `gamma` for predictor x.
BootstrapToleranceRegion bootstrap_tolerance(const Dataset& data, double content, double gamma,
                                             const HilbertPoint& x, const BootstrapOptions& options,
                                             std::uint64_t seed);

struct ConfidenceStudy {
    Dgp dgp = Dgp::Setting2;
    std::size_t n = 500;
    std::size_t grid = 0;
    HilbertPoint x = HilbertPoint::scalar(2.5);
    double content = 0.8;
    double gamma = 0.9;
    BootstrapOptions bootstrap;
    std::size_t replicates = 200;
    std::size_t fresh = 10000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
};

struct ConfidenceReport {
    /// Fraction of replicates whose conditional content is >= the target.
    double paper_upper = 0.0;
    double conservative_lower = 0.0;
    std::vector<double> content_upper;
    std::vector<double> content_lower;
    std::vector<double> threshold_upper;
    std::vector<double> threshold_lower;

    double achieved(BootstrapDirection direction) const noexcept {
        return direction == BootstrapDirection::PaperUpper ? paper_upper : conservative_lower;
    }
};

/// Monte Carlo check of the tolerance guarantee: per replicate, draw data,
/// build the bootstrap region, and estimate its conditional content at x
/// from a fresh conditional sample. Both direction rules share replicates.
ConfidenceReport achieved_confidence(const ConfidenceStudy& study);

} // namespace hc
