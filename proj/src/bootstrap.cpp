#include "hc/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hc/error.hpp"
#include "hc/parallel.hpp"
#include "hc/random.hpp"

namespace hc {

std::string_view to_string(BootstrapDirection direction) noexcept {
    switch (direction) {
    case BootstrapDirection::PaperUpper: return "paper-upper";
    case BootstrapDirection::ConservativeLower: return "conservative-lower";
    }
    return "unknown";
}

BootstrapDirection parse_direction(std::string_view text) {
    if (text == "paper-upper") return BootstrapDirection::PaperUpper;
    if (text == "conservative-lower") return BootstrapDirection::ConservativeLower;
    fail(ErrorCode::InvalidArgument, fmt::format("unknown bootstrap direction '{}'", text));
}

std::string_view to_string(RefitMode mode) noexcept {
    switch (mode) {
    case RefitMode::Full: return "full";
    case RefitMode::CalibrationOnly: return "calibration-only";
    }
    return "unknown";
}

RefitMode parse_refit_mode(std::string_view text) {
    if (text == "full") return RefitMode::Full;
    if (text == "calibration-only") return RefitMode::CalibrationOnly;
    fail(ErrorCode::InvalidArgument, fmt::format("unknown refit mode '{}'", text));
}

std::size_t adjusted_rank(std::size_t replicates, double gamma, BootstrapDirection direction) {
    require(replicates >= 1, ErrorCode::InvalidArgument, "bootstrap needs B >= 1");
    require(gamma > 0.0 && gamma < 1.0, ErrorCode::InvalidArgument,
            fmt::format("confidence gamma must lie in (0, 1), got {}", gamma));
    const double level = direction == BootstrapDirection::PaperUpper ? gamma : 1.0 - gamma;
    const auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(replicates) - 1e-9));
    return std::clamp<std::size_t>(rank, 1, replicates);
}

double adjusted_threshold(std::span<const double> sorted_thresholds, double gamma,
                          BootstrapDirection direction) {
    return sorted_thresholds[adjusted_rank(sorted_thresholds.size(), gamma, direction) - 1];
}

BootstrapToleranceRegion::BootstrapToleranceRegion(std::shared_ptr<const RegionModel> model,
                                                   HilbertPoint x, std::vector<double> thresholds,
                                                   double content, double gamma,
                                                   BootstrapDirection direction)
    : model_(std::move(model)),
      x_(std::move(x)),
      thresholds_(std::move(thresholds)),
      content_(content),
      gamma_(gamma),
      direction_(direction),
      predicate_([&] {
          require(model_ != nullptr, ErrorCode::InvalidArgument, "bootstrap region needs a model");
          require(!thresholds_.empty(), ErrorCode::InvalidArgument, "bootstrap region needs B >= 1");
          std::sort(thresholds_.begin(), thresholds_.end());
          return model_->predict_with_threshold(x_, adjusted_threshold(thresholds_, gamma_, direction_));
      }()) {}

BootstrapToleranceRegion BootstrapToleranceRegion::with_direction(BootstrapDirection direction) const {
    BootstrapToleranceRegion copy = *this;
    copy.direction_ = direction;
    copy.predicate_ = predicate_.with_threshold(adjusted_threshold(thresholds_, gamma_, direction));
    return copy;
}

namespace {

std::vector<std::size_t> resample_indices(std::size_t n, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) {
        i = pick(rng);
    }
    return idx;
}

double calibration_only_threshold(const RegionModel& base, double miscoverage, Rng& rng) {
    const auto& cal = base.calibration();
    const auto held_out = resample_indices(cal.depths.size(), rng);
    std::vector<double> scores;
    scores.reserve(held_out.size());
    if (base.algorithm() == Algorithm::Homoscedastic) {
        for (const std::size_t i : held_out) {
            scores.push_back(cal.depths[i]);
        }
    } else {
        const auto& cdf = *base.cdf();
        const auto bank_idx = resample_indices(cdf.r_bank().size(), rng);
        std::vector<HilbertPoint> bank_x;
        std::vector<double> bank_r;
        for (const std::size_t i : bank_idx) {
            bank_x.push_back(cdf.x_bank()[i]);
            bank_r.push_back(cdf.r_bank()[i]);
        }
        const ConditionalCdf resampled(std::move(bank_x), std::move(bank_r), cdf.bandwidth());
        for (const std::size_t i : held_out) {
            scores.push_back(resampled(cal.x[i], cal.depths[i]));
        }
    }
    std::sort(scores.begin(), scores.end());
    return conformal_threshold(scores, miscoverage);
}

} // namespace

std::vector<double> bootstrap_thresholds(const Dataset& data, const RegionModel& base,
                                         double content, const BootstrapOptions& options,
                                         std::uint64_t seed) {
    require(content > 0.0 && content < 1.0, ErrorCode::InvalidArgument,
            fmt::format("tolerance content must lie in (0, 1), got {}", content));
    require(options.replicates >= 1, ErrorCode::InvalidArgument, "bootstrap needs B >= 1");
    if (options.replicates < 50) {
        spdlog::warn("bootstrap with B = {} replicates; at least 50 are recommended", options.replicates);
    }
    const double miscoverage = 1.0 - content;
    std::vector<double> thresholds(options.replicates);
    parallel_for(options.replicates, options.workers, [&](std::size_t b) {
        Rng rng(derive_seed(seed, streams::bootstrap, b));
        try {
            if (options.refit == RefitMode::CalibrationOnly) {
                thresholds[b] = calibration_only_threshold(base, miscoverage, rng);
                return;
            }
            const Dataset resample = data.subset(resample_indices(data.size(), rng));
            const RegionModel refit = fit_region_model(options.algorithm, resample, options.model,
                                                       derive_seed(seed, streams::split, b + 1));
            thresholds[b] = refit.threshold(miscoverage);
        } catch (const Error& e) {
            throw Error(e.code(), fmt::format("bootstrap replicate {} failed: {}", b, e.what()));
        }
    });
    return thresholds;
}

BootstrapToleranceRegion bootstrap_tolerance(const Dataset& data, double content, double gamma,
                                             const HilbertPoint& x, const BootstrapOptions& options,
                                             std::uint64_t seed) {
    require(gamma > 0.0 && gamma < 1.0, ErrorCode::InvalidArgument,
            fmt::format("confidence gamma must lie in (0, 1), got {}", gamma));
    auto base = std::make_shared<const RegionModel>(
        fit_region_model(options.algorithm, data, options.model, derive_seed(seed, streams::split, 0)));
    auto thresholds = bootstrap_thresholds(data, *base, content, options, seed);
    return BootstrapToleranceRegion(std::move(base), x, std::move(thresholds), content, gamma,
                                    options.direction);
}

ConfidenceReport achieved_confidence(const ConfidenceStudy& study) {
    require(study.replicates >= 1, ErrorCode::InvalidArgument, "confidence study needs replicates >= 1");
    require(study.fresh >= 1, ErrorCode::InvalidArgument, "confidence study needs fresh draws >= 1");
    ConfidenceReport report;
    report.content_upper.assign(study.replicates, 0.0);
    report.content_lower.assign(study.replicates, 0.0);
    report.threshold_upper.assign(study.replicates, 0.0);
    report.threshold_lower.assign(study.replicates, 0.0);

    BootstrapOptions inner = study.bootstrap;
    inner.workers = 1;
    parallel_for(study.replicates, study.workers, [&](std::size_t r) {
        const std::uint64_t rep_seed = derive_seed(study.seed, streams::replicate, r);
        const Dataset data = generate(study.dgp, study.n, derive_seed(rep_seed, streams::data, 0), study.grid);
        const auto upper = bootstrap_tolerance(data, study.content, study.gamma, study.x,
                                               [&] {
                                                   BootstrapOptions o = inner;
                                                   o.direction = BootstrapDirection::PaperUpper;
                                                   return o;
                                               }(),
                                               derive_seed(rep_seed, streams::bootstrap, 0));
        const auto lower = upper.with_direction(BootstrapDirection::ConservativeLower);
        const auto fresh = sample_conditional(study.dgp, study.x, study.fresh,
                                              derive_seed(rep_seed, streams::conditional, 0), study.grid);
        std::size_t in_upper = 0;
        std::size_t in_lower = 0;
        for (const auto& y : fresh) {
            const double s = upper.score(y);
            in_upper += s >= upper.threshold() ? 1 : 0;
            in_lower += s >= lower.threshold() ? 1 : 0;
        }
        const double total = static_cast<double>(fresh.size());
        report.content_upper[r] = static_cast<double>(in_upper) / total;
        report.content_lower[r] = static_cast<double>(in_lower) / total;
        report.threshold_upper[r] = upper.threshold();
        report.threshold_lower[r] = lower.threshold();
    });

    std::size_t ok_upper = 0;
    std::size_t ok_lower = 0;
    for (std::size_t r = 0; r < study.replicates; ++r) {
        ok_upper += report.content_upper[r] >= study.content ? 1 : 0;
        ok_lower += report.content_lower[r] >= study.content ? 1 : 0;
    }
    report.paper_upper = static_cast<double>(ok_upper) / static_cast<double>(study.replicates);
    report.conservative_lower = static_cast<double>(ok_lower) / static_cast<double>(study.replicates);
    return report;
}

} // namespace hc
