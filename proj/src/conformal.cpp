#include "hc/conformal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hc/error.hpp"
#include "hc/random.hpp"

namespace hc {

std::string_view to_string(Algorithm algorithm) noexcept {
    switch (algorithm) {
    case Algorithm::Homoscedastic: return "homo";
    case Algorithm::Heteroscedastic: return "hetero";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "homo" || text == "homoscedastic") return Algorithm::Homoscedastic;
    if (text == "hetero" || text == "heteroscedastic") return Algorithm::Heteroscedastic;
    fail(ErrorCode::InvalidArgument, fmt::format("unknown region algorithm '{}'", text));
}

void Dataset::validate() const {
    require(!x.empty(), ErrorCode::InvalidArgument, "dataset is empty");
    require(x.size() == y.size(), ErrorCode::DimensionMismatch,
            fmt::format("dataset has {} predictors but {} responses", x.size(), y.size()));
    require_homogeneous(x);
    require_homogeneous(y);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.dgp = dgp;
    out.seed = seed;
    out.x.reserve(indices.size());
    out.y.reserve(indices.size());
    for (const std::size_t i : indices) {
        require(i < size(), ErrorCode::InvalidArgument, "dataset subset index out of range");
        out.x.push_back(x[i]);
        out.y.push_back(y[i]);
    }
    return out;
}

std::vector<std::vector<std::size_t>> random_split(std::size_t n, std::span<const double> fractions,
                                                   std::uint64_t seed) {
    require(!fractions.empty(), ErrorCode::InvalidArgument, "split needs at least one fraction");
    double total = 0.0;
    for (const double f : fractions) {
        require(f > 0.0, ErrorCode::InvalidArgument, "split fractions must be positive");
        total += f;
    }
    require(std::abs(total - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
            fmt::format("split fractions must sum to 1, got {}", total));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<std::size_t>> blocks;
    std::size_t start = 0;
    for (std::size_t b = 0; b < fractions.size(); ++b) {
        std::size_t count = 0;
        if (b + 1 == fractions.size()) {
            count = n - start;
        } else {
            count = static_cast<std::size_t>(std::floor(fractions[b] * static_cast<double>(n) + 0.5));
            count = std::min(count, n - start);
        }
        require(count >= 1, ErrorCode::InvalidArgument,
                fmt::format("split block {} is empty (n = {})", b + 1, n));
        blocks.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                            order.begin() + static_cast<std::ptrdiff_t>(start + count));
        start += count;
    }
    return blocks;
}

double conformal_threshold(std::span<const double> sorted_scores, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument,
            fmt::format("alpha must lie in (0, 1), got {}", alpha));
    require(!sorted_scores.empty(), ErrorCode::InvalidArgument, "no calibration scores");
    const double raw = alpha * static_cast<double>(sorted_scores.size() + 1);
    const auto k = static_cast<std::size_t>(std::floor(raw + 1e-9));
    if (k < 1) {
        return -std::numeric_limits<double>::infinity();
    }
    return sorted_scores[std::min(k, sorted_scores.size()) - 1];
}

LocalCdf::LocalCdf(std::vector<double> sorted_depths, std::vector<double> cumulative_weights)
    : depths_(std::move(sorted_depths)), cumulative_(std::move(cumulative_weights)) {}

double LocalCdf::operator()(double r) const {
    const auto it = std::upper_bound(depths_.begin(), depths_.end(), r);
    if (it == depths_.begin()) {
        return 0.0;
    }
    const auto k = static_cast<std::size_t>(it - depths_.begin());
    return cumulative_[k - 1] / cumulative_.back();
}

ConditionalCdf::ConditionalCdf(std::vector<HilbertPoint> x_bank, std::vector<double> r_bank,
                               double bandwidth)
    : bandwidth_(bandwidth) {
    require(!x_bank.empty(), ErrorCode::InvalidArgument, "conditional CDF bank is empty");
    require(x_bank.size() == r_bank.size(), ErrorCode::DimensionMismatch,
            "conditional CDF bank: predictor and depth counts differ");
    require(std::isfinite(bandwidth) && bandwidth > 0.0, ErrorCode::InvalidArgument,
            fmt::format("conditional CDF bandwidth must be positive, got {}", bandwidth));
    require_homogeneous(x_bank);
    // Keep the bank ordered by depth so each query is a single weighted pass.
    std::vector<std::size_t> order(x_bank.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return r_bank[a] < r_bank[b]; });
    x_bank_.reserve(order.size());
    r_bank_.reserve(order.size());
    for (const std::size_t i : order) {
        x_bank_.push_back(std::move(x_bank[i]));
        r_bank_.push_back(r_bank[i]);
    }
}

LocalCdf ConditionalCdf::at(const HilbertPoint& x) const {
    require_comparable(x_bank_[0], x);
    const double scale = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    std::vector<double> cumulative(x_bank_.size());
    double running = 0.0;
    for (std::size_t i = 0; i < x_bank_.size(); ++i) {
        running += std::exp(-scale * squared_distance(x_bank_[i], x));
        cumulative[i] = running;
    }
    if (!(running > 0.0)) {
        spdlog::debug("conditional CDF: all kernel weights vanished; using the unweighted bank CDF");
        for (std::size_t i = 0; i < cumulative.size(); ++i) {
            cumulative[i] = static_cast<double>(i + 1);
        }
    }
    return LocalCdf(r_bank_, std::move(cumulative));
}

double auto_cdf_bandwidth(std::span<const HilbertPoint> x_bank, std::span<const double> r_bank) {
    require(x_bank.size() == r_bank.size(), ErrorCode::DimensionMismatch,
            "conditional CDF bandwidth: predictor and depth counts differ");
    const double median = median_squared_distance(x_bank);
    require(median > 0.0, ErrorCode::Numerical,
            "conditional CDF bandwidth: all predictors in the bank coincide");
    const double base = std::sqrt(median) * std::pow(static_cast<double>(x_bank.size()), -0.2);

    constexpr std::size_t cv_limit = 2000;
    constexpr std::size_t levels = 19;
    constexpr int halvings = 6;
    const std::size_t m = std::min(x_bank.size(), cv_limit);
    if (m < 3) {
        return base;
    }

    std::vector<double> d2(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            d2[i * m + j] = d2[j * m + i] = squared_distance(x_bank[i], x_bank[j]);
        }
    }

    // Bucket b means r <= t_k exactly for k >= b.
    std::vector<double> sorted(r_bank.begin(), r_bank.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(sorted.begin(), sorted.end());
    std::array<double, levels> cut{};
    for (std::size_t k = 0; k < levels; ++k) {
        cut[k] = sorted[(k + 1) * (m - 1) / (levels + 1)];
    }
    std::vector<std::size_t> bucket(m);
    for (std::size_t j = 0; j < m; ++j) {
        bucket[j] = static_cast<std::size_t>(std::lower_bound(cut.begin(), cut.end(), r_bank[j]) - cut.begin());
    }

    // A candidate under which some held-out point gets no weight at all is
    // ruled out: its loss would be that of the unweighted fallback, not of
    // the kernel estimate actually used for scoring.
    double best = base;
    double best_loss = std::numeric_limits<double>::infinity();
    std::array<double, levels + 1> mass{};
    for (int step = 0; step <= halvings; ++step) {
        const double h = std::ldexp(base, -step);
        const double scale = 1.0 / (2.0 * h * h);
        double loss = 0.0;
        bool usable = true;
        for (std::size_t i = 0; i < m && usable; ++i) {
            mass.fill(0.0);
            double total = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                // Exact copies (bootstrap resamples) are left out with i.
                if (j == i || d2[i * m + j] == 0.0) continue;
                const double w = std::exp(-scale * d2[i * m + j]);
                mass[bucket[j]] += w;
                total += w;
            }
            if (!(total > 0.0)) {
                usable = false;
                break;
            }
            double below = 0.0;
            for (std::size_t k = 0; k < levels; ++k) {
                below += mass[k];
                const double hit = bucket[i] <= k ? 1.0 : 0.0;
                const double miss = hit - below / total;
                loss += miss * miss;
            }
        }
        if (usable && loss < best_loss) {
            best_loss = loss;
            best = h;
        }
    }
    return best;
}

std::vector<double> ModelOptions::fractions_for(Algorithm algorithm) const {
    if (!fractions.empty()) {
        return fractions;
    }
    if (algorithm == Algorithm::Homoscedastic) {
        return {0.5, 0.5};
    }
    return {0.4, 0.3, 0.3};
}

RegionPredicate::RegionPredicate(std::shared_ptr<const ConditionalKME> cme, Eigen::VectorXd weights,
                                 std::optional<LocalCdf> cdf, double threshold)
    : cme_(std::move(cme)), weights_(std::move(weights)), cdf_(std::move(cdf)), threshold_(threshold) {}

double RegionPredicate::score(const HilbertPoint& y) const {
    const double depth = cme_->depth_with_weights(weights_, y);
    return cdf_ ? (*cdf_)(depth) : depth;
}

RegionPredicate RegionPredicate::with_threshold(double threshold) const {
    RegionPredicate copy = *this;
    copy.threshold_ = threshold;
    return copy;
}

RegionModel::RegionModel(Algorithm algorithm, std::shared_ptr<const ConditionalKME> cme,
                         std::optional<ConditionalCdf> cdf, CalibrationSet calibration,
                         std::vector<double> scores)
    : algorithm_(algorithm),
      cme_(std::move(cme)),
      cdf_(std::move(cdf)),
      calibration_(std::move(calibration)),
      scores_(std::move(scores)) {
    require(cme_ != nullptr, ErrorCode::InvalidArgument, "region model needs a fitted CME");
    require(!scores_.empty(), ErrorCode::InvalidArgument, "region model needs calibration scores");
    require((algorithm_ == Algorithm::Heteroscedastic) == cdf_.has_value(),
            ErrorCode::InvalidArgument, "heteroscedastic models need a conditional CDF (and only they)");
    std::sort(scores_.begin(), scores_.end());
}

double RegionModel::score_from_depth(const HilbertPoint& x, double depth) const {
    return cdf_ ? (*cdf_)(x, depth) : depth;
}

double RegionModel::score(const HilbertPoint& x, const HilbertPoint& y) const {
    return score_from_depth(x, cme_->depth(x, y));
}

std::vector<double> RegionModel::score_pairs(std::span<const HilbertPoint> xs,
                                             std::span<const HilbertPoint> ys) const {
    std::vector<double> scores = cme_->depth_pairs(xs, ys);
    if (cdf_) {
        for (std::size_t j = 0; j < scores.size(); ++j) {
            scores[j] = (*cdf_)(xs[j], scores[j]);
        }
    }
    return scores;
}

RegionPredicate RegionModel::predict_with_threshold(const HilbertPoint& x, double threshold) const {
    std::optional<LocalCdf> local;
    if (cdf_) {
        local = cdf_->at(x);
    }
    return RegionPredicate(cme_, cme_->weights(x), std::move(local), threshold);
}

RegionPredicate RegionModel::predict(const HilbertPoint& x, double alpha) const {
    return predict_with_threshold(x, threshold(alpha));
}

std::shared_ptr<const ConditionalKME> fit_cme(const Dataset& train, const ModelOptions& options) {
    train.validate();
    KernelSpec kx{KernelFamily::Gaussian, 0.0, train.x[0].space()};
    KernelSpec ky{KernelFamily::Gaussian, 0.0, train.y[0].space()};
    kx.sigma = options.sigma_x ? *options.sigma_x : median_heuristic(train.x);
    ky.sigma = options.sigma_y ? *options.sigma_y : median_heuristic(train.y);
    return std::make_shared<const ConditionalKME>(train.x, train.y, kx, ky, options.lambda);
}

RegionModel fit_homoscedastic(const Dataset& data, const ModelOptions& options, std::uint64_t seed) {
    data.validate();
    const auto fractions = options.fractions_for(Algorithm::Homoscedastic);
    require(fractions.size() == 2, ErrorCode::InvalidArgument,
            "homoscedastic model needs exactly two split fractions");
    const auto blocks = random_split(data.size(), fractions, seed);
    auto cme = fit_cme(data.subset(blocks[0]), options);

    const Dataset cal = data.subset(blocks[1]);
    CalibrationSet calibration{cal.x, cme->depth_pairs(cal.x, cal.y)};
    std::vector<double> scores = calibration.depths;
    return RegionModel(Algorithm::Homoscedastic, std::move(cme), std::nullopt,
                       std::move(calibration), std::move(scores));
}

RegionModel fit_heteroscedastic(const Dataset& data, const ModelOptions& options,
                                std::uint64_t seed) {
    data.validate();
    const auto fractions = options.fractions_for(Algorithm::Heteroscedastic);
    require(fractions.size() == 3, ErrorCode::InvalidArgument,
            "heteroscedastic model needs exactly three split fractions");
    const auto blocks = random_split(data.size(), fractions, seed);
    auto cme = fit_cme(data.subset(blocks[0]), options);

    const Dataset bank = data.subset(blocks[1]);
    std::vector<double> bank_depths = cme->depth_pairs(bank.x, bank.y);
    const double h = options.cdf_bandwidth ? *options.cdf_bandwidth : auto_cdf_bandwidth(bank.x, bank_depths);
    ConditionalCdf cdf(bank.x, std::move(bank_depths), h);

    const Dataset test = data.subset(blocks[2]);
    CalibrationSet calibration{test.x, cme->depth_pairs(test.x, test.y)};
    std::vector<double> scores(test.size());
    for (std::size_t j = 0; j < test.size(); ++j) {
        scores[j] = cdf(test.x[j], calibration.depths[j]);
    }
    return RegionModel(Algorithm::Heteroscedastic, std::move(cme), std::move(cdf),
                       std::move(calibration), std::move(scores));
}

RegionModel fit_region_model(Algorithm algorithm, const Dataset& data, const ModelOptions& options,
                             std::uint64_t seed) {
    return algorithm == Algorithm::Homoscedastic ? fit_homoscedastic(data, options, seed)
                                                 : fit_heteroscedastic(data, options, seed);
}

} // namespace hc
