#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hc/dataset.hpp"
#include "hc/depth.hpp"

namespace hc {

enum class Algorithm {
    Homoscedastic,   ///< two-way split, threshold on the conditional depth
    Heteroscedastic, ///< three-way split, threshold on the conditional CDF of depths
};

std::string_view to_string(Algorithm algorithm) noexcept;
Algorithm parse_algorithm(std::string_view text);

/// Seeded uniform random partition of [0, n) into consecutive blocks whose
/// sizes follow `fractions` (rounded; the last block takes the remainder).
/// Throws if any block would be empty or the fractions do not sum to 1.
std::vector<std::vector<std::size_t>> random_split(std::size_t n, std::span<const double> fractions,
                                                   std::uint64_t seed);

/// Split-conformal threshold. With k = floor(alpha * (n + 1)) over the
/// ascending `sorted_scores`, returns -inf when k < 1 and the k-th smallest
/// score otherwise. The rule "score >= threshold" has marginal coverage of
/// at least 1 - alpha under exchangeability.
double conformal_threshold(std::span<const double> sorted_scores, double alpha);

/// Conditional CDF of a predictor at one fixed x: weighted empirical CDF of
/// the bank depths.
class LocalCdf {
public:
    LocalCdf(std::vector<double> sorted_depths, std::vector<double> cumulative_weights);

    /// Weighted fraction of bank depths <= r. Nondecreasing, right-continuous.
    double operator()(double r) const;

private:
    std::vector<double> depths_;
    std::vector<double> cumulative_;
};

/// Nadaraya-Watson estimate of g(x, r) = P(D <= r | X = x) from a bank of
/// (X_i, r_i), Gaussian weights exp(-d(X_i, x)^2 / (2 h^2)).
class ConditionalCdf {
public:
    ConditionalCdf(std::vector<HilbertPoint> x_bank, std::vector<double> r_bank, double bandwidth);

    double operator()(const HilbertPoint& x, double r) const { return at(x)(r); }
    /// Weights are computed once per x. If every weight underflows to zero
    /// the unweighted empirical CDF of the bank is used instead.
    LocalCdf at(const HilbertPoint& x) const;

    const std::vector<HilbertPoint>& x_bank() const noexcept { return x_bank_; }
    const std::vector<double>& r_bank() const noexcept { return r_bank_; }
    double bandwidth() const noexcept { return bandwidth_; }

private:
    std::vector<HilbertPoint> x_bank_;
    std::vector<double> r_bank_;
    double bandwidth_;
};

/// Automatic CDF bandwidth. The scale is sqrt(median pairwise squared
/// distance) * n^(-1/5); the multiplier 2^-k, k = 0..6, minimizing the
/// leave-one-out Brier score of the bank CDF at 19 depth quantiles is kept.
/// Multipliers under which some held-out point gets zero total weight are skipped.
/// Exact copies of the held-out predictor are left out with it.
/// Banks above 2000 points are cross-validated on their first 2000.
double auto_cdf_bandwidth(std::span<const HilbertPoint> x_bank, std::span<const double> r_bank);

/// Fitting options shared by both algorithms. Unset bandwidths are chosen
/// from the training split (median heuristic).
struct ModelOptions {
    std::optional<double> sigma_x;
    std::optional<double> sigma_y;
    double lambda = default_ridge;
    std::optional<double> cdf_bandwidth;
    /// Empty means the algorithm default: {0.5, 0.5} or {0.4, 0.3, 0.3}.
    std::vector<double> fractions;

    std::vector<double> fractions_for(Algorithm algorithm) const;
};

/// Held-out pairs scored by the fitted model, kept for resampling.
struct CalibrationSet {
    std::vector<HilbertPoint> x;
    std::vector<double> depths;
};

/// Membership test for a fixed x and threshold.
class RegionPredicate {
public:
    RegionPredicate(std::shared_ptr<const ConditionalKME> cme, Eigen::VectorXd weights,
                    std::optional<LocalCdf> cdf, double threshold);

    /// Homoscedastic: conditional depth. Heteroscedastic: g(x, depth).
    double score(const HilbertPoint& y) const;
    bool contains(const HilbertPoint& y) const { return score(y) >= threshold_; }
    double threshold() const noexcept { return threshold_; }
    RegionPredicate with_threshold(double threshold) const;

private:
    std::shared_ptr<const ConditionalKME> cme_;
    Eigen::VectorXd weights_;
    std::optional<LocalCdf> cdf_;
    double threshold_;
};

/// Fitted split-conformal region model. Immutable; queries are thread-safe.
class RegionModel {
public:
    RegionModel(Algorithm algorithm, std::shared_ptr<const ConditionalKME> cme,
                std::optional<ConditionalCdf> cdf, CalibrationSet calibration,
                std::vector<double> scores);

    Algorithm algorithm() const noexcept { return algorithm_; }
    const ConditionalKME& cme() const noexcept { return *cme_; }
    const std::shared_ptr<const ConditionalKME>& cme_ptr() const noexcept { return cme_; }
    const std::optional<ConditionalCdf>& cdf() const noexcept { return cdf_; }
    /// Homoscedastic: the calibration pairs. Heteroscedastic: the test split.
    const CalibrationSet& calibration() const noexcept { return calibration_; }
    /// Conformity scores, ascending.
    const std::vector<double>& scores() const noexcept { return scores_; }

    double threshold(double alpha) const { return conformal_threshold(scores_, alpha); }

    /// Conformity score of the pair (x, y).
    double score(const HilbertPoint& x, const HilbertPoint& y) const;
    /// Scores of the pairs (xs[j], ys[j]), batched.
    std::vector<double> score_pairs(std::span<const HilbertPoint> xs,
                                    std::span<const HilbertPoint> ys) const;
    /// Score of a pair from its conditional depth.
    double score_from_depth(const HilbertPoint& x, double depth) const;

    RegionPredicate predict(const HilbertPoint& x, double alpha) const;
    RegionPredicate predict_with_threshold(const HilbertPoint& x, double threshold) const;

private:
    Algorithm algorithm_;
    std::shared_ptr<const ConditionalKME> cme_;
    std::optional<ConditionalCdf> cdf_;
    CalibrationSet calibration_;
    std::vector<double> scores_;
};

/// Fits the conditional KME on `train` with the options' kernels.
std::shared_ptr<const ConditionalKME> fit_cme(const Dataset& train, const ModelOptions& options);

/// Two-way split: CME on the first block, calibration depths on the second.
RegionModel fit_homoscedastic(const Dataset& data, const ModelOptions& options, std::uint64_t seed);

/// Three-way split: CME, conditional-CDF bank, conformity scores.
RegionModel fit_heteroscedastic(const Dataset& data, const ModelOptions& options,
                                std::uint64_t seed);

RegionModel fit_region_model(Algorithm algorithm, const Dataset& data, const ModelOptions& options,
                             std::uint64_t seed);

} // namespace hc
