#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hc/bootstrap.hpp"
#include "hc/conformal.hpp"
#include "hc/simgen.hpp"

namespace hc {

/// 1 where y_i lies in the region at x_i (score >= threshold), else 0.
std::vector<std::uint8_t> coverage_indicators(const RegionModel& model, const Dataset& fresh,
                                              double alpha);
std::vector<std::uint8_t> coverage_indicators(std::span<const double> scores, double threshold);

double mean_indicator(std::span<const std::uint8_t> indicators);

/// Fraction of fresh pairs covered by the model's region at level alpha.
double marginal_coverage(const RegionModel& model, const Dataset& fresh, double alpha);

/// 1.06 * sd(xs) * n^(-1/5).
double silverman_bandwidth(std::span<const double> xs);

/// Nadaraya-Watson smooth of 0/1 indicators against scalar xs, evaluated on
/// `grid`. Where every weight underflows, the nearest observation is used.
std::vector<double> conditional_coverage_curve(std::span<const std::uint8_t> indicators,
                                               std::span<const double> xs,
                                               std::span<const double> grid, double bandwidth);

/// Trapezoid integral of (curve - nominal)^2 over the grid.
double l2_coverage_error(std::span<const double> grid, std::span<const double> curve, double nominal);

enum class StudyAlgorithm { Tolerance, Homoscedastic, Heteroscedastic, Bootstrap };

std::string_view to_string(StudyAlgorithm algorithm) noexcept;
StudyAlgorithm parse_study_algorithm(std::string_view text);

/// Declarative Monte Carlo experiment.
///
/// `alphas` are miscoverage levels for the conformal algorithms (nominal
/// coverage 1 - alpha) and target contents for tolerance and bootstrap.
struct StudyConfig {
    Dgp dgp = Dgp::Setting2;
    std::size_t n = 1000;
    std::size_t replicates = 100;
    std::size_t n_eval = 2000;
    std::size_t grid = 0;
    std::vector<double> alphas{0.1};
    StudyAlgorithm algorithm = StudyAlgorithm::Homoscedastic;
    ModelOptions model;

    // Bootstrap-only.
    double gamma = 0.9;
    std::size_t bootstrap_replicates = 200;
    BootstrapDirection direction = BootstrapDirection::PaperUpper;
    RefitMode refit = RefitMode::Full;
    double x0 = 2.5;

    // Conditional-coverage evaluation (scalar predictors).
    std::optional<double> smoothing_bandwidth;
    std::size_t eval_points = 501;
    std::optional<double> support_lo;
    std::optional<double> support_hi;

    std::uint64_t seed = 1;
    std::size_t workers = 0;
    std::string output = ".";

    /// Throws a config error naming the offending field.
    void validate() const;
    double nominal(double alpha) const;
};

struct ReplicateResult {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double alpha = 0.0;
    double coverage = 0.0;
    std::optional<double> l2_error;
    bool ok = true;
    std::string error;
};

struct AlphaSummary {
    double alpha = 0.0;
    double nominal = 0.0;
    std::size_t succeeded = 0;
    double mean_coverage = 0.0;
    double se_coverage = 0.0;
    double median_abs_deviation = 0.0;
    std::optional<double> mean_l2_error;
    std::optional<double> se_l2_error;
    /// Bootstrap only: fraction of replicates with content >= alpha.
    std::optional<double> achieved_confidence;
};

struct CoverageReport {
    std::string dgp;
    std::string algorithm;
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::size_t failed = 0;
    std::vector<AlphaSummary> summaries;
    /// Replicate-major, alpha-minor.
    std::vector<ReplicateResult> rows;
    /// Conditional-coverage curves averaged over replicates (scalar X only).
    std::vector<double> plot_grid;
    std::vector<std::vector<double>> plot_curves;
};

/// Runs the study. Seed-deterministic and independent of the worker count.
/// Failed replicates are recorded and skipped; fewer than 90% successes
/// is an error.
CoverageReport run_study(const StudyConfig& config);

} // namespace hc
