#include "hc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hc/error.hpp"
#include "hc/parallel.hpp"
#include "hc/random.hpp"
#include "hc/tolerance.hpp"

namespace hc {

std::vector<std::uint8_t> coverage_indicators(std::span<const double> scores, double threshold) {
    std::vector<std::uint8_t> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = scores[i] >= threshold ? 1 : 0;
    }
    return out;
}

std::vector<std::uint8_t> coverage_indicators(const RegionModel& model, const Dataset& fresh,
                                              double alpha) {
    const auto scores = model.score_pairs(fresh.x, fresh.y);
    return coverage_indicators(scores, model.threshold(alpha));
}

double mean_indicator(std::span<const std::uint8_t> indicators) {
    require(!indicators.empty(), ErrorCode::InvalidArgument, "coverage of an empty evaluation set");
    const auto hits = std::accumulate(indicators.begin(), indicators.end(), std::size_t{0});
    return static_cast<double>(hits) / static_cast<double>(indicators.size());
}

double marginal_coverage(const RegionModel& model, const Dataset& fresh, double alpha) {
    return mean_indicator(coverage_indicators(model, fresh, alpha));
}

double silverman_bandwidth(std::span<const double> xs) {
    require(xs.size() >= 2, ErrorCode::InvalidArgument, "bandwidth rule needs at least two points");
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    require(sd > 0.0, ErrorCode::Numerical, "bandwidth rule: all x values coincide");
    return 1.06 * sd * std::pow(n, -0.2);
}

std::vector<double> conditional_coverage_curve(std::span<const std::uint8_t> indicators,
                                               std::span<const double> xs,
                                               std::span<const double> grid, double bandwidth) {
    require(!xs.empty() && indicators.size() == xs.size(), ErrorCode::DimensionMismatch,
            "coverage curve: indicator and x counts differ");
    require(std::isfinite(bandwidth) && bandwidth > 0.0, ErrorCode::InvalidArgument,
            fmt::format("coverage curve bandwidth must be positive, got {}", bandwidth));
    const double scale = 1.0 / (2.0 * bandwidth * bandwidth);
    std::vector<double> curve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double d = xs[i] - grid[g];
            const double w = std::exp(-scale * d * d);
            num += w * indicators[i];
            den += w;
        }
        if (den > 0.0) {
            curve[g] = num / den;
            continue;
        }
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (std::abs(xs[i] - grid[g]) < std::abs(xs[nearest] - grid[g])) {
                nearest = i;
            }
        }
        spdlog::debug("coverage curve: zero weight at x = {}; using nearest observation", grid[g]);
        curve[g] = indicators[nearest];
    }
    return curve;
}

double l2_coverage_error(std::span<const double> grid, std::span<const double> curve, double nominal) {
    require(grid.size() == curve.size() && grid.size() >= 2, ErrorCode::DimensionMismatch,
            "L2 error needs a curve on a grid of at least two points");
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
        const double a = curve[j] - nominal;
        const double b = curve[j + 1] - nominal;
        total += 0.5 * (grid[j + 1] - grid[j]) * (a * a + b * b);
    }
    return total;
}

std::string_view to_string(StudyAlgorithm algorithm) noexcept {
    switch (algorithm) {
    case StudyAlgorithm::Tolerance: return "tolerance";
    case StudyAlgorithm::Homoscedastic: return "homo";
    case StudyAlgorithm::Heteroscedastic: return "hetero";
    case StudyAlgorithm::Bootstrap: return "bootstrap";
    }
    return "unknown";
}

StudyAlgorithm parse_study_algorithm(std::string_view text) {
    if (text == "tolerance") return StudyAlgorithm::Tolerance;
    if (text == "homo" || text == "homoscedastic") return StudyAlgorithm::Homoscedastic;
    if (text == "hetero" || text == "heteroscedastic") return StudyAlgorithm::Heteroscedastic;
    if (text == "bootstrap") return StudyAlgorithm::Bootstrap;
    fail(ErrorCode::Config, fmt::format("algorithm: unknown value '{}'", text));
}

void StudyConfig::validate() const {
    require(n >= 1, ErrorCode::Config, "n: must be >= 1");
    require(replicates >= 1, ErrorCode::Config, "replicates: must be >= 1");
    require(n_eval >= 1, ErrorCode::Config, "n_eval: must be >= 1");
    require(!alphas.empty(), ErrorCode::Config, "alphas: at least one level is required");
    for (const double a : alphas) {
        require(a > 0.0 && a < 1.0, ErrorCode::Config, fmt::format("alphas: {} is outside (0, 1)", a));
    }
    require(gamma > 0.0 && gamma < 1.0, ErrorCode::Config, "gamma: must lie in (0, 1)");
    require(bootstrap_replicates >= 1, ErrorCode::Config, "bootstrap_replicates: must be >= 1");
    require(eval_points >= 2, ErrorCode::Config, "eval_points: must be >= 2");
    require(model.lambda > 0.0, ErrorCode::Config, "lambda: must be positive");
    if (!model.fractions.empty()) {
        double total = 0.0;
        for (const double f : model.fractions) {
            require(f > 0.0, ErrorCode::Config, "splits: fractions must be positive");
            total += f;
        }
        require(std::abs(total - 1.0) <= 1e-9, ErrorCode::Config, "splits: fractions must sum to 1");
    }
}

double StudyConfig::nominal(double alpha) const {
    const bool conformal = algorithm == StudyAlgorithm::Homoscedastic ||
                           algorithm == StudyAlgorithm::Heteroscedastic;
    return conformal ? 1.0 - alpha : alpha;
}

namespace {

struct AlphaOutcome {
    double coverage = 0.0;
    std::optional<double> l2;
    std::vector<double> curve;
};

std::optional<std::pair<double, double>> default_support(Dgp dgp) {
    switch (dgp) {
    case Dgp::Setting1:
    case Dgp::Setting2: return std::pair{0.0, 5.0};
    case Dgp::Distributional: return std::pair{0.0, 1.0};
    case Dgp::Func2Func: return std::nullopt;
    }
    return std::nullopt;
}

bool scalar_predictor(const Dataset& data) {
    return data.x[0].space() == Space::Euclidean && data.x[0].size() == 1;
}

std::vector<double> scalar_values(std::span<const HilbertPoint> points) {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i] = points[i][0];
    }
    return out;
}

std::vector<AlphaOutcome> run_replicate(const StudyConfig& config, std::uint64_t rep_seed,
                                        std::span<const double> eval_grid) {
    const Dataset data = generate(config.dgp, config.n, derive_seed(rep_seed, streams::data, 0), config.grid);
    std::vector<AlphaOutcome> out(config.alphas.size());

    if (config.algorithm == StudyAlgorithm::Bootstrap) {
        BootstrapOptions options;
        options.algorithm = Algorithm::Heteroscedastic;
        options.model = config.model;
        options.replicates = config.bootstrap_replicates;
        options.direction = config.direction;
        options.refit = config.refit;
        const HilbertPoint x = HilbertPoint::scalar(config.x0);
        const auto fresh = sample_conditional(config.dgp, x, config.n_eval,
                                              derive_seed(rep_seed, streams::conditional, 0), config.grid);
        for (std::size_t a = 0; a < config.alphas.size(); ++a) {
            const auto region = bootstrap_tolerance(data, config.alphas[a], config.gamma, x, options,
                                                    derive_seed(rep_seed, streams::bootstrap, a));
            std::size_t inside = 0;
            for (const auto& y : fresh) {
                inside += region.contains(y) ? 1 : 0;
            }
            out[a].coverage = static_cast<double>(inside) / static_cast<double>(fresh.size());
        }
        return out;
    }

    const Dataset fresh = generate(config.dgp, config.n_eval, derive_seed(rep_seed, streams::eval, 0), config.grid);
    std::vector<std::vector<std::uint8_t>> indicators(config.alphas.size());

    if (config.algorithm == StudyAlgorithm::Tolerance) {
        KernelSpec kernel{KernelFamily::Gaussian, 0.0, data.y[0].space()};
        kernel.sigma = config.model.sigma_y ? *config.model.sigma_y : median_heuristic(data.y);
        for (std::size_t a = 0; a < config.alphas.size(); ++a) {
            const auto region = ToleranceRegion::fit(data.y, kernel, config.alphas[a]);
            const auto depths = region.kme().depths(fresh.y);
            indicators[a] = coverage_indicators(depths, region.threshold());
        }
    } else {
        const Algorithm algorithm = config.algorithm == StudyAlgorithm::Homoscedastic
                                        ? Algorithm::Homoscedastic
                                        : Algorithm::Heteroscedastic;
        const RegionModel model =
            fit_region_model(algorithm, data, config.model, derive_seed(rep_seed, streams::split, 0));
        const auto scores = model.score_pairs(fresh.x, fresh.y);
        for (std::size_t a = 0; a < config.alphas.size(); ++a) {
            indicators[a] = coverage_indicators(scores, model.threshold(config.alphas[a]));
        }
    }

    const bool curves = !eval_grid.empty() && scalar_predictor(fresh);
    std::vector<double> xs;
    double h = 0.0;
    if (curves) {
        xs = scalar_values(fresh.x);
        h = config.smoothing_bandwidth ? *config.smoothing_bandwidth : silverman_bandwidth(xs);
    }
    for (std::size_t a = 0; a < config.alphas.size(); ++a) {
        out[a].coverage = mean_indicator(indicators[a]);
        if (curves) {
            out[a].curve = conditional_coverage_curve(indicators[a], xs, eval_grid, h);
            out[a].l2 = l2_coverage_error(eval_grid, out[a].curve, config.nominal(config.alphas[a]));
        }
    }
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::pair<double, double> mean_and_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    if (v.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (const double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

} // namespace

CoverageReport run_study(const StudyConfig& config) {
    config.validate();

    std::vector<double> eval_grid;
    const auto support = default_support(config.dgp);
    const bool want_curves = config.algorithm != StudyAlgorithm::Bootstrap &&
                             (support || (config.support_lo && config.support_hi));
    if (want_curves) {
        const double lo = config.support_lo.value_or(support ? support->first : 0.0);
        const double hi = config.support_hi.value_or(support ? support->second : 1.0);
        require(hi > lo, ErrorCode::Config, "support: support_hi must exceed support_lo");
        eval_grid.resize(config.eval_points);
        for (std::size_t j = 0; j < config.eval_points; ++j) {
            eval_grid[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(config.eval_points - 1);
        }
        eval_grid.back() = hi;
    }

    const std::size_t workers = config.workers == 0 ? default_worker_count() : config.workers;
    std::vector<std::vector<AlphaOutcome>> outcomes(config.replicates);
    std::vector<std::string> errors(config.replicates);
    std::vector<std::uint64_t> seeds(config.replicates);
    parallel_for(config.replicates, workers, [&](std::size_t r) {
        seeds[r] = derive_seed(config.seed, streams::replicate, r);
        try {
            outcomes[r] = run_replicate(config, seeds[r], eval_grid);
        } catch (const Error& e) {
            errors[r] = e.what();
            spdlog::warn("replicate {} (seed {}) failed: {}", r, seeds[r], e.what());
        }
    });

    CoverageReport report;
    report.dgp = std::string(to_string(config.dgp));
    report.algorithm = std::string(to_string(config.algorithm));
    report.n = config.n;
    report.replicates = config.replicates;
    for (std::size_t r = 0; r < config.replicates; ++r) {
        report.failed += errors[r].empty() ? 0 : 1;
    }
    const std::size_t succeeded = config.replicates - report.failed;
    if (static_cast<double>(succeeded) < 0.9 * static_cast<double>(config.replicates)) {
        fail(ErrorCode::Numerical, fmt::format("study: only {} of {} replicates succeeded (first error: {})",
                                               succeeded, config.replicates,
                                               *std::find_if(errors.begin(), errors.end(),
                                                             [](const auto& e) { return !e.empty(); })));
    }

    for (std::size_t r = 0; r < config.replicates; ++r) {
        for (std::size_t a = 0; a < config.alphas.size(); ++a) {
            ReplicateResult row;
            row.replicate = r;
            row.seed = seeds[r];
            row.alpha = config.alphas[a];
            if (!errors[r].empty()) {
                row.ok = false;
                row.error = errors[r];
            } else {
                row.coverage = outcomes[r][a].coverage;
                row.l2_error = outcomes[r][a].l2;
            }
            report.rows.push_back(std::move(row));
        }
    }

    report.plot_grid = eval_grid;
    for (std::size_t a = 0; a < config.alphas.size(); ++a) {
        AlphaSummary s;
        s.alpha = config.alphas[a];
        s.nominal = config.nominal(s.alpha);
        std::vector<double> cov;
        std::vector<double> l2;
        std::vector<double> dev;
        std::vector<double> curve(eval_grid.size(), 0.0);
        std::size_t hits = 0;
        for (std::size_t r = 0; r < config.replicates; ++r) {
            if (!errors[r].empty()) {
                continue;
            }
            const auto& o = outcomes[r][a];
            cov.push_back(o.coverage);
            dev.push_back(std::abs(o.coverage - s.nominal));
            hits += o.coverage >= s.alpha ? 1 : 0;
            if (o.l2) {
                l2.push_back(*o.l2);
            }
            for (std::size_t j = 0; j < o.curve.size() && j < curve.size(); ++j) {
                curve[j] += o.curve[j];
            }
        }
        s.succeeded = cov.size();
        std::tie(s.mean_coverage, s.se_coverage) = mean_and_se(cov);
        s.median_abs_deviation = median_of(dev);
        if (!l2.empty()) {
            const auto [m, se] = mean_and_se(l2);
            s.mean_l2_error = m;
            s.se_l2_error = se;
        }
        if (config.algorithm == StudyAlgorithm::Bootstrap) {
            s.achieved_confidence = static_cast<double>(hits) / static_cast<double>(cov.size());
        }
        for (double& v : curve) {
            v /= static_cast<double>(cov.size());
        }
        if (!eval_grid.empty()) {
            report.plot_curves.push_back(std::move(curve));
        }
        report.summaries.push_back(s);
    }
    return report;
}

} // namespace hc
