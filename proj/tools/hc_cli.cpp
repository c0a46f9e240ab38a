// hc: command-line front end for simulation, fitting, prediction and
// coverage studies. Failures print one line `error: <code>: <message>` to
// stderr and exit with status 2 (1 for usage errors).

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hc/bootstrap.hpp"
#include "hc/config.hpp"
#include "hc/csv_io.hpp"
#include "hc/error.hpp"
#include "hc/eval.hpp"
#include "hc/parallel.hpp"
#include "hc/persist.hpp"
#include "hc/random.hpp"
#include "hc/tolerance.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<double> alphas;
    bool quiet = false;
};

void add_common(CLI::App& cmd, Common& common) {
    cmd.add_option("--config", common.config, "settings file")->check(CLI::ExistingFile);
    cmd.add_option("--seed", common.seed, "master seed (overrides the config)");
    cmd.add_option("--out", common.out, "output directory");
    cmd.add_option("--alpha", common.alphas, "level(s), comma-separated")->delimiter(',');
    cmd.add_flag("--quiet", common.quiet, "only report errors");
}

hc::Settings resolve(const Common& common) {
    hc::Settings s = common.config.empty() ? hc::Settings{} : hc::load_settings(common.config);
    if (common.seed) {
        s.study.seed = *common.seed;
    }
    if (!common.alphas.empty()) {
        s.study.alphas = common.alphas;
    }
    if (!common.out.empty()) {
        s.study.output = common.out;
    }
    if (s.study.workers == 0) {
        s.study.workers = hc::default_worker_count();
    }
    return s;
}

hc::Algorithm region_algorithm(hc::StudyAlgorithm algorithm) {
    switch (algorithm) {
    case hc::StudyAlgorithm::Homoscedastic: return hc::Algorithm::Homoscedastic;
    case hc::StudyAlgorithm::Heteroscedastic: return hc::Algorithm::Heteroscedastic;
    default:
        hc::fail(hc::ErrorCode::Config,
                 fmt::format("algorithm: '{}' does not produce a region model", to_string(algorithm)));
    }
}

hc::Dataset load_or_generate(const hc::Settings& s, const std::vector<std::string>& files,
                             std::uint64_t stream) {
    if (!files.empty()) {
        std::vector<fs::path> paths(files.begin(), files.end());
        return hc::read_dataset(paths, s.files.x_space, s.files.y_space);
    }
    hc::require(!s.files.from_files, hc::ErrorCode::Config, "dgp: 'file' requires --data");
    return hc::generate(s.study.dgp, s.study.n, hc::derive_seed(s.study.seed, stream, 0), s.study.grid);
}

void announce(const Common& common, const fs::path& path) {
    if (!common.quiet) {
        std::cout << path.string() << '\n';
    }
}

int cmd_simulate(const Common& common) {
    const hc::Settings s = resolve(common);
    hc::require(!s.files.from_files, hc::ErrorCode::Config, "dgp: simulate needs a generator");
    s.study.validate();
    const hc::Dataset data =
        hc::generate(s.study.dgp, s.study.n, hc::derive_seed(s.study.seed, hc::streams::data, 0), s.study.grid);
    for (const auto& path : hc::write_dataset(data, s.study.output, "data")) {
        announce(common, path);
    }
    return 0;
}

int cmd_fit(const Common& common, const std::vector<std::string>& data_files, const std::string& model_path) {
    hc::Settings s = resolve(common);
    const hc::Dataset data = load_or_generate(s, data_files, hc::streams::data);
    const auto algorithm = region_algorithm(s.study.algorithm);
    hc::RegionModel model = hc::fit_region_model(algorithm, data, s.study.model,
                                                 hc::derive_seed(s.study.seed, hc::streams::split, 0));
    const std::string dgp = data_files.empty() ? std::string(to_string(s.study.dgp)) : "file";
    const auto persisted = hc::make_persisted(std::move(model), s.study.alphas, dgp, s.study.seed);
    const fs::path path = model_path.empty() ? fs::path(s.study.output) / "model.txt" : fs::path(model_path);
    hc::save_model(path, persisted);
    announce(common, path);
    return 0;
}

int cmd_predict(const Common& common, const std::string& model_path, const std::vector<std::string>& data_files) {
    const hc::Settings s = resolve(common);
    const auto persisted = hc::load_model(fs::path(model_path));
    const std::vector<double> alphas = common.alphas.empty() ? persisted.alphas : common.alphas;
    hc::require(!alphas.empty(), hc::ErrorCode::Config, "alpha: no levels given and none stored in the model");
    std::vector<fs::path> paths(data_files.begin(), data_files.end());
    const hc::Dataset queries = hc::read_dataset(paths, s.files.x_space, s.files.y_space);
    const auto scores = persisted.model.score_pairs(queries.x, queries.y);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        for (const double a : alphas) {
            const double t = persisted.model.threshold(a);
            rows.push_back({std::to_string(i), hc::format_real(a), hc::format_real(scores[i]), hc::format_real(t),
                            scores[i] >= t ? "1" : "0"});
        }
    }
    const fs::path out = fs::path(s.study.output) / "membership.csv";
    hc::write_csv(out, {"query", "alpha", "score", "threshold", "member"}, rows);
    announce(common, out);
    return 0;
}

int cmd_coverage(const Common& common, const std::string& model_path, const std::vector<std::string>& data_files,
                 const std::vector<std::string>& train_files) {
    hc::Settings s = resolve(common);
    hc::require(!data_files.empty(), hc::ErrorCode::Config, "data: coverage needs evaluation pairs");
    std::vector<fs::path> paths(data_files.begin(), data_files.end());
    const hc::Dataset fresh = hc::read_dataset(paths, s.files.x_space, s.files.y_space);

    std::optional<hc::RegionModel> model;
    std::string algorithm;
    if (!model_path.empty()) {
        auto persisted = hc::load_model(fs::path(model_path));
        if (common.alphas.empty() && !persisted.alphas.empty()) {
            s.study.alphas = persisted.alphas;
        }
        model.emplace(std::move(persisted.model));
    } else {
        hc::require(!common.config.empty(), hc::ErrorCode::Config, "coverage needs --model or --config");
        const hc::Dataset train = load_or_generate(s, train_files, hc::streams::data);
        model.emplace(hc::fit_region_model(region_algorithm(s.study.algorithm), train, s.study.model,
                                           hc::derive_seed(s.study.seed, hc::streams::split, 0)));
    }
    algorithm = std::string(to_string(model->algorithm()));
    const auto scores = model->score_pairs(fresh.x, fresh.y);

    hc::CoverageReport report;
    report.dgp = fresh.dgp;
    report.algorithm = algorithm;
    // Full fitting sample: every split the model was built from.
    report.n = model->cme().size() + model->calibration().x.size() +
               (model->cdf() ? model->cdf()->x_bank().size() : 0);
    report.replicates = 1;
    for (const double a : s.study.alphas) {
        const auto ind = hc::coverage_indicators(scores, model->threshold(a));
        hc::AlphaSummary summary;
        summary.alpha = a;
        summary.nominal = 1.0 - a;
        summary.succeeded = 1;
        summary.mean_coverage = hc::mean_indicator(ind);
        summary.median_abs_deviation = std::abs(summary.mean_coverage - summary.nominal);
        report.summaries.push_back(summary);
    }
    const fs::path out = fs::path(s.study.output) / "coverage.csv";
    hc::write_report(out, report);
    announce(common, out);
    return 0;
}

int cmd_tolerance(const Common& common, const std::vector<std::string>& data_files) {
    const hc::Settings s = resolve(common);
    const hc::Dataset data = load_or_generate(s, data_files, hc::streams::data);
    const auto& ys = data.y;
    const hc::KernelSpec kernel{hc::KernelFamily::Gaussian,
                                s.study.model.sigma_y ? *s.study.model.sigma_y : hc::median_heuristic(ys), ys.front().space()};
    std::vector<std::vector<std::string>> rows;
    for (const double content : s.study.alphas) {
        const auto region = hc::ToleranceRegion::fit(ys, kernel, content);
        const double expected = static_cast<double>(region.rank()) / static_cast<double>(ys.size() + 1);
        rows.push_back({hc::format_real(content), std::to_string(ys.size()), std::to_string(region.rank()),
                        hc::format_real(region.threshold()), hc::format_real(expected),
                        hc::format_real(kernel.sigma)});
    }
    const fs::path out = fs::path(s.study.output) / "tolerance.csv";
    hc::write_csv(out, {"alpha", "n", "rank", "threshold", "expected_content", "sigma"}, rows);
    announce(common, out);
    return 0;
}

int cmd_bootstrap(const Common& common, const std::vector<std::string>& data_files) {
    const hc::Settings s = resolve(common);
    const hc::Dataset data = load_or_generate(s, data_files, hc::streams::data);
    hc::require(data.x.front().space() == hc::Space::Euclidean && data.x.front().size() == 1,
                hc::ErrorCode::Config, "x0: bootstrap summaries need scalar predictors");
    hc::BootstrapOptions options;
    options.model = s.study.model;
    options.replicates = s.study.bootstrap_replicates;
    options.direction = s.study.direction;
    options.refit = s.study.refit;
    options.workers = s.study.workers;
    const auto x0 = hc::HilbertPoint::scalar(s.study.x0);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t a = 0; a < s.study.alphas.size(); ++a) {
        const double content = s.study.alphas[a];
        const auto region = hc::bootstrap_tolerance(data, content, s.study.gamma, x0, options,
                                                    hc::derive_seed(s.study.seed, hc::streams::bootstrap, a));
        rows.push_back({hc::format_real(content), hc::format_real(s.study.gamma),
                        std::string(to_string(s.study.direction)), std::to_string(options.replicates),
                        std::to_string(hc::adjusted_rank(options.replicates, s.study.gamma, s.study.direction)),
                        hc::format_real(region.threshold()),
                        hc::format_real(region.model().threshold(1.0 - content))});
    }
    const fs::path out = fs::path(s.study.output) / "bootstrap.csv";
    hc::write_csv(out, {"alpha", "gamma", "direction", "B_boot", "rank", "threshold", "base_threshold"}, rows);
    announce(common, out);
    return 0;
}

int cmd_study(const Common& common) {
    const hc::Settings s = resolve(common);
    hc::require(!s.files.from_files, hc::ErrorCode::Config, "dgp: study needs a generator");
    const hc::CoverageReport report = hc::run_study(s.study);
    const fs::path dir(s.study.output);
    hc::write_report(dir / "report.csv", report);
    hc::write_replicates(dir / "replicates.csv", report);
    announce(common, dir / "report.csv");
    announce(common, dir / "replicates.csv");
    if (!report.plot_grid.empty()) {
        hc::write_plot(dir / "plot.csv", report);
        announce(common, dir / "plot.csv");
    }
    return 0;
}

std::string one_line(std::string text) {
    for (auto& ch : text) {
        if (ch == '\n' || ch == '\r') {
            ch = ' ';
        }
    }
    return text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Depth-based conformal prediction and tolerance regions in Hilbert spaces"};
    app.require_subcommand(1);

    Common common;
    std::vector<std::string> data_files;
    std::vector<std::string> train_files;
    std::string model_path;

    auto* simulate = app.add_subcommand("simulate", "generate a dataset from the configured design");
    auto* fit = app.add_subcommand("fit", "fit a region model and save it");
    auto* predict = app.add_subcommand("predict", "membership of query pairs in a saved model's regions");
    auto* coverage = app.add_subcommand("coverage", "marginal coverage of a model on evaluation pairs");
    auto* tolerance = app.add_subcommand("tolerance", "unconditional tolerance regions of the responses");
    auto* bootstrap = app.add_subcommand("bootstrap", "bootstrap-adjusted tolerance thresholds at x0");
    auto* study = app.add_subcommand("study", "Monte Carlo coverage study");
    for (auto* cmd : {simulate, fit, predict, coverage, tolerance, bootstrap, study}) {
        add_common(*cmd, common);
    }
    for (auto* cmd : {fit, tolerance, bootstrap}) {
        cmd->add_option("--data", data_files, "data CSV, or predictor and response CSVs")->check(CLI::ExistingFile);
    }
    fit->add_option("--model", model_path, "model output path (default <out>/model.txt)");
    predict->add_option("--model", model_path, "saved model")->required()->check(CLI::ExistingFile);
    predict->add_option("--data", data_files, "query CSV(s)")->required()->check(CLI::ExistingFile);
    coverage->add_option("--model", model_path, "saved model")->check(CLI::ExistingFile);
    coverage->add_option("--data", data_files, "evaluation CSV(s)")->required()->check(CLI::ExistingFile);
    coverage->add_option("--train", train_files, "training CSV(s) when fitting from --config")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << one_line(e.what()) << '\n';
        return 1;
    }

    spdlog::set_default_logger(spdlog::stderr_color_st("hc"));
    spdlog::set_level(common.quiet ? spdlog::level::err : spdlog::level::info);

    try {
        if (*simulate) return cmd_simulate(common);
        if (*fit) return cmd_fit(common, data_files, model_path);
        if (*predict) return cmd_predict(common, model_path, data_files);
        if (*coverage) return cmd_coverage(common, model_path, data_files, train_files);
        if (*tolerance) return cmd_tolerance(common, data_files);
        if (*bootstrap) return cmd_bootstrap(common, data_files);
        if (*study) return cmd_study(common);
    } catch (const hc::Error& e) {
        std::cerr << "error: " << hc::to_string(e.code()) << ": " << one_line(e.what()) << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << one_line(e.what()) << '\n';
        return 2;
    }
    return 0;
}
