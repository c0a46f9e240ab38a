#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "hc/eval.hpp"

namespace hc {

/// Flat `key = value` settings. Section headers (`[model]`, `[study]`, ...)
/// group keys for readability; every key name is unique across sections.
/// Lines starting with `#` or `;` are comments.
///
/// Keys:
///   dgp (a generator or `file`), n, B (or replicates), n_eval, grid, seed, workers, output
///   algorithm = tolerance | homo | hetero | bootstrap
///   alphas = a1,a2,...   (miscoverage for homo/hetero, content otherwise)
///   levels = c1,c2,...   (nominal coverage for homo/hetero; alphas = 1 - c)
///   sigma_x, sigma_y, h  (positive number or `auto`), lambda, splits
///   gamma, B_boot, direction, refit, x0
///   smoothing_bandwidth, eval_points, support_lo, support_hi
///   x_space, y_space     (euclidean | curve | quantile, for data files)
struct FileSettings {
    /// `dgp = file`: data comes from files given on the command line.
    bool from_files = false;
    std::optional<Space> x_space;
    std::optional<Space> y_space;
};

struct Settings {
    StudyConfig study;
    FileSettings files;
    /// Raw key/value pairs as read, for diagnostics.
    std::map<std::string, std::string> raw;
};

Settings parse_settings(std::istream& in);
Settings load_settings(const std::filesystem::path& path);

/// Applies one `key = value` pair; throws a config error naming the key.
void apply_setting(Settings& settings, const std::string& key, const std::string& value);

} // namespace hc
