#include "hc/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "hc/error.hpp"

namespace hc {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        fail(ErrorCode::Config, fmt::format("{}: expected a number, got '{}'", key, value));
    }
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    unsigned long long out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        fail(ErrorCode::Config, fmt::format("{}: expected a nonnegative integer, got '{}'", key, value));
    }
    return static_cast<std::size_t>(out);
}

std::optional<double> parse_auto_positive(const std::string& key, const std::string& value) {
    if (value == "auto") {
        return std::nullopt;
    }
    const double v = parse_real(key, value);
    require(v > 0.0, ErrorCode::Config, fmt::format("{}: must be positive or 'auto', got {}", key, v));
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_real(key, trim(item)));
    }
    require(!out.empty(), ErrorCode::Config, fmt::format("{}: expected a comma-separated list", key));
    return out;
}

template <typename F>
auto parse_enum(const std::string& key, F parse) -> decltype(parse()) {
    try {
        return parse();
    } catch (const Error& e) {
        fail(ErrorCode::Config, fmt::format("{}: {}", key, e.what()));
    }
}

} // namespace

void apply_setting(Settings& settings, const std::string& key, const std::string& value) {
    StudyConfig& c = settings.study;
    if (key == "dgp") {
        settings.files.from_files = value == "file";
        if (!settings.files.from_files) {
            c.dgp = parse_enum(key, [&] { return parse_dgp(value); });
        }
    } else if (key == "n") {
        c.n = parse_count(key, value);
    } else if (key == "B" || key == "replicates") {
        c.replicates = parse_count(key, value);
    } else if (key == "n_eval") {
        c.n_eval = parse_count(key, value);
    } else if (key == "grid") {
        c.grid = parse_count(key, value);
    } else if (key == "seed") {
        c.seed = parse_count(key, value);
    } else if (key == "workers") {
        c.workers = parse_count(key, value);
    } else if (key == "output") {
        c.output = value;
    } else if (key == "algorithm") {
        c.algorithm = parse_enum(key, [&] { return parse_study_algorithm(value); });
    } else if (key == "alphas") {
        c.alphas = parse_list(key, value);
    } else if (key == "levels") {
        c.alphas.clear();
        for (const double level : parse_list(key, value)) {
            require(level > 0.0 && level < 1.0, ErrorCode::Config,
                    fmt::format("levels: {} is outside (0, 1)", level));
            c.alphas.push_back(1.0 - level);
        }
    } else if (key == "sigma_x") {
        c.model.sigma_x = parse_auto_positive(key, value);
    } else if (key == "sigma_y") {
        c.model.sigma_y = parse_auto_positive(key, value);
    } else if (key == "h") {
        c.model.cdf_bandwidth = parse_auto_positive(key, value);
    } else if (key == "lambda") {
        c.model.lambda = parse_real(key, value);
        require(c.model.lambda > 0.0, ErrorCode::Config, "lambda: must be positive");
    } else if (key == "splits") {
        c.model.fractions = parse_list(key, value);
    } else if (key == "gamma") {
        c.gamma = parse_real(key, value);
    } else if (key == "B_boot") {
        c.bootstrap_replicates = parse_count(key, value);
    } else if (key == "direction") {
        c.direction = parse_enum(key, [&] { return parse_direction(value); });
    } else if (key == "refit") {
        c.refit = parse_enum(key, [&] { return parse_refit_mode(value); });
    } else if (key == "x0") {
        c.x0 = parse_real(key, value);
    } else if (key == "smoothing_bandwidth") {
        c.smoothing_bandwidth = parse_auto_positive(key, value);
    } else if (key == "eval_points") {
        c.eval_points = parse_count(key, value);
    } else if (key == "support_lo") {
        c.support_lo = parse_real(key, value);
    } else if (key == "support_hi") {
        c.support_hi = parse_real(key, value);
    } else if (key == "x_space") {
        settings.files.x_space = parse_enum(key, [&] { return parse_space(value); });
    } else if (key == "y_space") {
        settings.files.y_space = parse_enum(key, [&] { return parse_space(value); });
    } else {
        fail(ErrorCode::Config, fmt::format("{}: unknown field", key));
    }
    settings.raw[key] = value;
}

Settings parse_settings(std::istream& in) {
    // Drop '#' comment lines; the INI reader itself only knows ';'.
    std::stringstream filtered;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        filtered << (t.starts_with('#') ? std::string{} : line) << '\n';
    }

    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(filtered, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        fail(ErrorCode::Config, fmt::format("line {}: {}", e.line(), e.message()));
    }

    Settings settings;
    auto visit = [&](const std::string& key, const std::string& value) {
        if (settings.raw.contains(key)) {
            fail(ErrorCode::Config, fmt::format("{}: defined more than once", key));
        }
        apply_setting(settings, key, trim(value));
    };
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            visit(name, node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) {
            visit(key, leaf.data());
        }
    }
    settings.study.validate();
    return settings;
}

Settings load_settings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::Io, fmt::format("cannot open config '{}'", path.string()));
    }
    return parse_settings(in);
}

} // namespace hc
