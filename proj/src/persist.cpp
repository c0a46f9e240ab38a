#include "hc/persist.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "hc/csv_io.hpp"
#include "hc/error.hpp"

// Layout, one record per line, whitespace-separated tokens:
//
//   hc-model <version>
//   algorithm <homo|hetero>
//   dgp <name>
//   seed <u64>
//   lambda <real>
//   kernel_x <family> <sigma> <space>
//   kernel_y <family> <sigma> <space>
//   cdf_bandwidth <real>                     (hetero only)
//   alphas <k> a_1 .. a_k
//   thresholds <k> t_1 .. t_k
//   points <name> <space> <count> <dim>
//   grid n_1 .. n_dim                        (curve / quantile only)
//   v_1 .. v_dim                             (count lines)
//   <name> <count> v_1 .. v_count            (value lists)
//   end
//
// Point blocks: x_train, y_train, cal_x and, for hetero, bank_x.
// Value blocks: cal_depths, scores and, for hetero, bank_r.

namespace hc {

namespace {

constexpr std::string_view magic = "hc-model";

void write_values(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << (i > 0 ? " " : "") << format_real(values[i]);
    }
    out << '\n';
}

void write_block(std::ostream& out, std::string_view name, std::span<const HilbertPoint> points) {
    require(!points.empty(), ErrorCode::InvalidArgument, fmt::format("empty point block '{}'", name));
    const auto& first = points.front();
    out << fmt::format("points {} {} {} {}\n", name, to_string(first.space()), points.size(), first.size());
    if (first.space() != Space::Euclidean) {
        out << "grid ";
        write_values(out, first.grid()->nodes);
    }
    for (const auto& p : points) {
        write_values(out, p.values());
    }
}

void write_list(std::ostream& out, std::string_view name, std::span<const double> values) {
    out << name << ' ' << values.size();
    for (const double v : values) {
        out << ' ' << format_real(v);
    }
    out << '\n';
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Next nonempty line split into tokens.
    std::vector<std::string> line() {
        std::string text;
        while (std::getline(in_, text)) {
            ++line_no_;
            std::istringstream ss(text);
            std::vector<std::string> tokens;
            std::string t;
            while (ss >> t) {
                tokens.push_back(std::move(t));
            }
            if (!tokens.empty()) {
                return tokens;
            }
        }
        error("unexpected end of file");
    }

    std::vector<std::string> expect(std::string_view key, std::size_t min_tokens) {
        auto tokens = line();
        if (tokens.front() != key) {
            error(fmt::format("expected '{}', found '{}'", key, tokens.front()));
        }
        if (tokens.size() < min_tokens) {
            error(fmt::format("'{}' record is truncated", key));
        }
        return tokens;
    }

    double real(const std::string& token, std::string_view field) {
        double v = 0.0;
        const auto* end = token.data() + token.size();
        const auto [ptr, ec] = std::from_chars(token.data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            error(fmt::format("{}: invalid number '{}'", field, token));
        }
        return v;
    }

    std::uint64_t count(const std::string& token, std::string_view field) {
        std::uint64_t v = 0;
        const auto* end = token.data() + token.size();
        const auto [ptr, ec] = std::from_chars(token.data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            error(fmt::format("{}: invalid count '{}'", field, token));
        }
        return v;
    }

    std::vector<double> reals(const std::vector<std::string>& tokens, std::size_t from, std::size_t n,
                              std::string_view field) {
        if (tokens.size() != from + n) {
            error(fmt::format("{}: expected {} values, found {}", field, n, tokens.size() - from));
        }
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = real(tokens[from + i], field);
        }
        return out;
    }

    KernelSpec kernel(std::string_view key) {
        const auto t = expect(key, 4);
        KernelSpec spec;
        try {
            spec.family = parse_kernel_family(t[1]);
            spec.space = parse_space(t[3]);
        } catch (const Error& e) {
            error(fmt::format("{}: {}", key, e.what()));
        }
        spec.sigma = real(t[2], key);
        return spec;
    }

    std::vector<double> list(std::string_view key) {
        const auto t = expect(key, 2);
        return reals(t, 2, count(t[1], key), key);
    }

    std::vector<HilbertPoint> block(std::string_view name) {
        const auto t = expect("points", 5);
        if (t[1] != name) {
            error(fmt::format("expected point block '{}', found '{}'", name, t[1]));
        }
        Space space = Space::Euclidean;
        try {
            space = parse_space(t[2]);
        } catch (const Error& e) {
            error(fmt::format("{}: {}", name, e.what()));
        }
        const auto n = count(t[3], name);
        const auto dim = count(t[4], name);
        std::shared_ptr<const Grid> grid;
        if (space != Space::Euclidean) {
            const auto g = expect("grid", 1);
            auto nodes = reals(g, 1, dim, fmt::format("{} grid", name));
            grid = space == Space::Quantile ? make_quantile_grid(dim) : make_curve_grid(std::move(nodes));
        }
        std::vector<HilbertPoint> points;
        points.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            auto values = reals(line(), 0, dim, name);
            switch (space) {
            case Space::Euclidean: points.push_back(HilbertPoint::euclidean(std::move(values))); break;
            case Space::Curve: points.push_back(HilbertPoint::curve(grid, std::move(values))); break;
            case Space::Quantile: points.push_back(HilbertPoint::quantile(grid, std::move(values))); break;
            }
        }
        return points;
    }

    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorCode::Format, fmt::format("model line {}: {}", line_no_, msg));
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

} // namespace

PersistedModel make_persisted(RegionModel model, std::vector<double> alphas, std::string dgp,
                              std::uint64_t seed) {
    std::vector<double> thresholds;
    thresholds.reserve(alphas.size());
    for (const double a : alphas) {
        thresholds.push_back(model.threshold(a));
    }
    return PersistedModel{std::move(model), std::move(alphas), std::move(thresholds), std::move(dgp), seed};
}

void save_model(std::ostream& out, const PersistedModel& persisted) {
    const RegionModel& m = persisted.model;
    const ConditionalKME& cme = m.cme();
    const bool hetero = m.algorithm() == Algorithm::Heteroscedastic;

    out << magic << ' ' << model_format_version << '\n';
    out << "algorithm " << to_string(m.algorithm()) << '\n';
    out << "dgp " << (persisted.dgp.empty() ? "unknown" : persisted.dgp) << '\n';
    out << "seed " << persisted.seed << '\n';
    out << "lambda " << format_real(cme.lambda()) << '\n';
    for (const auto& [key, k] : {std::pair{"kernel_x", cme.kx()}, std::pair{"kernel_y", cme.ky()}}) {
        out << fmt::format("{} {} {} {}\n", key, to_string(k.family), format_real(k.sigma), to_string(k.space));
    }
    if (hetero) {
        out << "cdf_bandwidth " << format_real(m.cdf()->bandwidth()) << '\n';
    }
    write_list(out, "alphas", persisted.alphas);
    write_list(out, "thresholds", persisted.thresholds);
    write_block(out, "x_train", cme.x_train());
    write_block(out, "y_train", cme.y_train());
    write_block(out, "cal_x", m.calibration().x);
    write_list(out, "cal_depths", m.calibration().depths);
    write_list(out, "scores", m.scores());
    if (hetero) {
        write_block(out, "bank_x", m.cdf()->x_bank());
        write_list(out, "bank_r", m.cdf()->r_bank());
    }
    out << "end\n";
    if (!out) {
        fail(ErrorCode::Io, "model write failed");
    }
}

void save_model(const std::filesystem::path& path, const PersistedModel& persisted) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
    }
    save_model(out, persisted);
}

PersistedModel load_model(std::istream& in) {
    Reader r(in);
    const auto head = r.line();
    if (head.size() != 2 || head[0] != magic) {
        r.error("not a model file");
    }
    if (head[1] != std::to_string(model_format_version)) {
        fail(ErrorCode::Format, fmt::format("model format version {} is not supported (expected {})",
                                            head[1], model_format_version));
    }
    Algorithm algorithm = Algorithm::Homoscedastic;
    try {
        algorithm = parse_algorithm(r.expect("algorithm", 2)[1]);
    } catch (const Error& e) {
        r.error(e.what());
    }
    const bool hetero = algorithm == Algorithm::Heteroscedastic;
    std::string dgp = r.expect("dgp", 2)[1];
    const auto seed = r.count(r.expect("seed", 2)[1], "seed");
    const double lambda = r.real(r.expect("lambda", 2)[1], "lambda");
    const KernelSpec kx = r.kernel("kernel_x");
    const KernelSpec ky = r.kernel("kernel_y");
    double bandwidth = 0.0;
    if (hetero) {
        bandwidth = r.real(r.expect("cdf_bandwidth", 2)[1], "cdf_bandwidth");
    }
    auto alphas = r.list("alphas");
    auto thresholds = r.list("thresholds");
    if (alphas.size() != thresholds.size()) {
        r.error("alphas and thresholds differ in length");
    }
    auto x_train = r.block("x_train");
    auto y_train = r.block("y_train");
    CalibrationSet cal;
    cal.x = r.block("cal_x");
    cal.depths = r.list("cal_depths");
    auto scores = r.list("scores");
    std::optional<ConditionalCdf> cdf;
    if (hetero) {
        auto bank_x = r.block("bank_x");
        auto bank_r = r.list("bank_r");
        cdf.emplace(std::move(bank_x), std::move(bank_r), bandwidth);
    }
    r.expect("end", 1);

    auto cme = std::make_shared<const ConditionalKME>(std::move(x_train), std::move(y_train), kx, ky, lambda);
    RegionModel model(algorithm, std::move(cme), std::move(cdf), std::move(cal), std::move(scores));
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double t = model.threshold(alphas[i]);
        if (!(t == thresholds[i] || (std::isinf(t) && std::isinf(thresholds[i])))) {
            r.error(fmt::format("stored threshold for alpha {} does not match the scores", alphas[i]));
        }
    }
    return PersistedModel{std::move(model), std::move(alphas), std::move(thresholds), std::move(dgp), seed};
}

PersistedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::Io, fmt::format("cannot open model '{}'", path.string()));
    }
    return load_model(in);
}

} // namespace hc
