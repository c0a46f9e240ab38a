#include "hc/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hc/error.hpp"

namespace hc {

namespace fs = std::filesystem;

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

namespace {

std::string join(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            line += ',';
        }
        line += fields[i];
    }
    return line;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
    }
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
            field.pop_back();
        }
        const auto start = field.find_first_not_of(' ');
        out.push_back(start == std::string::npos ? std::string{} : field.substr(start));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

bool parse_double(const std::string& text, double& out) {
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end && !text.empty();
}

struct Table {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};

Table read_table(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::Io, fmt::format("cannot open '{}'", path.string()));
    }
    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        table.rows.push_back(split_fields(line));
        table.line_numbers.push_back(line_no);
    }
    require(!table.rows.empty(), ErrorCode::Format, fmt::format("{}: file is empty", path.string()));
    return table;
}

std::vector<double> numeric_row(const fs::path& path, const Table& table, std::size_t r,
                                const std::vector<std::string>& names) {
    const auto& row = table.rows[r];
    if (row.size() != names.size()) {
        fail(ErrorCode::Format, fmt::format("{}:{}: expected {} fields, found {}", path.string(),
                                            table.line_numbers[r], names.size(), row.size()));
    }
    std::vector<double> values(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) {
        if (!parse_double(row[c], values[c]) || !std::isfinite(values[c])) {
            fail(ErrorCode::Format, fmt::format("{}:{}: column '{}': invalid number '{}'", path.string(),
                                                table.line_numbers[r], names[c], row[c]));
        }
    }
    return values;
}

bool is_header(const std::vector<std::string>& row) {
    double ignored = 0.0;
    for (const auto& field : row) {
        if (!parse_double(field, ignored)) {
            return true;
        }
    }
    return false;
}

bool is_midpoint_grid(std::span<const double> nodes) {
    const double m = static_cast<double>(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (std::abs(nodes[j] - (static_cast<double>(j) + 0.5) / m) > 1e-12) {
            return false;
        }
    }
    return true;
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= count; ++i) {
        names.push_back(fmt::format("{}{}", prefix, i));
    }
    return names;
}

std::vector<std::string> format_values(std::span<const double> values) {
    std::vector<std::string> out;
    out.reserve(values.size());
    for (const double v : values) {
        out.push_back(format_real(v));
    }
    return out;
}

std::string optional_real(const std::optional<double>& value) {
    return value ? format_real(*value) : std::string{};
}

} // namespace

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    auto out = open_out(path);
    out << join(header) << '\n';
    for (const auto& row : rows) {
        out << join(row) << '\n';
    }
    if (!out) {
        fail(ErrorCode::Io, fmt::format("write to '{}' failed", path.string()));
    }
}

void write_points(const fs::path& path, std::span<const HilbertPoint> points, const std::string& prefix) {
    require(!points.empty(), ErrorCode::InvalidArgument, "no points to write");
    require_homogeneous(points);
    std::vector<std::string> header;
    if (points.front().space() == Space::Euclidean) {
        header = numbered(prefix, points.front().size());
    } else {
        header = format_values(points.front().grid()->nodes);
    }
    std::vector<std::vector<std::string>> rows;
    rows.reserve(points.size());
    for (const auto& p : points) {
        rows.push_back(format_values(p.values()));
    }
    write_csv(path, header, rows);
}

std::vector<HilbertPoint> read_points(const fs::path& path, std::optional<Space> space) {
    const Table table = read_table(path);
    const auto& first = table.rows.front();
    std::vector<HilbertPoint> points;

    if (is_header(first)) {
        require(!space || *space == Space::Euclidean, ErrorCode::Format,
                fmt::format("{}: header row found but {} data expected", path.string(),
                            to_string(space.value_or(Space::Euclidean))));
        for (std::size_t r = 1; r < table.rows.size(); ++r) {
            points.push_back(HilbertPoint::euclidean(numeric_row(path, table, r, first)));
        }
    } else {
        const auto grid_names = numbered("p", first.size());
        const auto nodes = numeric_row(path, table, 0, grid_names);
        const Space kind = space.value_or(is_midpoint_grid(nodes) ? Space::Quantile : Space::Curve);
        require(kind != Space::Euclidean, ErrorCode::Format,
                fmt::format("{}: euclidean data needs a header row", path.string()));
        std::shared_ptr<const Grid> grid;
        if (kind == Space::Quantile) {
            require(is_midpoint_grid(nodes), ErrorCode::Format,
                    fmt::format("{}:{}: quantile grid must be (j - 0.5)/m", path.string(),
                                table.line_numbers[0]));
            grid = make_quantile_grid(nodes.size());
        } else {
            try {
                grid = make_curve_grid(nodes);
            } catch (const Error& e) {
                fail(ErrorCode::Format, fmt::format("{}:{}: {}", path.string(), table.line_numbers[0], e.what()));
            }
        }
        for (std::size_t r = 1; r < table.rows.size(); ++r) {
            auto values = numeric_row(path, table, r, grid_names);
            if (kind == Space::Quantile) {
                for (std::size_t j = 1; j < values.size(); ++j) {
                    if (values[j] < values[j - 1]) {
                        fail(ErrorCode::Format,
                             fmt::format("{}:{}: column '{}': quantile row decreases", path.string(),
                                         table.line_numbers[r], grid_names[j]));
                    }
                }
                points.push_back(HilbertPoint::quantile(grid, std::move(values)));
            } else {
                points.push_back(HilbertPoint::curve(grid, std::move(values)));
            }
        }
    }
    require(!points.empty(), ErrorCode::Format, fmt::format("{}: no data rows", path.string()));
    return points;
}

std::vector<fs::path> write_dataset(const Dataset& data, const fs::path& dir, const std::string& stem) {
    data.validate();
    const bool flat = data.x.front().space() == Space::Euclidean && data.y.front().space() == Space::Euclidean;
    if (!flat) {
        const fs::path xp = dir / (stem + "_x.csv");
        const fs::path yp = dir / (stem + "_y.csv");
        write_points(xp, data.x, "x");
        write_points(yp, data.y, "y");
        return {xp, yp};
    }
    auto header = numbered("x", data.x.front().size());
    const auto y_names = numbered("y", data.y.front().size());
    header.insert(header.end(), y_names.begin(), y_names.end());
    std::vector<std::vector<std::string>> rows;
    rows.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto row = format_values(data.x[i].values());
        const auto ys = format_values(data.y[i].values());
        row.insert(row.end(), ys.begin(), ys.end());
        rows.push_back(std::move(row));
    }
    const fs::path path = dir / (stem + ".csv");
    write_csv(path, header, rows);
    return {path};
}

Dataset read_dataset(std::span<const fs::path> paths, std::optional<Space> x_space,
                     std::optional<Space> y_space) {
    Dataset data;
    data.dgp = "file";
    if (paths.size() == 2) {
        data.x = read_points(paths[0], x_space);
        data.y = read_points(paths[1], y_space);
        require(data.x.size() == data.y.size(), ErrorCode::Format,
                fmt::format("{} predictors but {} responses", data.x.size(), data.y.size()));
        data.validate();
        return data;
    }
    require(paths.size() == 1, ErrorCode::InvalidArgument, "expected one combined file or two files");
    const fs::path& path = paths[0];
    const Table table = read_table(path);
    const auto& header = table.rows.front();
    std::vector<std::size_t> xs;
    std::vector<std::size_t> ys;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto& name = header[c];
        if (name.starts_with('x')) {
            xs.push_back(c);
        } else if (name.starts_with('y')) {
            ys.push_back(c);
        } else {
            fail(ErrorCode::Format, fmt::format("{}:{}: column '{}': expected x<i> or y<j>", path.string(),
                                                table.line_numbers[0], name));
        }
    }
    require(!xs.empty() && !ys.empty(), ErrorCode::Format,
            fmt::format("{}: header needs x and y columns", path.string()));
    for (std::size_t r = 1; r < table.rows.size(); ++r) {
        const auto values = numeric_row(path, table, r, header);
        std::vector<double> x;
        std::vector<double> y;
        for (const std::size_t c : xs) x.push_back(values[c]);
        for (const std::size_t c : ys) y.push_back(values[c]);
        data.x.push_back(HilbertPoint::euclidean(std::move(x)));
        data.y.push_back(HilbertPoint::euclidean(std::move(y)));
    }
    require(!data.x.empty(), ErrorCode::Format, fmt::format("{}: no data rows", path.string()));
    data.validate();
    return data;
}

void write_report(const fs::path& path, const CoverageReport& report) {
    const std::vector<std::string> header{
        "dgp", "algorithm", "n", "replicates", "failed", "alpha", "nominal", "succeeded",
        "mean_coverage", "se_coverage", "median_abs_deviation", "mean_l2_error", "se_l2_error",
        "achieved_confidence", "cqr_l2_error", "hpd1_l2_error", "hpd2_l2_error"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : report.summaries) {
        rows.push_back({report.dgp, report.algorithm, std::to_string(report.n),
                        std::to_string(report.replicates), std::to_string(report.failed),
                        format_real(s.alpha), format_real(s.nominal), std::to_string(s.succeeded),
                        format_real(s.mean_coverage), format_real(s.se_coverage),
                        format_real(s.median_abs_deviation), optional_real(s.mean_l2_error),
                        optional_real(s.se_l2_error), optional_real(s.achieved_confidence), "", "", ""});
    }
    write_csv(path, header, rows);
}

void write_replicates(const fs::path& path, const CoverageReport& report) {
    const std::vector<std::string> header{"replicate", "seed", "alpha", "coverage", "l2_error", "ok", "error"};
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report.rows) {
        std::string error = r.error;
        for (auto& ch : error) {
            if (ch == ',' || ch == '\n') {
                ch = ';';
            }
        }
        rows.push_back({std::to_string(r.replicate), std::to_string(r.seed), format_real(r.alpha),
                        r.ok ? format_real(r.coverage) : std::string{}, optional_real(r.l2_error),
                        r.ok ? "1" : "0", error});
    }
    write_csv(path, header, rows);
}

void write_plot(const fs::path& path, const CoverageReport& report) {
    std::vector<std::string> header{"x"};
    for (std::size_t a = 0; a < report.plot_curves.size(); ++a) {
        header.push_back(fmt::format("p_{}", report.summaries[a].alpha));
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t g = 0; g < report.plot_grid.size(); ++g) {
        std::vector<std::string> row{format_real(report.plot_grid[g])};
        for (const auto& curve : report.plot_curves) {
            row.push_back(format_real(curve[g]));
        }
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

} // namespace hc
