#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hc/dataset.hpp"
#include "hc/eval.hpp"

namespace hc {

/// 17 significant digits; parses back to the same double.
std::string format_real(double value);

/// Joins fields with commas and writes one line per row.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// A block of points written to one CSV.
///
/// Euclidean: header `<prefix>1,...,<prefix>d`, one row per point.
/// Curve / quantile: the first row is the grid, each later row one point.
void write_points(const std::filesystem::path& path, std::span<const HilbertPoint> points,
                  const std::string& prefix);

/// Reads a block written by write_points. A header row means Euclidean;
/// otherwise the first row is a grid and `space` picks curve or quantile
/// (auto-detected from the midpoint grid when unset). Quantile rows must be
/// nondecreasing.
std::vector<HilbertPoint> read_points(const std::filesystem::path& path,
                                      std::optional<Space> space = std::nullopt);

/// Euclidean on both sides: `<dir>/<stem>.csv` with header x1..xd,y1..ym.
/// Otherwise `<dir>/<stem>_x.csv` and `<dir>/<stem>_y.csv`.
/// Returns the written paths.
std::vector<std::filesystem::path> write_dataset(const Dataset& data,
                                                 const std::filesystem::path& dir,
                                                 const std::string& stem);

/// One path: combined Euclidean file. Two paths: predictors then responses.
Dataset read_dataset(std::span<const std::filesystem::path> paths,
                     std::optional<Space> x_space = std::nullopt,
                     std::optional<Space> y_space = std::nullopt);

/// Study outputs. The summary carries empty columns for externally computed
/// baseline errors.
void write_report(const std::filesystem::path& path, const CoverageReport& report);
void write_replicates(const std::filesystem::path& path, const CoverageReport& report);
void write_plot(const std::filesystem::path& path, const CoverageReport& report);

} // namespace hc
