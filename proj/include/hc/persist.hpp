#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hc/conformal.hpp"

namespace hc {

inline constexpr int model_format_version = 1;

/// A fitted region model plus the thresholds computed at fit time.
/// The kernel-ridge factorization is not stored; it is rebuilt on load from
/// the training payload, which reproduces it exactly.
struct PersistedModel {
    RegionModel model;
    std::vector<double> alphas;
    std::vector<double> thresholds;
    std::string dgp;
    std::uint64_t seed = 0;
};

PersistedModel make_persisted(RegionModel model, std::vector<double> alphas, std::string dgp,
                              std::uint64_t seed);

void save_model(std::ostream& out, const PersistedModel& persisted);
void save_model(const std::filesystem::path& path, const PersistedModel& persisted);

/// Throws a format error on malformed input or a version other than
/// model_format_version.
PersistedModel load_model(std::istream& in);
PersistedModel load_model(const std::filesystem::path& path);

} // namespace hc
