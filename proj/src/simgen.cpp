#include "hc/simgen.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "hc/error.hpp"
#include "hc/random.hpp"

namespace hc {

std::string_view to_string(Dgp dgp) noexcept {
    switch (dgp) {
    case Dgp::Setting1: return "setting1";
    case Dgp::Setting2: return "setting2";
    case Dgp::Func2Func: return "func2func";
    case Dgp::Distributional: return "distributional";
    }
    return "unknown";
}

Dgp parse_dgp(std::string_view text) {
    if (text == "setting1") return Dgp::Setting1;
    if (text == "setting2") return Dgp::Setting2;
    if (text == "func2func") return Dgp::Func2Func;
    if (text == "distributional") return Dgp::Distributional;
    fail(ErrorCode::InvalidArgument, fmt::format("unknown data-generating process '{}'", text));
}

double setting1_response(double x, double noise) noexcept {
    return 3.0 + std::exp(x) + noise * x;
}

double setting2_response(double x, double noise) noexcept {
    return x + noise;
}

namespace {

template <typename Response>
Dataset gen_scalar(std::size_t n, std::uint64_t seed, std::string_view name, double noise_lo,
                   double noise_hi, Response response) {
    require(n >= 1, ErrorCode::InvalidArgument, "generator needs n >= 1");
    Rng rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 5.0);
    std::uniform_real_distribution<double> ue(noise_lo, noise_hi);
    Dataset data;
    data.dgp = std::string(name);
    data.seed = seed;
    data.x.reserve(n);
    data.y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(rng);
        const double e = ue(rng);
        data.x.push_back(HilbertPoint::scalar(x));
        data.y.push_back(HilbertPoint::scalar(response(x, e)));
    }
    return data;
}

} // namespace

Dataset gen_setting1(std::size_t n, std::uint64_t seed) {
    return gen_scalar(n, seed, "setting1", -1.0, 1.0, setting1_response);
}

Dataset gen_setting2(std::size_t n, std::uint64_t seed) {
    return gen_scalar(n, seed, "setting2", 0.0, 5.0, setting2_response);
}

std::vector<std::vector<double>> legendre_basis(std::span<const double> nodes, std::size_t count) {
    std::vector<std::vector<double>> basis(count, std::vector<double>(nodes.size()));
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double u = 2.0 * nodes[j] - 1.0;
        // Bonnet recursion: (k + 1) P_{k+1} = (2k + 1) u P_k - k P_{k-1}.
        double prev = 1.0;
        double cur = u;
        for (std::size_t k = 0; k < count; ++k) {
            double p = 0.0;
            if (k == 0) {
                p = 1.0;
            } else if (k == 1) {
                p = u;
            } else {
                const double kk = static_cast<double>(k - 1);
                const double next = ((2.0 * kk + 1.0) * u * cur - kk * prev) / (kk + 1.0);
                prev = cur;
                cur = next;
                p = next;
            }
            basis[k][j] = p * std::sqrt(2.0 * static_cast<double>(k) + 1.0);
        }
    }
    return basis;
}

std::vector<double> func2func_mean(const HilbertPoint& x) {
    require(x.space() == Space::Curve, ErrorCode::InvalidArgument, "func2func predictor must be a curve");
    const auto& grid = *x.grid();
    // int_0^1 X(s) 5 s t ds = 5 t int_0^1 s X(s) ds, by the grid's trapezoid rule.
    double moment = 0.0;
    for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
        moment += grid.weights[j] * grid.nodes[j] * x[j];
    }
    std::vector<double> mean(grid.nodes.size());
    for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
        const double t = grid.nodes[j];
        mean[j] = std::sin(std::numbers::pi * t) + 5.0 * t * moment;
    }
    return mean;
}

HilbertPoint func2func_response(const HilbertPoint& x, double e1, double e2) {
    std::vector<double> y = func2func_mean(x);
    const auto& nodes = x.grid()->nodes;
    for (std::size_t j = 0; j < y.size(); ++j) {
        const double t = nodes[j];
        y[j] += std::cos(2.0 * std::numbers::pi * t) * e1 + std::sin(2.0 * std::numbers::pi * t) * e2;
    }
    return HilbertPoint::curve(x.grid(), std::move(y));
}

Dataset gen_func2func(std::size_t n, std::size_t m, std::uint64_t seed) {
    require(n >= 1, ErrorCode::InvalidArgument, "generator needs n >= 1");
    require(m >= 2, ErrorCode::InvalidArgument, "func2func needs a grid of at least two nodes");
    const auto grid = make_uniform_grid(m);
    const auto basis = legendre_basis(grid->nodes, func2func_basis_size);

    Rng rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Dataset data;
    data.dgp = "func2func";
    data.seed = seed;
    data.x.reserve(n);
    data.y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(m, 0.0);
        for (std::size_t k = 0; k < func2func_basis_size; ++k) {
            // sigma_k^2 = 10 - k + 1 for k = 1..10.
            const double sd = std::sqrt(static_cast<double>(func2func_basis_size - k));
            const double psi = sd * z(rng);
            for (std::size_t j = 0; j < m; ++j) {
                x[j] += psi * basis[k][j];
            }
        }
        const double e1 = 0.5 * z(rng);
        const double e2 = 0.75 * z(rng);
        auto xp = HilbertPoint::curve(grid, std::move(x));
        data.y.push_back(func2func_response(xp, e1, e2));
        data.x.push_back(std::move(xp));
    }
    return data;
}

double normal_quantile(double p) {
    require(p > 0.0 && p < 1.0, ErrorCode::InvalidArgument,
            fmt::format("normal quantile needs p in (0, 1), got {}", p));
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

HilbertPoint gaussian_quantile_function(double mean, double sd, std::size_t m) {
    require(sd > 0.0, ErrorCode::InvalidArgument, "gaussian quantile function needs sd > 0");
    const auto grid = make_quantile_grid(m);
    std::vector<double> values(m);
    for (std::size_t j = 0; j < m; ++j) {
        values[j] = mean + sd * normal_quantile(grid->nodes[j]);
    }
    return HilbertPoint::quantile(grid, std::move(values));
}

Dataset gen_distributional(std::size_t n, std::size_t m, std::uint64_t seed) {
    require(n >= 1, ErrorCode::InvalidArgument, "generator needs n >= 1");
    require(m >= 1, ErrorCode::InvalidArgument, "distributional design needs m >= 1");
    const auto grid = make_quantile_grid(m);
    std::vector<double> z(m);
    for (std::size_t j = 0; j < m; ++j) {
        z[j] = normal_quantile(grid->nodes[j]);
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    Dataset data;
    data.dgp = "distributional";
    data.seed = seed;
    data.x.reserve(n);
    data.y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(rng);
        const double mean = 2.0 * x;
        const double sd = 0.5 + x;
        std::vector<double> values(m);
        for (std::size_t j = 0; j < m; ++j) {
            values[j] = mean + sd * z[j];
        }
        data.x.push_back(HilbertPoint::scalar(x));
        data.y.push_back(HilbertPoint::quantile(grid, std::move(values)));
    }
    return data;
}

Dataset generate(Dgp dgp, std::size_t n, std::uint64_t seed, std::size_t m) {
    switch (dgp) {
    case Dgp::Setting1: return gen_setting1(n, seed);
    case Dgp::Setting2: return gen_setting2(n, seed);
    case Dgp::Func2Func: return gen_func2func(n, m == 0 ? default_curve_grid : m, seed);
    case Dgp::Distributional:
        return gen_distributional(n, m == 0 ? default_quantile_grid : m, seed);
    }
    fail(ErrorCode::InvalidArgument, "unknown data-generating process");
}

std::vector<HilbertPoint> sample_conditional(Dgp dgp, const HilbertPoint& x, std::size_t count,
                                             std::uint64_t seed, std::size_t m) {
    Rng rng(seed);
    std::vector<HilbertPoint> out;
    out.reserve(count);
    switch (dgp) {
    case Dgp::Setting1:
    case Dgp::Setting2: {
        require(x.space() == Space::Euclidean && x.size() == 1, ErrorCode::DimensionMismatch,
                "scalar designs condition on a scalar x");
        const bool first = dgp == Dgp::Setting1;
        std::uniform_real_distribution<double> ue(first ? -1.0 : 0.0, first ? 1.0 : 5.0);
        for (std::size_t i = 0; i < count; ++i) {
            const double e = ue(rng);
            out.push_back(HilbertPoint::scalar(first ? setting1_response(x[0], e)
                                                     : setting2_response(x[0], e)));
        }
        return out;
    }
    case Dgp::Func2Func: {
        std::normal_distribution<double> z(0.0, 1.0);
        for (std::size_t i = 0; i < count; ++i) {
            const double e1 = 0.5 * z(rng);
            const double e2 = 0.75 * z(rng);
            out.push_back(func2func_response(x, e1, e2));
        }
        return out;
    }
    case Dgp::Distributional: {
        require(x.space() == Space::Euclidean && x.size() == 1, ErrorCode::DimensionMismatch,
                "distributional design conditions on a scalar x");
        const HilbertPoint y = gaussian_quantile_function(
            2.0 * x[0], 0.5 + x[0], m == 0 ? default_quantile_grid : m);
        out.assign(count, y);
        return out;
    }
    }
    fail(ErrorCode::InvalidArgument, "unknown data-generating process");
}

} // namespace hc
