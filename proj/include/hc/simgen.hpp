#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hc/dataset.hpp"

namespace hc {

enum class Dgp { Setting1, Setting2, Func2Func, Distributional };

std::string_view to_string(Dgp dgp) noexcept;
Dgp parse_dgp(std::string_view text);

inline constexpr std::size_t default_curve_grid = 50;
inline constexpr std::size_t default_quantile_grid = 100;
inline constexpr std::size_t func2func_basis_size = 10;

// Setting 1 (nonlinear heteroscedastic): X ~ U(0,5), e ~ U(-1,1), Y = 3 + exp(X) + e X.
double setting1_response(double x, double noise) noexcept;
// Setting 2 (linear homoscedastic): X ~ U(0,5), e ~ U(0,5), Y = X + e.
double setting2_response(double x, double noise) noexcept;

Dataset gen_setting1(std::size_t n, std::uint64_t seed);
Dataset gen_setting2(std::size_t n, std::uint64_t seed);

/// Shifted Legendre polynomials P_{k-1}(2s - 1) * sqrt(2k - 1), k = 1..count,
/// evaluated at `nodes`; orthonormal in L2([0, 1]).
std::vector<std::vector<double>> legendre_basis(std::span<const double> nodes, std::size_t count);

/// Function-on-function design on an m-point uniform grid over [0, 1]:
/// X = sum_k psi_k phi_k with psi_k ~ N(0, 11 - k), and
/// Y(t) = sin(pi t) + int_0^1 X(s) 5 s t ds + cos(2 pi t) e1 + sin(2 pi t) e2,
/// e1 ~ N(0, 0.5^2), e2 ~ N(0, 0.75^2).
Dataset gen_func2func(std::size_t n, std::size_t m, std::uint64_t seed);

/// Deterministic part of the functional response for a given predictor curve.
std::vector<double> func2func_mean(const HilbertPoint& x);
HilbertPoint func2func_response(const HilbertPoint& x, double e1, double e2);

/// X ~ U(0, 1); Y is the quantile function of N(2X, (0.5 + X)^2) on the
/// m-point midpoint grid.
Dataset gen_distributional(std::size_t n, std::size_t m, std::uint64_t seed);
HilbertPoint gaussian_quantile_function(double mean, double sd, std::size_t m);

/// Standard normal quantile.
double normal_quantile(double p);

/// Generates n pairs from `dgp`. `m` is the grid size for functional designs
/// (0 selects the default).
Dataset generate(Dgp dgp, std::size_t n, std::uint64_t seed, std::size_t m = 0);

/// `count` draws from Y | X = x. `m` is the quantile grid size for the
/// distributional design (0 selects the default).
std::vector<HilbertPoint> sample_conditional(Dgp dgp, const HilbertPoint& x, std::size_t count,
                                             std::uint64_t seed, std::size_t m = 0);

} // namespace hc
