#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hc/error.hpp"
#include "hc/random.hpp"
#include "hc/simgen.hpp"

using hc::HilbertPoint;

namespace {

struct Moments {
    double mean = 0.0;
    double se = 0.0;
    double var = 0.0;
    double var_se = 0.0;
};

Moments moments(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    Moments m;
    for (const double x : v) m.mean += x;
    m.mean /= n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (const double x : v) {
        const double d = (x - m.mean) * (x - m.mean);
        m2 += d;
        m4 += d * d;
    }
    m.var = m2 / (n - 1.0);
    m.se = std::sqrt(m.var / n);
    m.var_se = std::sqrt((m4 / n - m.var * m.var) / n);
    return m;
}

} // namespace

TEST_SUITE("simgen") {

TEST_CASE("setting 1 formula and envelope") {
    CHECK(hc::setting1_response(0.0, 0.0) == 4.0);
    const auto d = hc::gen_setting1(2000, 1);
    std::vector<double> resid;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double x = d.x[i][0];
        const double y = d.y[i][0];
        CHECK(x >= 0.0);
        CHECK(x <= 5.0);
        CHECK(y >= 3.0 + std::exp(x) - x - 1e-12);
        CHECK(y <= 3.0 + std::exp(x) + x + 1e-12);
    }
    const auto big = hc::gen_setting1(100000, 2);
    for (std::size_t i = 0; i < big.size(); ++i) resid.push_back(big.y[i][0] - 3.0 - std::exp(big.x[i][0]));
    const auto m = moments(resid);
    CHECK(std::abs(m.mean) <= 3.0 * m.se);
}

TEST_CASE("setting 2 formula") {
    const auto d = hc::gen_setting2(100000, 3);
    std::vector<double> e;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = d.y[i][0] - d.x[i][0];
        CHECK(r >= 0.0);
        CHECK(r <= 5.0);
        e.push_back(r);
    }
    const auto m = moments(e);
    CHECK(std::abs(m.mean - 2.5) <= 3.0 * m.se);
}

TEST_CASE("generators are deterministic in the seed") {
    for (const auto dgp : {hc::Dgp::Setting1, hc::Dgp::Setting2, hc::Dgp::Func2Func, hc::Dgp::Distributional}) {
        const auto a = hc::generate(dgp, 20, 42);
        const auto b = hc::generate(dgp, 20, 42);
        const auto c = hc::generate(dgp, 20, 43);
        bool same = true;
        bool differs = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            same = same && std::equal(a.y[i].values().begin(), a.y[i].values().end(), b.y[i].values().begin());
            differs = differs || !std::equal(a.y[i].values().begin(), a.y[i].values().end(), c.y[i].values().begin());
        }
        CHECK(same);
        CHECK(differs);
        CHECK(a.dgp == hc::to_string(dgp));
        CHECK(hc::parse_dgp(hc::to_string(dgp)) == dgp);
    }
    CHECK_THROWS_AS(hc::parse_dgp("setting3"), hc::Error);
}

TEST_CASE("streams for distinct seeds are uncorrelated") {
    const auto a = hc::gen_setting2(10000, hc::derive_seed(1, hc::streams::data, 0));
    const auto b = hc::gen_setting2(10000, hc::derive_seed(1, hc::streams::data, 1));
    std::vector<double> xa;
    std::vector<double> xb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        xa.push_back(a.x[i][0]);
        xb.push_back(b.x[i][0]);
    }
    const auto ma = moments(xa);
    const auto mb = moments(xb);
    double cov = 0.0;
    for (std::size_t i = 0; i < xa.size(); ++i) cov += (xa[i] - ma.mean) * (xb[i] - mb.mean);
    cov /= static_cast<double>(xa.size() - 1);
    CHECK(std::abs(cov / std::sqrt(ma.var * mb.var)) <= 0.05);
}

TEST_CASE("legendre basis is orthonormal") {
    // Gram with trapezoid quadrature at m = 2001. The leading trapezoid error
    // is h^2/12 * (f'(1) - f'(0)) for f = phi_i phi_j, which for i = j = 9 is
    // 1.425e-4. The computed Gram must match identity plus that error term.
    const auto grid = hc::make_uniform_grid(2001);
    const auto basis = hc::legendre_basis(grid->nodes, hc::func2func_basis_size);
    REQUIRE(basis.size() == 10);
    const double h = 1.0 / 2000.0;
    double worst_excess = 0.0;
    double worst_raw = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const double g = hc::inner(HilbertPoint::curve(grid, basis[i]), HilbertPoint::curve(grid, basis[j]));
            const double a = static_cast<double>(i);
            const double b = static_cast<double>(j);
            const double slope_gap = std::sqrt((2.0 * a + 1.0) * (2.0 * b + 1.0)) * (a * (a + 1.0) + b * (b + 1.0)) *
                                     ((i + j) % 2 == 0 ? 2.0 : 0.0);
            const double predicted = h * h / 12.0 * slope_gap;
            const double dev = g - (i == j ? 1.0 : 0.0);
            worst_excess = std::max(worst_excess, std::abs(dev - predicted));
            worst_raw = std::max(worst_raw, std::abs(dev));
        }
    }
    MESSAGE("max |G - I| with trapezoid weights: ", worst_raw);
    CHECK(worst_raw == doctest::Approx(h * h / 12.0 * 4.0 * 19.0 * 90.0).epsilon(1e-3));
    CHECK(worst_excess <= 1e-7);

    // Simpson weights on the same grid. Its leading error, h^4/180 times the gap
    // in third derivatives at the ends, is about 3e-8 for phi_9^2.
    std::vector<double> w(2001);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = (j == 0 || j == 2000) ? h / 3.0 : (j % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t k = 0; k < basis.size(); ++k) {
            double g = 0.0;
            for (std::size_t j = 0; j < w.size(); ++j) g += w[j] * basis[i][j] * basis[k][j];
            worst = std::max(worst, std::abs(g - (i == k ? 1.0 : 0.0)));
        }
    }
    CHECK(worst <= 1e-7);
}

TEST_CASE("func2func response") {
    const auto grid = hc::make_uniform_grid(101);
    const auto zero = HilbertPoint::curve(grid, std::vector<double>(101, 0.0));
    const auto y0 = hc::func2func_response(zero, 0.0, 0.0);
    for (std::size_t j = 0; j < 101; ++j) {
        CHECK(y0[j] == doctest::Approx(std::sin(std::numbers::pi * grid->nodes[j])).epsilon(1e-14));
    }
    const double c = 1.7;
    const auto constant = HilbertPoint::curve(grid, std::vector<double>(101, c));
    const auto mean = hc::func2func_mean(constant);
    for (std::size_t j = 0; j < 101; ++j) {
        const double t = grid->nodes[j];
        CHECK(mean[j] - std::sin(std::numbers::pi * t) == doctest::Approx(2.5 * c * t).epsilon(1e-12));
    }
}

TEST_CASE("func2func noise variance at t = 0") {
    const auto grid = hc::make_uniform_grid(11);
    const auto zero = HilbertPoint::curve(grid, std::vector<double>(11, 0.0));
    const auto draws = hc::sample_conditional(hc::Dgp::Func2Func, zero, 100000, 5, 11);
    std::vector<double> e0;
    for (const auto& y : draws) e0.push_back(y[0] - 0.0);
    const auto m = moments(e0);
    CHECK(std::abs(m.var - 0.25) <= 3.0 * m.var_se);
}

TEST_CASE("func2func dataset shape") {
    const auto d = hc::gen_func2func(30, 40, 6);
    CHECK(d.size() == 30);
    CHECK(d.x[0].space() == hc::Space::Curve);
    CHECK(d.x[0].size() == 40);
    CHECK(d.y[0].grid()->nodes.back() == 1.0);
    CHECK(hc::generate(hc::Dgp::Func2Func, 3, 1).x[0].size() == hc::default_curve_grid);
}

TEST_CASE("distributional design") {
    const auto q0 = hc::gaussian_quantile_function(0.0, 0.5, 101);
    CHECK(std::abs(q0[50]) <= 1e-12);
    for (std::size_t j = 1; j < q0.size(); ++j) CHECK(q0[j] > q0[j - 1]);

    const auto d = hc::gen_distributional(50, 100, 7);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double x = d.x[i][0];
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        const auto expected = hc::gaussian_quantile_function(2.0 * x, 0.5 + x, 100);
        CHECK(hc::distance(d.y[i], expected) <= 1e-12);
        for (std::size_t j = 1; j < 100; ++j) CHECK(d.y[i][j] > d.y[i][j - 1]);
    }
    CHECK(hc::generate(hc::Dgp::Distributional, 3, 1).y[0].size() == hc::default_quantile_grid);
}

TEST_CASE("W2 between conditional responses at x = 0 and x = 0.5") {
    // N(0, 0.5^2) vs N(1, 1^2): sqrt(1 + 0.25).
    const auto a = hc::gaussian_quantile_function(0.0, 0.5, 1000);
    const auto b = hc::gaussian_quantile_function(1.0, 1.0, 1000);
    CHECK(std::abs(hc::distance(a, b) - std::sqrt(1.25)) <= 2e-3);
    const auto ya = hc::sample_conditional(hc::Dgp::Distributional, HilbertPoint::scalar(0.0), 1, 1, 1000);
    const auto yb = hc::sample_conditional(hc::Dgp::Distributional, HilbertPoint::scalar(0.5), 1, 1, 1000);
    CHECK(std::abs(hc::distance(ya[0], yb[0]) - std::sqrt(1.25)) <= 2e-3);
}

TEST_CASE("normal quantile") {
    CHECK(hc::normal_quantile(0.5) == 0.0);
    CHECK(hc::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(hc::normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-10));
    CHECK_THROWS_AS(hc::normal_quantile(0.0), hc::Error);
    CHECK_THROWS_AS(hc::normal_quantile(1.0), hc::Error);
}

TEST_CASE("conditional sampling for scalar settings") {
    const auto ys = hc::sample_conditional(hc::Dgp::Setting1, HilbertPoint::scalar(2.0), 5000, 8);
    for (const auto& y : ys) {
        CHECK(y[0] >= 3.0 + std::exp(2.0) - 2.0);
        CHECK(y[0] <= 3.0 + std::exp(2.0) + 2.0);
    }
    CHECK_THROWS_AS(hc::sample_conditional(hc::Dgp::Setting1, HilbertPoint::euclidean({1, 2}), 5, 8), hc::Error);
}

}
