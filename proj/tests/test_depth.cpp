#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hc/depth.hpp"
#include "hc/error.hpp"

using hc::HilbertPoint;
using hc::KernelSpec;

namespace {

KernelSpec gaussian(double sigma) { return KernelSpec{hc::KernelFamily::Gaussian, sigma, hc::Space::Euclidean}; }

std::vector<HilbertPoint> scalars(std::initializer_list<double> values) {
    std::vector<HilbertPoint> out;
    for (const double v : values) out.push_back(HilbertPoint::scalar(v));
    return out;
}

struct Problem {
    std::vector<HilbertPoint> x;
    std::vector<HilbertPoint> y;
};

Problem random_problem(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Problem p;
    for (std::size_t i = 0; i < n; ++i) {
        p.x.push_back(HilbertPoint::euclidean({z(rng), z(rng)}));
        p.y.push_back(HilbertPoint::scalar(z(rng)));
    }
    return p;
}

// Dense Gaussian elimination with partial pivoting on (K + n lambda I) w = k.
std::vector<double> oracle_weights(const Problem& p, const KernelSpec& kx, double lambda, const HilbertPoint& x) {
    const std::size_t n = p.x.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = std::exp(-kx.sigma * hc::squared_distance(p.x[i], p.x[j]));
        }
        a[i][i] += static_cast<double>(n) * lambda;
        a[i][n] = std::exp(-kx.sigma * hc::squared_distance(p.x[i], x));
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> w(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = a[i][n];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * w[k];
        w[i] = s / a[i][i];
    }
    return w;
}

} // namespace

TEST_SUITE("depth") {

TEST_CASE("unconditional depth examples") {
    const hc::EmpiricalKME single(scalars({1.0}), gaussian(1.0));
    CHECK(single.depth(HilbertPoint::scalar(1.0)) == 1.0);

    const hc::EmpiricalKME two(scalars({0.0, 100.0}), gaussian(1.0));
    CHECK(two.depth(HilbertPoint::scalar(0.0)) == doctest::Approx(0.5).epsilon(1e-12));

    const auto sample = scalars({-1.3, -0.4, 0.1, 0.2, 0.5, 0.9, 1.4, 2.0, 2.2, 3.1});
    const auto k = gaussian(0.8);
    const hc::EmpiricalKME kme(sample, k);
    const double median = 0.5 * (0.5 + 0.9);
    const double far = 3.1 + 10.0 / std::sqrt(0.8);
    auto oracle = [&](double y) {
        double s = 0.0;
        for (const auto& p : sample) s += std::exp(-0.8 * (p[0] - y) * (p[0] - y));
        return s / 10.0;
    };
    CHECK(kme.depth(HilbertPoint::scalar(median)) == doctest::Approx(oracle(median)).epsilon(1e-14));
    CHECK(kme.depth(HilbertPoint::scalar(median)) > kme.depth(HilbertPoint::scalar(far)));
    CHECK_THROWS_AS(kme.depth(HilbertPoint::euclidean({0.0, 0.0})), hc::Error);
}

TEST_CASE("unconditional depth is permutation invariant") {
    auto sample = random_problem(40, 21).x;
    const auto k = gaussian(0.6);
    const auto q = HilbertPoint::euclidean({0.2, -0.3});
    const double base = hc::EmpiricalKME(sample, k).depth(q);
    std::mt19937_64 rng(2);
    std::shuffle(sample.begin(), sample.end(), rng);
    CHECK(hc::EmpiricalKME(sample, k).depth(q) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("conditional embedding with one training pair") {
    const double lambda = 0.01;
    const hc::ConditionalKME cme(scalars({0.0}), scalars({2.0}), gaussian(1.0), gaussian(1.0), lambda);
    CHECK(cme.system_matrix()(0, 0) == doctest::Approx(1.0 + lambda));
    const auto x = HilbertPoint::scalar(0.5);
    const auto y = HilbertPoint::scalar(1.5);
    const double kx = std::exp(-0.25);
    const double ky = std::exp(-0.25);
    CHECK(cme.weights(x)[0] == doctest::Approx(kx / (1.0 + lambda)).epsilon(1e-14));
    CHECK(cme.depth(x, y) == doctest::Approx(kx * ky / (1.0 + lambda)).epsilon(1e-14));
}

TEST_CASE("identical predictors: J + 3 lambda I against its closed-form inverse") {
    const double lambda = 0.2;
    const auto xs = scalars({1.0, 1.0, 1.0});
    const auto ys = scalars({-1.0, 0.0, 2.0});
    const hc::ConditionalKME cme(xs, ys, gaussian(1.0), gaussian(0.5), lambda);
    const double c = 3.0 * lambda;
    const Eigen::MatrixXd system = cme.system_matrix();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(system(i, j) == doctest::Approx((i == j ? 1.0 + c : 1.0)));
        }
    }
    // (J + cI)^{-1} = (I - J / (c + 3)) / c.
    const auto x = HilbertPoint::scalar(1.7);
    const double kx = std::exp(-0.49);
    const double expected = (kx - 3.0 * kx / (c + 3.0)) / c;
    const Eigen::VectorXd w = cme.weights(x);
    for (int i = 0; i < 3; ++i) {
        CHECK(w[i] == doctest::Approx(expected).epsilon(1e-12));
    }
    // Conditional depth is then proportional to the unconditional depth.
    const hc::EmpiricalKME kme(ys, gaussian(0.5));
    for (const double y : {-2.0, 0.0, 0.7, 3.0}) {
        const auto yp = HilbertPoint::scalar(y);
        CHECK(std::abs(cme.depth(x, yp) - 3.0 * expected * kme.depth(yp)) <= 1e-8);
    }
}

TEST_CASE("weights match a dense elimination oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = random_problem(25, 100 + seed);
        const auto kx = gaussian(0.5);
        const auto ky = gaussian(1.3);
        const hc::ConditionalKME cme(p.x, p.y, kx, ky, 1e-3);
        const auto x = HilbertPoint::euclidean({0.1 * static_cast<double>(seed), -0.4});
        const auto y = HilbertPoint::scalar(0.3);
        const auto oracle = oracle_weights(p, kx, 1e-3, x);
        const Eigen::VectorXd w = cme.weights(x);
        double scale = 0.0;
        double depth = 0.0;
        for (std::size_t i = 0; i < oracle.size(); ++i) scale = std::max(scale, std::abs(oracle[i]));
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            CHECK(std::abs(w[static_cast<Eigen::Index>(i)] - oracle[i]) <= 1e-8 * scale);
            depth += oracle[i] * std::exp(-1.3 * hc::squared_distance(p.y[i], y));
        }
        CHECK(std::abs(cme.depth(x, y) - depth) <= 1e-8 * std::max(1.0, std::abs(depth)));
    }
}

TEST_CASE("batched weights equal single queries") {
    const auto p = random_problem(30, 7);
    const hc::ConditionalKME cme(p.x, p.y, gaussian(0.8), gaussian(0.8));
    const auto queries = random_problem(6, 8).x;
    const Eigen::MatrixXd batch = cme.weights(queries);
    const auto pairs = cme.depth_pairs(queries, random_problem(6, 9).y);
    for (std::size_t j = 0; j < queries.size(); ++j) {
        const Eigen::VectorXd w = cme.weights(queries[j]);
        CHECK((batch.col(static_cast<Eigen::Index>(j)) - w).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK(pairs[j] == doctest::Approx(cme.depth(queries[j], random_problem(6, 9).y[j])).epsilon(1e-12));
    }
}

TEST_CASE("refit with identical data gives bit-identical weights") {
    const auto p = random_problem(20, 31);
    const hc::ConditionalKME a(p.x, p.y, gaussian(0.5), gaussian(0.5));
    const hc::ConditionalKME b(p.x, p.y, gaussian(0.5), gaussian(0.5));
    const auto x = HilbertPoint::euclidean({0.3, 0.3});
    CHECK(a.weights(x) == b.weights(x));
}

TEST_CASE("large ridge shrinks the weights") {
    const auto p = random_problem(10, 41);
    const hc::ConditionalKME cme(p.x, p.y, gaussian(0.5), gaussian(0.5), 1e6);
    const auto x = HilbertPoint::euclidean({0.0, 0.0});
    const Eigen::VectorXd k = hc::cross_gram(gaussian(0.5), p.x, x);
    CHECK(cme.weights(x).cwiseAbs().maxCoeff() <= 1e-6 * k.maxCoeff());

    const hc::ConditionalKME huge(p.x, p.y, gaussian(0.5), gaussian(0.5), 1e8);
    for (const auto& y : p.y) {
        CHECK(std::abs(huge.depth(x, y)) <= 1e-6);
    }
}

TEST_CASE("conditional depth is small far from every response") {
    const auto p = random_problem(25, 51);
    const hc::ConditionalKME cme(p.x, p.y, gaussian(0.5), gaussian(1.0));
    const auto x = HilbertPoint::euclidean({0.0, 0.0});
    const auto far = HilbertPoint::scalar(1e3);
    const double bound = cme.weights(x).lpNorm<1>() * std::exp(-1.0 * 9e5);
    CHECK(std::abs(cme.depth(x, far)) <= bound + 1e-300);
}

TEST_CASE("conditional depth is linear in the response kernel vector") {
    const auto p = random_problem(20, 61);
    const hc::ConditionalKME cme(p.x, p.y, gaussian(0.5), gaussian(1.0));
    const auto x = HilbertPoint::euclidean({0.4, 0.1});
    const Eigen::VectorXd w = cme.weights(x);
    for (const double y : {-1.0, 0.0, 0.5}) {
        const auto yp = HilbertPoint::scalar(y);
        const Eigen::VectorXd ky = hc::cross_gram(gaussian(1.0), p.y, yp);
        CHECK(cme.depth(x, yp) == doctest::Approx(w.dot(ky)).epsilon(1e-12));
        CHECK(cme.depth_with_weights(w, yp) == doctest::Approx(w.dot(ky)).epsilon(1e-12));
    }
}

TEST_CASE("conditional embedding input validation") {
    const auto p = random_problem(5, 71);
    CHECK_THROWS_AS(hc::ConditionalKME(p.x, scalars({1.0}), gaussian(1.0), gaussian(1.0)), hc::Error);
    CHECK_THROWS_AS(hc::ConditionalKME(p.x, p.y, gaussian(1.0), gaussian(1.0), 0.0), hc::Error);
    const hc::ConditionalKME cme(p.x, p.y, gaussian(1.0), gaussian(1.0));
    CHECK_THROWS_AS(cme.weights(HilbertPoint::scalar(0.0)), hc::Error);
    CHECK_THROWS_AS(cme.depth(HilbertPoint::euclidean({0.0, 0.0}), HilbertPoint::euclidean({0.0, 0.0})),
                    hc::Error);
}

}
