#include <gtest/gtest.h>

#include <halflap/quadrature.hpp>

#include "oracle.hpp"

#include <cmath>
#include <numbers>

using halflap::build_quadrature;
using halflap::Domain;
using halflap::gauss_legendre;

TEST(quadrature, gauss_legendre_reference_rule) {
    std::vector<double> nodes, weights;
    gauss_legendre(7, nodes, weights);
    ASSERT_EQ(nodes.size(), 7u);
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        EXPECT_NEAR(nodes[i] + nodes[nodes.size() - 1 - i], 0.0, 1e-15);
        EXPECT_NEAR(weights[i], weights[weights.size() - 1 - i], 1e-15);
        total += weights[i];
    }
    EXPECT_NEAR(total, 2.0, 1e-14);
    // 2-point rule has the textbook nodes +-1/sqrt(3).
    gauss_legendre(2, nodes, weights);
    EXPECT_NEAR(nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(weights[0], 1.0, 1e-15);
}

TEST(quadrature, gauss_legendre_polynomial_exactness) {
    // n points integrate polynomials up to degree 2n-1 exactly on [-1, 1].
    const int n = 8;
    std::vector<double> nodes, weights;
    gauss_legendre(n, nodes, weights);
    for (int k = 0; k <= 2 * n - 1; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * std::pow(nodes[i], k);
        const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
        EXPECT_NEAR(acc, exact, 1e-13) << "degree " << k;
    }
    // Degree 2n must show visible error.
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * std::pow(nodes[i], 2 * n);
    EXPECT_GT(std::abs(acc - 2.0 / (2 * n + 1)), 1e-13);
}

TEST(quadrature, interval_grid_integrates_smooth_function) {
    const auto grid = build_quadrature(Domain::interval(std::numbers::pi), 32);
    ASSERT_EQ(grid.size(), 32u);
    EXPECT_NEAR(grid.weight_sum(), std::numbers::pi, 1e-14);
    double acc = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m)
        acc += grid.weights[m] * std::exp(-grid.node(m)[0]) * std::sin(grid.node(m)[0]);
    const double exact = oracle::simpson(
        [](double x) { return std::exp(-x) * std::sin(x); }, 0.0, std::numbers::pi, 40000);
    EXPECT_NEAR(acc, exact, 1e-12);
}

TEST(quadrature, rectangle_grid_is_row_major_tensor) {
    const auto grid = build_quadrature(Domain::rectangle(1.0, 2.0), 5);
    ASSERT_EQ(grid.axes.size(), 2u);
    ASSERT_EQ(grid.size(), 25u);
    // node(m) = (x_i, y_j) with m = i*M + j.
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            const double* node = grid.node(i * 5 + j);
            EXPECT_DOUBLE_EQ(node[0], grid.axes[0][i]);
            EXPECT_DOUBLE_EQ(node[1], grid.axes[1][j]);
            EXPECT_DOUBLE_EQ(grid.weights[i * 5 + j],
                             grid.axis_weights[0][i] * grid.axis_weights[1][j]);
        }
    EXPECT_NEAR(grid.weight_sum(), 2.0, 1e-13);
}

TEST(quadrature, rectangle_grid_matches_simpson) {
    const auto grid = build_quadrature(Domain::rectangle(1.5, 1.0), 24);
    auto f = [](double x, double y) { return std::cos(x * y) + x * x * y; };
    double acc = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m)
        acc += grid.weights[m] * f(grid.node(m)[0], grid.node(m)[1]);
    const double exact = oracle::simpson2(f, 0.0, 1.5, 0.0, 1.0, 400, 400);
    EXPECT_NEAR(acc, exact, 1e-10);
}

TEST(quadrature, rejects_bad_arguments) {
    EXPECT_THROW(build_quadrature(Domain::interval(1.0), 1), std::invalid_argument);
    EXPECT_THROW(build_quadrature(Domain::ball(2, 1.0), 8), halflap::unsupported_domain);
}
