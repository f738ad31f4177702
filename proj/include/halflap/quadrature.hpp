#pragma once

// Tensor-product Gauss-Legendre quadrature on intervals and rectangles.
// The same M is used per dimension; nodes are stored flattened (row-major,
// first coordinate outermost) and the per-axis 1-D rules are kept so that
// basis evaluation can exploit the tensor structure.

#include <cmath>
#include <cstddef>
#include <vector>

#include "domain.hpp"
#include "errors.hpp"

namespace halflap {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
            }
            dp = n * (x * p1 - p2) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

struct QuadratureGrid {
    Domain domain;
    int points_per_dim = 0;
    std::vector<std::vector<double>> axes;        // per-dimension node coordinates
    std::vector<std::vector<double>> axis_weights;
    std::vector<double> nodes;                    // size() * dim, row-major
    std::vector<double> weights;                  // size()

    [[nodiscard]] std::size_t size() const { return weights.size(); }
    [[nodiscard]] const double* node(std::size_t m) const {
        return nodes.data() + m * static_cast<std::size_t>(domain.dim);
    }
    [[nodiscard]] double weight_sum() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

/// Tensor Gauss-Legendre rule with M points per dimension.
inline QuadratureGrid build_quadrature(const Domain& domain, int points_per_dim) {
    if (domain.kind == DomainKind::ball)
        throw unsupported_domain("build_quadrature: ball domains carry no quadrature grid");
    if (points_per_dim < 2)
        throw std::invalid_argument("build_quadrature: need at least 2 points per dimension");

    QuadratureGrid grid;
    grid.domain = domain;
    grid.points_per_dim = points_per_dim;

    std::vector<double> ref_nodes, ref_weights;
    gauss_legendre(points_per_dim, ref_nodes, ref_weights);

    grid.axes.resize(static_cast<std::size_t>(domain.dim));
    grid.axis_weights.resize(static_cast<std::size_t>(domain.dim));
    for (int d = 0; d < domain.dim; ++d) {
        const double length = domain.lengths[static_cast<std::size_t>(d)];
        auto& ax = grid.axes[static_cast<std::size_t>(d)];
        auto& aw = grid.axis_weights[static_cast<std::size_t>(d)];
        ax.resize(static_cast<std::size_t>(points_per_dim));
        aw.resize(static_cast<std::size_t>(points_per_dim));
        for (int i = 0; i < points_per_dim; ++i) {
            ax[static_cast<std::size_t>(i)] = 0.5 * length * (ref_nodes[static_cast<std::size_t>(i)] + 1.0);
            aw[static_cast<std::size_t>(i)] = 0.5 * length * ref_weights[static_cast<std::size_t>(i)];
        }
    }

    if (domain.dim == 1) {
        grid.nodes = grid.axes[0];
        grid.weights = grid.axis_weights[0];
    } else {
        const std::size_t m = static_cast<std::size_t>(points_per_dim);
        grid.nodes.resize(m * m * 2);
        grid.weights.resize(m * m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t idx = i * m + j;
                grid.nodes[2 * idx] = grid.axes[0][i];
                grid.nodes[2 * idx + 1] = grid.axes[1][j];
                grid.weights[idx] = grid.axis_weights[0][i] * grid.axis_weights[1][j];
            }
    }
    return grid;
}

} // namespace halflap
