#pragma once

// Dirichlet eigenbasis of the Laplacian on intervals and rectangles.
//
//   interval (0,L):      lambda_m = (m pi / L)^2,  phi_m = sqrt(2/L) sin(m pi x / L)
//   rectangle (0,L1)x(0,L2):
//     lambda_{(m,p)} = pi^2 (m^2/L1^2 + p^2/L2^2),  phi = product of normalized sines
//
// Eigenpairs are L^2-normalized, sorted by eigenvalue, ties broken by the
// lexicographic order of the multi-index.  The fractional operator acts
// diagonally on this table, so the basis is the whole discretization.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "domain.hpp"
#include "quadrature.hpp"

namespace halflap {

struct SpectralBasis {
    Domain domain;
    int truncation = 0;                    // number of retained modes J
    std::vector<std::array<int, 2>> modes; // second index 0 for intervals
    std::vector<double> eigenvalues;       // ascending
    std::vector<double> sqrt_eigenvalues;

    [[nodiscard]] std::size_t size() const { return eigenvalues.size(); }

    [[nodiscard]] double normalization() const {
        double norm = 1.0;
        for (int d = 0; d < domain.dim; ++d)
            norm *= std::sqrt(2.0 / domain.lengths[static_cast<std::size_t>(d)]);
        return norm;
    }

    /// phi_j at a point (x has domain.dim coordinates).
    [[nodiscard]] double eval(std::size_t j, const double* x) const {
        const auto& mode = modes[j];
        double v = normalization();
        for (int d = 0; d < domain.dim; ++d) {
            const double L = domain.lengths[static_cast<std::size_t>(d)];
            v *= std::sin(mode[static_cast<std::size_t>(d)] * std::numbers::pi * x[d] / L);
        }
        return v;
    }

    /// grad phi_j at a point; writes domain.dim components.
    void eval_gradient(std::size_t j, const double* x, double* g) const {
        const auto& mode = modes[j];
        const double norm = normalization();
        std::array<double, 2> s{1.0, 1.0}, c{0.0, 0.0}, k{0.0, 0.0};
        for (int d = 0; d < domain.dim; ++d) {
            const double L = domain.lengths[static_cast<std::size_t>(d)];
            k[static_cast<std::size_t>(d)] = mode[static_cast<std::size_t>(d)] * std::numbers::pi / L;
            s[static_cast<std::size_t>(d)] = std::sin(k[static_cast<std::size_t>(d)] * x[d]);
            c[static_cast<std::size_t>(d)] = std::cos(k[static_cast<std::size_t>(d)] * x[d]);
        }
        if (domain.dim == 1) {
            g[0] = norm * k[0] * c[0];
        } else {
            g[0] = norm * k[0] * c[0] * s[1];
            g[1] = norm * s[0] * k[1] * c[1];
        }
    }

    /// Largest 1-D mode index appearing along dimension d.
    [[nodiscard]] int max_index(int d) const {
        int m = 0;
        for (const auto& mode : modes) m = std::max(m, mode[static_cast<std::size_t>(d)]);
        return m;
    }
};

inline bool compatible(const SpectralBasis& a, const SpectralBasis& b) {
    return a.domain == b.domain && a.truncation == b.truncation;
}

/// First J Dirichlet eigenpairs of the domain.
inline std::shared_ptr<const SpectralBasis> build_basis(const Domain& domain, int truncation) {
    if (!domain.has_spectral_basis())
        throw unsupported_domain("build_basis: ball domains carry no spectral basis");
    if (truncation < 1)
        throw std::invalid_argument("build_basis: truncation must be >= 1");

    auto basis = std::make_shared<SpectralBasis>();
    basis->domain = domain;
    basis->truncation = truncation;

    const double pi2 = std::numbers::pi * std::numbers::pi;
    struct Entry {
        double lambda;
        std::array<int, 2> mode;
    };
    std::vector<Entry> entries;

    if (domain.dim == 1) {
        const double L = domain.lengths[0];
        entries.reserve(static_cast<std::size_t>(truncation));
        for (int m = 1; m <= truncation; ++m)
            entries.push_back({pi2 * m * m / (L * L), {m, 0}});
    } else {
        // All J lowest pairs have both indices <= J; enumerate that block and sort.
        const double l1 = domain.lengths[0], l2 = domain.lengths[1];
        entries.reserve(static_cast<std::size_t>(truncation) * static_cast<std::size_t>(truncation));
        for (int m = 1; m <= truncation; ++m)
            for (int p = 1; p <= truncation; ++p)
                entries.push_back({pi2 * (m * m / (l1 * l1) + p * p / (l2 * l2)), {m, p}});
    }

    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return a.mode < b.mode;
    });

    basis->modes.reserve(static_cast<std::size_t>(truncation));
    basis->eigenvalues.reserve(static_cast<std::size_t>(truncation));
    for (int j = 0; j < truncation; ++j) {
        basis->modes.push_back(entries[static_cast<std::size_t>(j)].mode);
        basis->eigenvalues.push_back(entries[static_cast<std::size_t>(j)].lambda);
    }
    basis->sqrt_eigenvalues.resize(basis->eigenvalues.size());
    for (std::size_t j = 0; j < basis->eigenvalues.size(); ++j)
        basis->sqrt_eigenvalues[j] = std::sqrt(basis->eigenvalues[j]);
    return basis;
}

// Sampled mode values (and optionally gradients) on a tensor grid.  Built via
// per-axis sine/cosine tables, so construction is O(J*N) rather than J*N trig
// calls per component.
struct BasisTable {
    std::size_t n_modes = 0;
    std::size_t n_nodes = 0;
    std::vector<double> values;                  // n_modes x n_nodes
    std::array<std::vector<double>, 2> gradients; // per dim, n_modes x n_nodes (optional)
    bool has_gradients = false;

    BasisTable() = default;

    BasisTable(const SpectralBasis& basis, const QuadratureGrid& grid, bool with_gradients = false) {
        if (!(grid.domain == basis.domain))
            throw std::invalid_argument("BasisTable: grid and basis domains differ");
        const int dim = basis.domain.dim;
        n_modes = basis.size();
        n_nodes = grid.size();
        has_gradients = with_gradients;

        // sin/cos tables per dimension: index (k-1)*M + i for mode index k, axis node i.
        std::array<std::vector<double>, 2> sin_tab, cos_tab;
        std::array<int, 2> max_idx{0, 0};
        const std::size_t M = static_cast<std::size_t>(grid.points_per_dim);
        for (int d = 0; d < dim; ++d) {
            max_idx[static_cast<std::size_t>(d)] = basis.max_index(d);
            auto& st = sin_tab[static_cast<std::size_t>(d)];
            auto& ct = cos_tab[static_cast<std::size_t>(d)];
            st.resize(static_cast<std::size_t>(max_idx[static_cast<std::size_t>(d)]) * M);
            if (with_gradients) ct.resize(st.size());
            const double L = basis.domain.lengths[static_cast<std::size_t>(d)];
            for (int k = 1; k <= max_idx[static_cast<std::size_t>(d)]; ++k)
                for (std::size_t i = 0; i < M; ++i) {
                    const double arg = k * std::numbers::pi * grid.axes[static_cast<std::size_t>(d)][i] / L;
                    st[static_cast<std::size_t>(k - 1) * M + i] = std::sin(arg);
                    if (with_gradients) ct[static_cast<std::size_t>(k - 1) * M + i] = std::cos(arg);
                }
        }

        const double norm = basis.normalization();
        values.resize(n_modes * n_nodes);
        if (with_gradients)
            for (int d = 0; d < dim; ++d)
                gradients[static_cast<std::size_t>(d)].resize(n_modes * n_nodes);

        for (std::size_t j = 0; j < n_modes; ++j) {
            double* row = values.data() + j * n_nodes;
            if (dim == 1) {
                const int m = basis.modes[j][0];
                const double* s = sin_tab[0].data() + static_cast<std::size_t>(m - 1) * M;
                for (std::size_t i = 0; i < M; ++i) row[i] = norm * s[i];
                if (with_gradients) {
                    const double k1 = m * std::numbers::pi / basis.domain.lengths[0];
                    const double* c = cos_tab[0].data() + static_cast<std::size_t>(m - 1) * M;
                    double* g = gradients[0].data() + j * n_nodes;
                    for (std::size_t i = 0; i < M; ++i) g[i] = norm * k1 * c[i];
                }
            } else {
                const int m = basis.modes[j][0], p = basis.modes[j][1];
                const double* s1 = sin_tab[0].data() + static_cast<std::size_t>(m - 1) * M;
                const double* s2 = sin_tab[1].data() + static_cast<std::size_t>(p - 1) * M;
                for (std::size_t i1 = 0; i1 < M; ++i1) {
                    const double a = norm * s1[i1];
                    double* out = row + i1 * M;
                    for (std::size_t i2 = 0; i2 < M; ++i2) out[i2] = a * s2[i2];
                }
                if (with_gradients) {
                    const double k1 = m * std::numbers::pi / basis.domain.lengths[0];
                    const double k2 = p * std::numbers::pi / basis.domain.lengths[1];
                    const double* c1 = cos_tab[0].data() + static_cast<std::size_t>(m - 1) * M;
                    const double* c2 = cos_tab[1].data() + static_cast<std::size_t>(p - 1) * M;
                    double* g1 = gradients[0].data() + j * n_nodes;
                    double* g2 = gradients[1].data() + j * n_nodes;
                    for (std::size_t i1 = 0; i1 < M; ++i1) {
                        const double a1 = norm * k1 * c1[i1];
                        const double a2 = norm * s1[i1];
                        double* o1 = g1 + i1 * M;
                        double* o2 = g2 + i1 * M;
                        for (std::size_t i2 = 0; i2 < M; ++i2) {
                            o1[i2] = a1 * s2[i2];
                            o2[i2] = a2 * k2 * c2[i2];
                        }
                    }
                }
            }
        }
    }

    [[nodiscard]] const double* row(std::size_t j) const { return values.data() + j * n_nodes; }
    [[nodiscard]] const double* grad_row(int d, std::size_t j) const {
        return gradients[static_cast<std::size_t>(d)].data() + j * n_nodes;
    }
};

} // namespace halflap
