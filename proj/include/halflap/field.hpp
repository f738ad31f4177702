#pragma once

// Truncated spectral fields and their harmonic extensions to the half
// cylinder Omega x (0, inf).
//
// A Field is a coefficient vector a against the Dirichlet eigenbasis; the
// fractional seminorm is (sum a_j^2 sqrt(lambda_j))^{1/2}.  The extension of
// u = sum a_j phi_j is w(x, y) = sum a_j phi_j(x) exp(-sqrt(lambda_j) y);
// every y-integral that appears is taken in closed form, the cylinder is
// never discretized.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "basis.hpp"

namespace halflap {

struct Field {
    std::shared_ptr<const SpectralBasis> basis;
    std::vector<double> coeffs;

    Field() = default;
    explicit Field(std::shared_ptr<const SpectralBasis> b)
        : basis(std::move(b)), coeffs(basis->size(), 0.0) {}
    Field(std::shared_ptr<const SpectralBasis> b, std::vector<double> a)
        : basis(std::move(b)), coeffs(std::move(a)) {
        if (coeffs.size() != basis->size())
            throw std::invalid_argument("Field: coefficient count does not match basis truncation");
    }
};

/// Harmonic extension to the half cylinder; coefficients coincide with the trace.
struct ExtensionField {
    std::shared_ptr<const SpectralBasis> basis;
    std::vector<double> coeffs;
};

inline void require_same_basis(const Field& a, const Field& b) {
    if (!a.basis || !b.basis || !compatible(*a.basis, *b.basis))
        throw std::invalid_argument("fields live on different bases");
}

/// a + s*b as a new field.
inline Field axpy(const Field& a, double s, const Field& b) {
    require_same_basis(a, b);
    Field out = a;
    for (std::size_t j = 0; j < out.coeffs.size(); ++j) out.coeffs[j] += s * b.coeffs[j];
    return out;
}

inline Field scale(double s, const Field& u) {
    Field out = u;
    for (double& c : out.coeffs) c *= s;
    return out;
}

/// Fractional Sobolev norm (sum a_j^2 sqrt(lambda_j))^{1/2}.
inline double h_half_norm(const Field& u) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.coeffs.size(); ++j)
        s += u.coeffs[j] * u.coeffs[j] * u.basis->sqrt_eigenvalues[j];
    return std::sqrt(s);
}

inline double h_half_distance(const Field& a, const Field& b) {
    require_same_basis(a, b);
    double s = 0.0;
    for (std::size_t j = 0; j < a.coeffs.size(); ++j) {
        const double d = a.coeffs[j] - b.coeffs[j];
        s += d * d * a.basis->sqrt_eigenvalues[j];
    }
    return std::sqrt(s);
}

inline double l2_norm(const Field& u) {
    double s = 0.0;
    for (double c : u.coeffs) s += c * c;
    return std::sqrt(s);
}

/// Square root of the Laplacian acting diagonally: a_j -> sqrt(lambda_j) a_j.
inline Field apply_half_laplacian(const Field& u) {
    Field out = u;
    for (std::size_t j = 0; j < out.coeffs.size(); ++j)
        out.coeffs[j] *= u.basis->sqrt_eigenvalues[j];
    return out;
}

inline ExtensionField extend(const Field& u) { return ExtensionField{u.basis, u.coeffs}; }

inline Field trace(const ExtensionField& w) { return Field{w.basis, w.coeffs}; }

/// Value of the extension at (x, y), y >= 0.
inline double extension_value(const ExtensionField& w, const double* x, double y) {
    double v = 0.0;
    for (std::size_t j = 0; j < w.coeffs.size(); ++j)
        v += w.coeffs[j] * w.basis->eval(j, x) * std::exp(-w.basis->sqrt_eigenvalues[j] * y);
    return v;
}

/// Cylinder energy norm in closed form; equals the trace's fractional norm.
inline double x_norm(const ExtensionField& w) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.coeffs.size(); ++j)
        s += w.coeffs[j] * w.coeffs[j] * w.basis->sqrt_eigenvalues[j];
    return std::sqrt(s);
}

// Independent route to the cylinder norm: the x-integrals (mass and stiffness
// pairings) are evaluated by quadrature, the y-integrals analytically via
// int_0^inf exp(-(s_i + s_j) y) dy = 1/(s_i + s_j).  Build once, apply often.
class CylinderNormQuadrature {
public:
    CylinderNormQuadrature(const SpectralBasis& basis, const QuadratureGrid& grid)
        : n_(basis.size()), pair_(n_ * n_, 0.0) {
        BasisTable table(basis, grid, /*with_gradients=*/true);
        const std::size_t N = grid.size();
        std::vector<double> stiff(n_ * n_, 0.0), mass(n_ * n_, 0.0);
        std::vector<double> wrow(N);
        for (std::size_t i = 0; i < n_; ++i) {
            const double* vi = table.row(i);
            for (std::size_t m = 0; m < N; ++m) wrow[m] = grid.weights[m] * vi[m];
            for (std::size_t j = i; j < n_; ++j) {
                const double* vj = table.row(j);
                double s = 0.0;
                for (std::size_t m = 0; m < N; ++m) s += wrow[m] * vj[m];
                mass[i * n_ + j] = mass[j * n_ + i] = s;
            }
        }
        for (int d = 0; d < basis.domain.dim; ++d) {
            for (std::size_t i = 0; i < n_; ++i) {
                const double* gi = table.grad_row(d, i);
                for (std::size_t m = 0; m < N; ++m) wrow[m] = grid.weights[m] * gi[m];
                for (std::size_t j = i; j < n_; ++j) {
                    const double* gj = table.grad_row(d, j);
                    double s = 0.0;
                    for (std::size_t m = 0; m < N; ++m) s += wrow[m] * gj[m];
                    stiff[i * n_ + j] += s;
                    if (j != i) stiff[j * n_ + i] += s;
                }
            }
        }
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                const double si = basis.sqrt_eigenvalues[i], sj = basis.sqrt_eigenvalues[j];
                pair_[i * n_ + j] = (stiff[i * n_ + j] + si * sj * mass[i * n_ + j]) / (si + sj);
            }
    }

    [[nodiscard]] double operator()(const ExtensionField& w) const {
        if (w.coeffs.size() != n_)
            throw std::invalid_argument("CylinderNormQuadrature: field size mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double row = 0.0;
            const double* p = pair_.data() + i * n_;
            for (std::size_t j = 0; j < n_; ++j) row += p[j] * w.coeffs[j];
            s += w.coeffs[i] * row;
        }
        return std::sqrt(std::max(s, 0.0));
    }

private:
    std::size_t n_;
    std::vector<double> pair_;
};

/// Pointwise values of u on the grid nodes.
inline std::vector<double> sample_on_grid(const Field& u, const QuadratureGrid& grid) {
    if (!(grid.domain == u.basis->domain))
        throw std::invalid_argument("sample_on_grid: grid and field domains differ");
    BasisTable table(*u.basis, grid);
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t j = 0; j < u.coeffs.size(); ++j) {
        const double a = u.coeffs[j];
        if (a == 0.0) continue;
        const double* row = table.row(j);
        for (std::size_t m = 0; m < out.size(); ++m) out[m] += a * row[m];
    }
    return out;
}

/// L^2 projection of sampled values onto the basis: a_j = sum_m w_m v_m phi_j(x_m).
inline Field project(std::span<const double> values, const QuadratureGrid& grid,
                     std::shared_ptr<const SpectralBasis> basis) {
    if (!(grid.domain == basis->domain))
        throw std::invalid_argument("project: grid and basis domains differ");
    if (values.size() != grid.size())
        throw std::invalid_argument("project: value count does not match grid");
    BasisTable table(*basis, grid);
    Field out(basis);
    std::vector<double> wv(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) wv[m] = grid.weights[m] * values[m];
    for (std::size_t j = 0; j < basis->size(); ++j) {
        const double* row = table.row(j);
        double s = 0.0;
        for (std::size_t m = 0; m < grid.size(); ++m) s += wv[m] * row[m];
        out.coeffs[j] = s;
    }
    return out;
}

namespace detail {

/// Deterministic uniform double in [0, 1) from the top 53 bits of the engine.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_pm1(std::mt19937_64& rng) { return 2.0 * uniform01(rng) - 1.0; }

} // namespace detail

/// Random test field: coefficients i.i.d. uniform in [-1,1], scaled by 1/j.
inline Field random_field(std::shared_ptr<const SpectralBasis> basis, std::mt19937_64& rng) {
    Field u(std::move(basis));
    for (std::size_t j = 0; j < u.coeffs.size(); ++j)
        u.coeffs[j] = detail::uniform_pm1(rng) / static_cast<double>(j + 1);
    return u;
}

/// Minimum cylinder Rayleigh quotient |w|_X^2 / |Tr w|_{L^2}^2 over a trial
/// set that always contains the first eigenmode, plus (trials-1) random
/// fields.  Equals sqrt(lambda_1) exactly because of the included mode.
inline double rayleigh_min(const SpectralBasis& basis, int trials,
                           std::uint64_t seed = 0x51ab5eedULL) {
    if (trials < 1) throw std::invalid_argument("rayleigh_min: trials must be >= 1");
    auto quotient = [&](const std::vector<double>& b) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            num += b[j] * b[j] * basis.sqrt_eigenvalues[j];
            den += b[j] * b[j];
        }
        return num / den;
    };
    std::vector<double> b(basis.size(), 0.0);
    b[0] = 1.0;
    double best = quotient(b);
    std::mt19937_64 rng(seed);
    for (int t = 1; t < trials; ++t) {
        for (std::size_t j = 0; j < b.size(); ++j)
            b[j] = detail::uniform_pm1(rng) / static_cast<double>(j + 1);
        best = std::min(best, quotient(b));
    }
    return best;
}

} // namespace halflap
