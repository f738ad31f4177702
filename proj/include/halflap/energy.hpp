#pragma once

// The variational energy J_lambda(u) = Phi(u) - lambda * Psi(u) with
//   Phi(u) = 1/2 sum a_j^2 sqrt(lambda_j)          (cylinder Dirichlet energy)
//   Psi(u) = int_Omega beta(x) F(u(x)) dx          (by tensor quadrature)
// together with its gradient in coefficient space and the preconditioned
// (dual) residual norm used as the solver stopping criterion.

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "field.hpp"
#include "nonlinearity.hpp"

namespace halflap {

// Weight beta sampled on the quadrature nodes.  Declared essential bounds are
// kept next to the observed node min/max; a >1% disagreement is recorded as a
// warning, an outright violation of essinf <= beta <= sup is an error.
class Weight {
public:
    Weight() = default;

    static Weight constant(double c, std::size_t n_nodes) {
        if (!(c > 0.0)) throw std::invalid_argument("Weight: constant weight must be positive");
        Weight w;
        w.values_.assign(n_nodes, c);
        w.essinf_ = w.sup_ = w.node_min_ = w.node_max_ = c;
        return w;
    }

    /// Constant weight for grid-free (thresholds-only) use.
    static Weight constant(double c) { return constant(c, 0); }

    template <typename Fn>
    static Weight from_function(Fn&& beta, const QuadratureGrid& grid, double declared_essinf = 0.0,
                                double declared_sup = 0.0) {
        Weight w;
        w.values_.resize(grid.size());
        for (std::size_t m = 0; m < grid.size(); ++m)
            w.values_[m] = beta(grid.node(m));
        w.finish(declared_essinf, declared_sup);
        return w;
    }

    static Weight from_values(std::vector<double> values, double declared_essinf = 0.0,
                              double declared_sup = 0.0) {
        Weight w;
        w.values_ = std::move(values);
        w.finish(declared_essinf, declared_sup);
        return w;
    }

    [[nodiscard]] double value(std::size_t m) const { return values_[m]; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] double essinf() const { return essinf_; }
    [[nodiscard]] double sup_norm() const { return sup_; }
    [[nodiscard]] double node_min() const { return node_min_; }
    [[nodiscard]] double node_max() const { return node_max_; }
    [[nodiscard]] const std::string& warning() const { return warning_; }

private:
    void finish(double declared_essinf, double declared_sup) {
        if (values_.empty()) throw std::invalid_argument("Weight: no node values");
        node_min_ = node_max_ = values_[0];
        for (double v : values_) {
            node_min_ = std::min(node_min_, v);
            node_max_ = std::max(node_max_, v);
        }
        if (!(node_min_ > 0.0))
            throw std::invalid_argument("Weight: beta must be positive on all quadrature nodes");
        if (declared_essinf > 0.0 || declared_sup > 0.0) {
            essinf_ = declared_essinf > 0.0 ? declared_essinf : node_min_;
            sup_ = declared_sup > 0.0 ? declared_sup : node_max_;
            if (node_min_ < essinf_ || node_max_ > sup_)
                throw std::invalid_argument("Weight: node values escape the declared bounds");
            const double slack_lo = (node_min_ - essinf_) / essinf_;
            const double slack_hi = (sup_ - node_max_) / sup_;
            if (slack_lo > 0.01 || slack_hi > 0.01)
                warning_ = "declared weight bounds differ from observed node range by more than 1%";
        } else {
            essinf_ = node_min_;
            sup_ = node_max_;
        }
    }

    std::vector<double> values_;
    double essinf_ = 1.0, sup_ = 1.0;
    double node_min_ = 1.0, node_max_ = 1.0;
    std::string warning_;
};

class EnergyModel {
public:
    EnergyModel(std::shared_ptr<const SpectralBasis> basis, QuadratureGrid grid, Weight weight,
                Nonlinearity nonlinearity, double lambda)
        : basis_(std::move(basis)),
          grid_(std::make_shared<const QuadratureGrid>(std::move(grid))),
          weight_(std::move(weight)),
          nonlinearity_(std::move(nonlinearity)),
          lambda_(lambda) {
        if (!(grid_->domain == basis_->domain))
            throw std::invalid_argument("EnergyModel: grid and basis domains differ");
        if (!weight_.values().empty() && weight_.values().size() != grid_->size())
            throw std::invalid_argument("EnergyModel: weight sampled on a different grid");
        if (!(lambda_ >= 0.0)) throw std::invalid_argument("EnergyModel: lambda must be >= 0");
        table_ = std::make_shared<const BasisTable>(*basis_, *grid_);
    }

    [[nodiscard]] const SpectralBasis& basis() const { return *basis_; }
    [[nodiscard]] std::shared_ptr<const SpectralBasis> basis_ptr() const { return basis_; }
    [[nodiscard]] const QuadratureGrid& grid() const { return *grid_; }
    [[nodiscard]] const Weight& weight() const { return weight_; }
    [[nodiscard]] const Nonlinearity& nonlinearity() const { return nonlinearity_; }
    [[nodiscard]] double lambda() const { return lambda_; }
    [[nodiscard]] const BasisTable& table() const { return *table_; }

    /// Same model at a different lambda (tables shared, cheap).
    [[nodiscard]] EnergyModel with_lambda(double lambda) const {
        EnergyModel out = *this;
        if (!(lambda >= 0.0)) throw std::invalid_argument("EnergyModel: lambda must be >= 0");
        out.lambda_ = lambda;
        return out;
    }

    [[nodiscard]] EnergyModel with_nonlinearity(Nonlinearity g) const {
        EnergyModel out = *this;
        out.nonlinearity_ = std::move(g);
        return out;
    }

    /// Pointwise values of u on the quadrature nodes via the cached table.
    [[nodiscard]] std::vector<double> sample(const Field& u) const {
        if (!compatible(*u.basis, *basis_))
            throw std::invalid_argument("EnergyModel::sample: field basis mismatch");
        std::vector<double> out(grid_->size(), 0.0);
        for (std::size_t j = 0; j < u.coeffs.size(); ++j) {
            const double a = u.coeffs[j];
            if (a == 0.0) continue;
            const double* row = table_->row(j);
            for (std::size_t m = 0; m < out.size(); ++m) out[m] += a * row[m];
        }
        return out;
    }

private:
    std::shared_ptr<const SpectralBasis> basis_;
    std::shared_ptr<const QuadratureGrid> grid_;
    Weight weight_;
    Nonlinearity nonlinearity_;
    double lambda_ = 0.0;
    std::shared_ptr<const BasisTable> table_;
};

/// Quadratic part Phi(u) = 1/2 |u|^2.
inline double phi(const EnergyModel& model, const Field& u) {
    const double n = h_half_norm(u);
    return 0.5 * n * n;
}

/// Potential Psi(u) = int beta F(u) by quadrature on the shared grid.
inline double psi(const EnergyModel& model, const Field& u) {
    const auto values = model.sample(u);
    const auto& grid = model.grid();
    const auto& g = model.nonlinearity();
    double s = 0.0;
    for (std::size_t m = 0; m < values.size(); ++m)
        s += grid.weights[m] * model.weight().value(m) * g.F(values[m]);
    return s;
}

inline double j_lambda(const EnergyModel& model, const Field& u) {
    return phi(model, u) - model.lambda() * psi(model, u);
}

/// Euclidean coefficient gradient of J: g_j = sqrt(lambda_j) a_j - lambda int beta f(u) phi_j.
inline Field grad_j(const EnergyModel& model, const Field& u) {
    const auto values = model.sample(u);
    const auto& grid = model.grid();
    const auto& g = model.nonlinearity();
    const auto& table = model.table();

    std::vector<double> wf(values.size());
    for (std::size_t m = 0; m < values.size(); ++m)
        wf[m] = grid.weights[m] * model.weight().value(m) * g.f(values[m]);

    Field out(u.basis);
    const double lambda = model.lambda();
    for (std::size_t j = 0; j < out.coeffs.size(); ++j) {
        const double* row = table.row(j);
        double integral = 0.0;
        for (std::size_t m = 0; m < wf.size(); ++m) integral += wf[m] * row[m];
        out.coeffs[j] = u.basis->sqrt_eigenvalues[j] * u.coeffs[j] - lambda * integral;
    }
    return out;
}

/// Dual norm (sum g_j^2 / sqrt(lambda_j))^{1/2} of a given coefficient gradient.
inline double dual_norm(const Field& g) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.coeffs.size(); ++j)
        s += g.coeffs[j] * g.coeffs[j] / g.basis->sqrt_eigenvalues[j];
    return std::sqrt(s);
}

/// Solver residual: dual norm of grad J at u.
inline double grad_norm_dual(const EnergyModel& model, const Field& u) {
    return dual_norm(grad_j(model, u));
}

} // namespace halflap
