#pragma once

// Closed-form thresholds for the parameter lambda.
//
//  * lambda_nonexist = sqrt(lambda_1) / (c_f |beta|_sup): below it only the
//    trivial solution exists.
//  * lambda_zero: explicit upper bound for the two-solution threshold, built
//    from truncated-cone test functions (plateau t on B(x0, sigma tau), ramp
//    to zero across the annulus, cylinder lift exp(-y/2) omega).
//  * estimate_lambda_star: numerical upper estimate of the optimal threshold
//    inf Phi/Psi over a deterministic trial family.
//  * z_n / zeta / check_theorem_ball: the dimensionless ball criterion at
//    lambda = 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "energy.hpp"

namespace halflap {

/// sqrt(lambda_1) / (c_f * sup beta).
inline double lambda_nonexist(double lambda1, double cf, double beta_sup) {
    if (!(lambda1 > 0.0) || !(cf > 0.0) || !(beta_sup > 0.0))
        throw std::invalid_argument("lambda_nonexist: all inputs must be positive");
    return std::sqrt(lambda1) / (cf * beta_sup);
}

struct NonexistenceCheck {
    bool certified = false;
    double lambda = 0.0;
    double bound = 0.0;
    double product = 0.0; // lambda * c_f * sup(beta) / sqrt(lambda_1)
    double margin = 0.0;  // 1 - product
};

/// Strict non-existence certificate at the model's lambda; requires a cached
/// c_f estimate on the nonlinearity.
inline NonexistenceCheck check_nonexistence(const EnergyModel& model) {
    if (!model.nonlinearity().cf())
        throw std::invalid_argument("check_nonexistence: run estimate_cf first (no c_f cached)");
    NonexistenceCheck out;
    out.lambda = model.lambda();
    const double cf = model.nonlinearity().cf()->value;
    const double lambda1 = model.basis().eigenvalues[0];
    out.bound = lambda_nonexist(lambda1, cf, model.weight().sup_norm());
    out.product = model.lambda() / out.bound;
    out.margin = 1.0 - out.product;
    out.certified = out.product < 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Truncated cones

struct ConeParams {
    std::vector<double> x0; // center
    double tau = 0.0;       // outer radius
    double sigma = 0.0;     // plateau fraction in (0,1)
    double height = 0.0;    // plateau value t (may be negative)

    void validate(const Domain& domain) const {
        if (static_cast<int>(x0.size()) != domain.dim)
            throw std::invalid_argument("ConeParams: center dimension mismatch");
        if (!(tau > 0.0)) throw std::invalid_argument("ConeParams: tau must be positive");
        if (!(sigma > 0.0 && sigma < 1.0))
            throw std::invalid_argument("ConeParams: sigma must lie in (0,1)");
        if (!std::isfinite(height)) throw std::invalid_argument("ConeParams: height not finite");
        if (!domain.contains_ball(x0, tau))
            throw std::invalid_argument("ConeParams: ball B(x0,tau) escapes the domain");
    }
};

/// Pointwise cone values on the grid nodes.
inline std::vector<double> cone_field(const ConeParams& cone, const QuadratureGrid& grid) {
    cone.validate(grid.domain);
    const int dim = grid.domain.dim;
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double* x = grid.node(m);
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double dx = x[d] - cone.x0[static_cast<std::size_t>(d)];
            r2 += dx * dx;
        }
        const double r = std::sqrt(r2);
        if (r >= cone.tau) continue;
        if (r <= cone.sigma * cone.tau)
            out[m] = cone.height;
        else
            out[m] = cone.height * (cone.tau - r) / ((1.0 - cone.sigma) * cone.tau);
    }
    return out;
}

/// int |grad omega|^2 in closed form: t^2 omega_n tau^{n-2} (1-sigma^n)/(1-sigma)^2.
inline double cone_gradient_sq_analytic(const ConeParams& cone, int n) {
    return cone.height * cone.height * unit_ball_volume(n) * std::pow(cone.tau, n - 2) *
           (1.0 - std::pow(cone.sigma, n)) / ((1.0 - cone.sigma) * (1.0 - cone.sigma));
}

/// Same integral by quadrature over the annulus, at the grid's resolution.
/// |grad omega|^2 is constant there, so the sections along the first axis are
/// integrated exactly and Gauss-Legendre panels cover the offset, split at the
/// tangency radii where the section length loses smoothness.  Sampling the
/// indicator at the grid nodes instead stalls near 1% no matter the alignment,
/// which is too coarse to certify the closed form.
inline double cone_gradient_sq_integral(const ConeParams& cone, const QuadratureGrid& grid) {
    cone.validate(grid.domain);
    const double slope = cone.height / ((1.0 - cone.sigma) * cone.tau);
    const double outer = cone.tau;
    const double inner = cone.sigma * cone.tau;

    const int points = std::max(grid.points_per_dim / 2, 8);
    std::vector<double> ref_nodes, ref_weights;
    gauss_legendre(points, ref_nodes, ref_weights);
    const auto panel = [&](double a, double b, auto&& f) {
        double s = 0.0;
        for (std::size_t i = 0; i < ref_nodes.size(); ++i) {
            const double v = 0.5 * (a + b) + 0.5 * (b - a) * ref_nodes[i];
            s += 0.5 * (b - a) * ref_weights[i] * f(v);
        }
        return s;
    };

    if (grid.domain.dim == 1) {
        const auto one = [](double) { return 1.0; };
        return slope * slope * 2.0 * panel(inner, outer, one);
    }
    const auto section = [&](double v) {
        double len = 2.0 * std::sqrt(std::max(outer * outer - v * v, 0.0));
        if (v < inner) len -= 2.0 * std::sqrt(std::max(inner * inner - v * v, 0.0));
        return len;
    };
    return slope * slope * 2.0 * (panel(0.0, inner, section) + panel(inner, outer, section));
}

/// Upper bound for the cylinder norm of the lift exp(-y/2) omega:
/// (omega_n tau^{n-2} (1-sigma^n)/(1-sigma)^2 + |Omega|/4) t^2.
inline double cone_cylinder_norm_bound(const ConeParams& cone, const Domain& domain) {
    cone.validate(domain);
    return cone_gradient_sq_analytic(cone, domain.dim) +
           0.25 * domain.measure() * cone.height * cone.height;
}

namespace detail {

// Prefix table for max_{|s| <= t} |F(s)| over a log-spaced magnitude scan.
class MaxAbsPrimitive {
public:
    MaxAbsPrimitive(const Nonlinearity& g, double t_lo, double t_hi, int samples = 10000)
        : g_(&g), lo_(std::log(std::max(t_lo, 1e-12))), hi_(std::log(t_hi)), n_(samples) {
        mags_.resize(static_cast<std::size_t>(n_));
        prefix_.resize(static_cast<std::size_t>(n_));
        double running = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double m = std::exp(lo_ + (hi_ - lo_) * i / (n_ - 1));
            mags_[static_cast<std::size_t>(i)] = m;
            running = std::max({running, std::abs(g.F(m)), std::abs(g.F(-m))});
            prefix_[static_cast<std::size_t>(i)] = running;
        }
    }

    [[nodiscard]] double operator()(double t) const {
        const double mag = std::abs(t);
        const double at_t = std::max(std::abs(g_->F(mag)), std::abs(g_->F(-mag)));
        const auto it = std::upper_bound(mags_.begin(), mags_.end(), mag);
        if (it == mags_.begin()) return at_t;
        const std::size_t i = static_cast<std::size_t>(it - mags_.begin()) - 1;
        return std::max(prefix_[i], at_t);
    }

private:
    const Nonlinearity* g_;
    double lo_, hi_;
    int n_;
    std::vector<double> mags_, prefix_;
};

} // namespace detail

/// Plateau height and fraction making int beta F(omega) provably positive:
/// margin(t, sigma) = F(t) sigma^n essinf(beta) - (1-sigma^n) max|F| sup(beta) > 0.
struct PsiWitness {
    double t = 0.0;
    double sigma = 0.0;
    double margin = 0.0;
};

struct WitnessSearchRanges {
    int t_count = 200;
    double t_lo_factor = 1e-2;
    double t_hi_factor = 1e2;
    int sigma_count = 100;
    double sigma_lo = 0.05;
    double sigma_hi = 0.995;
    std::vector<double> tau_factors = {0.25, 0.5, 0.75, 1.0}; // of the inradius
};

inline PsiWitness find_psi_witness(const Nonlinearity& g, const Weight& weight,
                                   const Domain& domain,
                                   const WitnessSearchRanges& ranges = {}) {
    const auto witness = find_sign_witness(g);
    if (!witness)
        throw no_witness_error("find_psi_witness: no sign witness (F never positive on scan)");
    const double scale = std::abs(*witness);
    const double sign = *witness >= 0.0 ? 1.0 : -1.0;
    const int n = domain.dim;

    detail::MaxAbsPrimitive max_abs_F(g, scale * ranges.t_lo_factor * 1e-2,
                                      scale * ranges.t_hi_factor);

    PsiWitness best;
    bool found = false;
    const double llo = std::log(scale * ranges.t_lo_factor), lhi = std::log(scale * ranges.t_hi_factor);
    for (int i = 0; i < ranges.t_count; ++i) {
        const double t = sign * std::exp(llo + (lhi - llo) * i / (ranges.t_count - 1));
        const double Ft = g.F(t);
        if (!(Ft > 0.0)) continue;
        const double mF = max_abs_F(t);
        for (int k = 0; k < ranges.sigma_count; ++k) {
            const double sigma =
                ranges.sigma_lo + (ranges.sigma_hi - ranges.sigma_lo) * k / (ranges.sigma_count - 1);
            const double sn = std::pow(sigma, n);
            const double margin = Ft * sn * weight.essinf() - (1.0 - sn) * mF * weight.sup_norm();
            if (margin > 0.0 && (!found || margin > best.margin)) {
                found = true;
                best = PsiWitness{t, sigma, margin};
            }
        }
    }
    if (!found)
        throw no_witness_error("find_psi_witness: no feasible (t, sigma) on the search grid");
    return best;
}

// ---------------------------------------------------------------------------
// lambda_0: certified upper bound for the two-solution threshold

struct LambdaZeroResult {
    double lambda0 = 0.0;
    ConeParams cone;           // minimizing witness (t0, sigma0, tau, x0)
    double denominator_margin = 0.0;
    double psi_lower_bound = 0.0; // margin * omega_n tau^n
};

inline LambdaZeroResult lambda_zero(const Nonlinearity& g, const Weight& weight,
                                    const Domain& domain,
                                    const WitnessSearchRanges& ranges = {}) {
    const auto witness = find_sign_witness(g);
    if (!witness)
        throw no_witness_error("lambda_zero: no sign witness (F never positive on scan)");
    const double scale = std::abs(*witness);
    const double sign = *witness >= 0.0 ? 1.0 : -1.0;
    const int n = domain.dim;
    const double omega_n = unit_ball_volume(n);
    const double area = domain.measure();
    const auto x0 = domain.center();

    detail::MaxAbsPrimitive max_abs_F(g, scale * ranges.t_lo_factor * 1e-2,
                                      scale * ranges.t_hi_factor);

    LambdaZeroResult best;
    bool found = false;
    const double llo = std::log(scale * ranges.t_lo_factor), lhi = std::log(scale * ranges.t_hi_factor);
    for (int i = 0; i < ranges.t_count; ++i) {
        const double t = sign * std::exp(llo + (lhi - llo) * i / (ranges.t_count - 1));
        const double Ft = g.F(t);
        if (!(Ft > 0.0)) continue;
        const double mF = max_abs_F(t);
        for (int k = 0; k < ranges.sigma_count; ++k) {
            const double sigma =
                ranges.sigma_lo + (ranges.sigma_hi - ranges.sigma_lo) * k / (ranges.sigma_count - 1);
            const double sn = std::pow(sigma, n);
            const double margin = Ft * sn * weight.essinf() - (1.0 - sn) * mF * weight.sup_norm();
            if (!(margin > 0.0)) continue;
            for (double tf : ranges.tau_factors) {
                const double tau = tf * domain.inradius();
                const double numerator =
                    t * t *
                    (omega_n * std::pow(tau, n - 2) * (1.0 - sn) / ((1.0 - sigma) * (1.0 - sigma)) +
                     0.25 * area);
                const double denominator = 2.0 * omega_n * std::pow(tau, n) * margin;
                const double lambda0 = numerator / denominator;
                if (!found || lambda0 < best.lambda0) {
                    found = true;
                    best.lambda0 = lambda0;
                    best.cone = ConeParams{x0, tau, sigma, t};
                    best.denominator_margin = margin;
                    best.psi_lower_bound = margin * omega_n * std::pow(tau, n);
                }
            }
        }
    }
    if (!found)
        throw no_witness_error("lambda_zero: denominator never positive on the search grid");
    return best;
}

// ---------------------------------------------------------------------------
// Numerical upper estimate of the optimal threshold inf Phi/Psi

struct LambdaStarEstimate {
    double upper = 0.0;       // min Phi/Psi over the trial family
    double lower = 0.0;       // sqrt(lambda_1) / (c_f sup beta)
    std::string witness_kind; // which trial achieved the minimum
    int trials_used = 0;
};

/// Minimum of Phi/Psi over a deterministic trial family: projected cones on a
/// (t, sigma, tau) grid first, then scaled random fields.  The family is
/// enumerated in a fixed order and truncated at `budget`, so enlarging the
/// budget can only lower the estimate.
inline LambdaStarEstimate estimate_lambda_star(const EnergyModel& model, int budget = 4000) {
    const auto& g = model.nonlinearity();
    const auto witness = find_sign_witness(g);
    if (!witness)
        throw no_witness_error("estimate_lambda_star: no sign witness");
    const double cf =
        g.cf() ? g.cf()->value : estimate_cf(g).value;

    LambdaStarEstimate out;
    out.lower = lambda_nonexist(model.basis().eigenvalues[0], cf, model.weight().sup_norm());

    const auto& grid = model.grid();
    const auto& table = model.table();
    const auto& basis = model.basis();
    const Domain& domain = basis.domain;
    const auto x0 = domain.center();
    const double scale = std::abs(*witness);
    const double sign = *witness >= 0.0 ? 1.0 : -1.0;

    double best = std::numeric_limits<double>::infinity();
    int used = 0;

    auto consider = [&](const Field& u, const std::vector<double>& values, const std::string& kind) {
        double psi_val = 0.0;
        for (std::size_t m = 0; m < values.size(); ++m)
            psi_val += grid.weights[m] * model.weight().value(m) * g.F(values[m]);
        if (!(psi_val > 0.0)) return;
        double phi_val = 0.0;
        for (std::size_t j = 0; j < u.coeffs.size(); ++j)
            phi_val += u.coeffs[j] * u.coeffs[j] * basis.sqrt_eigenvalues[j];
        phi_val *= 0.5;
        const double ratio = phi_val / psi_val;
        if (ratio < best) {
            best = ratio;
            out.witness_kind = kind;
        }
    };

    auto project_values = [&](const std::vector<double>& values) {
        Field u(model.basis_ptr());
        std::vector<double> wv(grid.size());
        for (std::size_t m = 0; m < grid.size(); ++m) wv[m] = grid.weights[m] * values[m];
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const double* row = table.row(j);
            double s = 0.0;
            for (std::size_t m = 0; m < grid.size(); ++m) s += wv[m] * row[m];
            u.coeffs[j] = s;
        }
        return u;
    };

    // Stage 0: the certified-bound witness cone, so the estimate cannot land
    // above the closed-form upper bound.
    try {
        const auto certified = lambda_zero(g, model.weight(), domain);
        if (used < budget) {
            const auto cone_values = cone_field(certified.cone, grid);
            const Field u = project_values(cone_values);
            consider(u, model.sample(u), "certified-cone");
            ++used;
        }
    } catch (const no_witness_error&) {
        // grid infeasible; the stages below still run
    }

    // Stage 1: projected cones.
    const int t_count = 32, sigma_count = 12;
    const std::vector<double> tau_factors = {0.5, 0.75, 1.0};
    for (int i = 0; i < t_count && used < budget; ++i) {
        const double t = sign * scale * std::pow(10.0, -1.0 + 2.0 * i / (t_count - 1));
        for (int k = 0; k < sigma_count && used < budget; ++k) {
            const double sigma = 0.3 + (0.99 - 0.3) * k / (sigma_count - 1);
            for (double tf : tau_factors) {
                if (used >= budget) break;
                ConeParams cone{x0, tf * domain.inradius(), sigma, t};
                const auto cone_values = cone_field(cone, grid);
                const Field u = project_values(cone_values);
                const auto values = model.sample(u);
                consider(u, values, "cone(t=" + std::to_string(t) + ",sigma=" + std::to_string(sigma) +
                                        ",tau=" + std::to_string(cone.tau) + ")");
                ++used;
            }
        }
    }

    // Stage 2: scaled random fields (fixed seed; scales relative to the peak
    // sampled value so the plateau lands where F > 0).
    std::mt19937_64 rng(0xa11ce5eedULL);
    const int scales = 12;
    int direction = 0;
    while (used < budget) {
        Field u = random_field(model.basis_ptr(), rng);
        const auto values = model.sample(u);
        double peak = 0.0;
        for (double v : values) peak = std::max(peak, std::abs(v));
        if (peak == 0.0) break;
        ++direction;
        for (int si = 0; si < scales && used < budget; ++si) {
            const double s = sign * scale / peak * std::pow(10.0, -1.0 + 3.0 * si / (scales - 1));
            Field su = halflap::scale(s, u);
            std::vector<double> sv(values.size());
            for (std::size_t m = 0; m < values.size(); ++m) sv[m] = s * values[m];
            consider(su, sv, "random(direction=" + std::to_string(direction) + ")");
            ++used;
        }
    }

    if (!std::isfinite(best))
        throw no_witness_error("estimate_lambda_star: no trial produced Psi > 0");
    out.upper = best;
    out.trials_used = used;
    return out;
}

// ---------------------------------------------------------------------------
// Dimensionless ball criterion

/// z_n(sigma) = (1 - sigma^n) / ((2 sigma^n - 1)(1 - sigma)^2) on (2^{-1/n}, 1).
inline double z_n(int n, double sigma) {
    if (n < 2) throw std::invalid_argument("z_n: dimension must be >= 2");
    const double lo = std::pow(2.0, -1.0 / n);
    if (!(sigma > lo && sigma < 1.0))
        throw std::domain_error("z_n: sigma outside (2^{-1/n}, 1)");
    const double sn = std::pow(sigma, n);
    return (1.0 - sn) / ((2.0 * sn - 1.0) * (1.0 - sigma) * (1.0 - sigma));
}

struct ZetaInfo {
    double value = 0.0;     // 8 r^2 / (r^2 + 4 min z_n)
    double min_z = 0.0;
    double sigma_star = 0.0;
};

/// zeta(n, r) together with the minimizing sigma of z_n.
inline ZetaInfo zeta_info(int n, double r) {
    if (n < 2) throw std::invalid_argument("zeta: dimension must be >= 2");
    if (!(r > 0.0)) throw std::invalid_argument("zeta: radius must be positive");
    const double lo = std::pow(2.0, -1.0 / n);
    const double a = lo + 1e-9 * (1.0 - lo), b = 1.0 - 1e-9;
    // z_n blows up at both ends; coarse scan, then golden refinement.
    const int scan = 1000;
    double best_sigma = 0.5 * (a + b), best_z = z_n(n, best_sigma);
    for (int i = 0; i <= scan; ++i) {
        const double sigma = a + (b - a) * i / scan;
        const double z = z_n(n, sigma);
        if (z < best_z) {
            best_z = z;
            best_sigma = sigma;
        }
    }
    const double step = (b - a) / scan;
    auto neg_z = [&](double sigma) { return -z_n(n, sigma); };
    auto [sigma_ref, neg_ref] = detail::golden_max(
        neg_z, std::max(a, best_sigma - step), std::min(b, best_sigma + step));
    if (-neg_ref < best_z) {
        best_z = -neg_ref;
        best_sigma = sigma_ref;
    }
    ZetaInfo out;
    out.min_z = best_z;
    out.sigma_star = best_sigma;
    out.value = 8.0 * r * r / (r * r + 4.0 * best_z);
    return out;
}

inline double zeta(int n, double r) { return zeta_info(n, r).value; }

struct BallTheoremCheck {
    bool verifiable = false;     // false when S = {t > 0 : F(t) > 0} is empty
    bool condition_holds = false;
    double min_ratio = 0.0;      // min over S of t^2 / F(t)
    double t0 = 0.0;             // achieving t
    double zeta_value = 0.0;
};

/// Two-solution criterion on the ball of radius r at lambda = 1:
/// min_{t in S} t^2 / F(t) < zeta(n, r), with f truncated to t >= 0.
inline BallTheoremCheck check_theorem_ball(const Nonlinearity& g, int n, double r,
                                           double t_max = 1e4) {
    BallTheoremCheck out;
    out.zeta_value = zeta(n, r);
    const Nonlinearity gp = positive_part(g);

    const int scan = 4000;
    const double lo = std::log(1e-6), hi = std::log(t_max);
    bool nonzero = false;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_t = 0.0;
    for (int i = 0; i < scan; ++i) {
        const double t = std::exp(lo + (hi - lo) * i / (scan - 1));
        const double ft = gp.f(t);
        if (ft < -1e-12 * (1.0 + std::abs(ft)))
            throw std::invalid_argument("check_theorem_ball: f is negative on [0, inf)");
        if (ft != 0.0) nonzero = true;
        const double Ft = gp.F(t);
        if (!(Ft > 0.0)) continue;
        const double ratio = t * t / Ft;
        if (ratio < best_ratio) {
            best_ratio = ratio;
            best_t = t;
        }
    }
    if (!nonzero || !std::isfinite(best_ratio)) return out; // condition-unverifiable

    // Golden refinement inside the bracketing scan cells.
    const double factor = std::exp((hi - lo) / (scan - 1));
    auto neg_ratio = [&](double t) {
        const double Ft = gp.F(t);
        return Ft > 0.0 ? -(t * t / Ft) : -std::numeric_limits<double>::infinity();
    };
    auto [t_ref, neg_ref] = detail::golden_max(neg_ratio, best_t / factor, best_t * factor);
    if (std::isfinite(neg_ref) && -neg_ref < best_ratio) {
        best_ratio = -neg_ref;
        best_t = t_ref;
    }

    out.verifiable = true;
    out.min_ratio = best_ratio;
    out.t0 = best_t;
    out.condition_holds = best_ratio < out.zeta_value;
    return out;
}

// ---------------------------------------------------------------------------
// Assembled certificate

struct ThresholdCertificate {
    std::string domain;
    bool dimension_hypothesis_met = false;
    double lambda1 = 0.0;
    CfEstimate cf;
    double beta_essinf = 0.0;
    double beta_sup = 0.0;
    double lambda_nonexist = 0.0;
    LambdaZeroResult lambda0;
    LambdaStarEstimate lambda_star;
    HypothesisSpotCheck hypotheses;
};

/// Full certificate for a model with an eigenbasis; bracket is
/// [lambda_nonexist, lambda0] with the numerical estimate in between.
inline ThresholdCertificate compute_certificate(const EnergyModel& model,
                                                const WitnessSearchRanges& ranges = {},
                                                int budget = 4000) {
    ThresholdCertificate cert;
    const Domain& domain = model.basis().domain;
    cert.domain = domain.describe();
    cert.dimension_hypothesis_met = domain.meets_dimension_hypothesis();
    cert.lambda1 = model.basis().eigenvalues[0];
    cert.cf = model.nonlinearity().cf() ? *model.nonlinearity().cf()
                                        : estimate_cf(model.nonlinearity());
    cert.beta_essinf = model.weight().essinf();
    cert.beta_sup = model.weight().sup_norm();
    cert.lambda_nonexist = lambda_nonexist(cert.lambda1, cert.cf.value, cert.beta_sup);
    cert.lambda0 = lambda_zero(model.nonlinearity(), model.weight(), domain, ranges);
    EnergyModel with_cf = model.with_nonlinearity(model.nonlinearity().with_cf(cert.cf));
    cert.lambda_star = estimate_lambda_star(with_cf, budget);
    cert.hypotheses = spot_check_hypotheses(model.nonlinearity());
    return cert;
}

} // namespace halflap
