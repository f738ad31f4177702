#pragma once

// Variational solvers on the truncated eigenbasis:
//
//  * minimize: preconditioned gradient descent with Armijo backtracking.
//    The descent direction scales the dual gradient by 1/sqrt(lambda_j), so
//    the directional derivative equals minus the squared dual residual.
//  * mountain_pass: local minimax.  Each direction is assigned the value of
//    the first energy crest along its ray, and that crest value is descended
//    over directions until the crest point is stationary.
//  * mountain_pass_radius: heuristic radius of the energy barrier around 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "thresholds.hpp"

namespace halflap {

struct SolverConfig {
    int max_iters = 50000;
    double grad_tol = 1e-8;        // dual residual target
    double initial_step = 1.0;
    double backtrack = 0.5;
    double armijo_c = 1e-4;
    int path_points = 41;          // resolution of the crest scan along rays
    int redistribute_every = 10;   // cadence of the widened re-bracketing scan
    double separation_tol = 1e-5;  // distinctness threshold in the H^{1/2} norm
    double trivial_norm_factor = 10.0;
    int restarts = 0;              // extra random starts when the warm start lands on 0
    std::uint64_t seed = 0x51ab5eedULL;
};

enum class PointKind { trivial, minimizer, mountain_pass, stationary };

inline const char* to_string(PointKind kind) {
    switch (kind) {
        case PointKind::trivial: return "trivial";
        case PointKind::minimizer: return "minimizer";
        case PointKind::mountain_pass: return "mountain_pass";
        case PointKind::stationary: return "stationary";
    }
    return "unknown";
}

struct CriticalPoint {
    Field u;
    double energy = 0.0;
    double grad_norm = 0.0; // dual residual
    double h_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    PointKind kind = PointKind::trivial;
};

using IterObserver = std::function<void(int iter, double energy, double grad_norm)>;

namespace detail {

struct EnergyAndGrad {
    double energy = 0.0;
    std::vector<double> grad;
    double dual = 0.0;
};

// Single-sample evaluation of J, its dual gradient, and the dual residual.
inline EnergyAndGrad eval_energy_grad(const EnergyModel& model, const Field& u) {
    const auto& grid = model.grid();
    const auto& basis = model.basis();
    const auto& g = model.nonlinearity();
    const auto values = model.sample(u);

    EnergyAndGrad out;
    double quad = 0.0, psi_val = 0.0;
    std::vector<double> wf(values.size());
    for (std::size_t m = 0; m < values.size(); ++m) {
        const double wb = grid.weights[m] * model.weight().value(m);
        psi_val += wb * g.F(values[m]);
        wf[m] = wb * g.f(values[m]);
    }
    for (std::size_t j = 0; j < u.coeffs.size(); ++j)
        quad += u.coeffs[j] * u.coeffs[j] * basis.sqrt_eigenvalues[j];
    out.energy = 0.5 * quad - model.lambda() * psi_val;

    out.grad.resize(u.coeffs.size());
    double dual2 = 0.0;
    for (std::size_t j = 0; j < u.coeffs.size(); ++j) {
        const double* row = model.table().row(j);
        double s = 0.0;
        for (std::size_t m = 0; m < values.size(); ++m) s += wf[m] * row[m];
        out.grad[j] = basis.sqrt_eigenvalues[j] * u.coeffs[j] - model.lambda() * s;
        dual2 += out.grad[j] * out.grad[j] / basis.sqrt_eigenvalues[j];
    }
    out.dual = std::sqrt(dual2);
    if (!std::isfinite(out.energy) || !std::isfinite(out.dual))
        throw numerical_failure("solver: energy or gradient became non-finite");
    return out;
}

inline double energy_only(const EnergyModel& model, const Field& u) {
    const double e = j_lambda(model, u);
    if (!std::isfinite(e)) throw numerical_failure("solver: energy became non-finite");
    return e;
}

} // namespace detail

/// Classify by size and energy sign: near-zero norm is trivial, negative
/// energy a minimizer, positive energy a mountain-pass point.
inline PointKind classify(const CriticalPoint& point, const SolverConfig& config) {
    if (point.h_norm < config.trivial_norm_factor * config.grad_tol) return PointKind::trivial;
    if (point.energy < 0.0) return PointKind::minimizer;
    if (point.energy > 0.0) return PointKind::mountain_pass;
    return PointKind::stationary;
}

/// Preconditioned descent from u0 until the dual residual falls below
/// grad_tol or the iteration budget runs out.
inline CriticalPoint minimize(const EnergyModel& model, const Field& u0,
                              const SolverConfig& config = {},
                              const IterObserver& observer = {}) {
    if (!u0.basis || !compatible(model.basis(), *u0.basis))
        throw std::invalid_argument("minimize: field lives on a different basis");
    Field u = u0;
    double step = config.initial_step;
    int iter = 0;
    auto eg = detail::eval_energy_grad(model, u);
    for (; iter < config.max_iters && eg.dual > config.grad_tol; ++iter) {
        if (observer) observer(iter, eg.energy, eg.dual);
        Field d(u.basis);
        for (std::size_t j = 0; j < d.coeffs.size(); ++j)
            d.coeffs[j] = -eg.grad[j] / model.basis().sqrt_eigenvalues[j];
        const double slope = -eg.dual * eg.dual;

        double alpha = step;
        bool accepted = false;
        Field trial;
        double trial_energy = 0.0;
        std::optional<detail::EnergyAndGrad> trial_eg;
        // Once the Armijo bar c*alpha*|slope| sinks below the rounding noise
        // of the energy evaluation, the plain comparison is decided by luck;
        // in that regime an accept must instead contract the residual, and
        // substantially so, or a long step whose residual shrinks only in
        // the last digits would starve the ladder of the genuinely
        // contracting short steps below it.
        const double noise =
            64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(eg.energy));
        while (alpha > 1e-18) {
            trial = axpy(u, alpha, d);
            trial_energy = detail::energy_only(model, trial);
            const double target = eg.energy + config.armijo_c * alpha * slope;
            const bool resolvable = config.armijo_c * alpha * (-slope) >= noise;
            if (resolvable && trial_energy <= target) {
                accepted = true;
                break;
            }
            if (trial_energy <= target + noise) {
                trial_eg = detail::eval_energy_grad(model, trial);
                if (trial_eg->dual <= eg.dual * (1.0 - 1e-6)) {
                    accepted = true;
                    break;
                }
                trial_eg.reset();
            }
            alpha *= config.backtrack;
        }
        if (!accepted) break; // at the numerical floor; report what we have
        u = std::move(trial);
        step = std::min(alpha * 2.0, 1e6);
        eg = trial_eg ? std::move(*trial_eg) : detail::eval_energy_grad(model, u);
    }

    CriticalPoint out;
    out.u = std::move(u);
    out.energy = eg.energy;
    out.grad_norm = eg.dual;
    out.h_norm = h_half_norm(out.u);
    out.iterations = iter;
    out.converged = eg.dual <= config.grad_tol;
    out.kind = classify(out, config);
    return out;
}

/// Starting guess with Psi > 0: the projected witness cone, with a fallback
/// scan over scaled first eigenmodes peaking near the sign witness.
inline Field warm_start(const EnergyModel& model) {
    const auto& g = model.nonlinearity();
    const Domain& domain = model.basis().domain;
    const auto witness = find_sign_witness(g);
    if (!witness) throw no_witness_error("warm_start: nonlinearity admits no sign witness");

    auto project_onto_model = [&](const std::vector<double>& values) {
        Field u(model.basis_ptr());
        const auto& grid = model.grid();
        for (std::size_t j = 0; j < u.coeffs.size(); ++j) {
            const double* row = model.table().row(j);
            double s = 0.0;
            for (std::size_t m = 0; m < grid.size(); ++m)
                s += grid.weights[m] * values[m] * row[m];
            u.coeffs[j] = s;
        }
        return u;
    };

    // Candidate cones: the max-margin witness at full inradius and the cone
    // behind the certified threshold bound (provably in the energy well once
    // lambda clears that bound).  Keep whichever has lower energy.
    std::optional<Field> best;
    double best_energy = std::numeric_limits<double>::infinity();
    auto consider = [&](const ConeParams& cone) {
        Field u = project_onto_model(cone_field(cone, model.grid()));
        if (!(psi(model, u) > 0.0)) return;
        const double energy = j_lambda(model, u);
        if (energy < best_energy) {
            best_energy = energy;
            best = std::move(u);
        }
    };
    try {
        const auto feasible = find_psi_witness(g, model.weight(), domain);
        consider(ConeParams{domain.center(), domain.inradius(), feasible.sigma, feasible.t});
    } catch (const no_witness_error&) {
    }
    try {
        consider(lambda_zero(g, model.weight(), domain).cone);
    } catch (const no_witness_error&) {
    }
    if (best) return std::move(*best);

    double peak = 0.0;
    for (std::size_t m = 0; m < model.grid().size(); ++m)
        peak = std::max(peak, std::abs(model.table().row(0)[m]));
    if (peak > 0.0) {
        for (double factor : {1.0, 0.5, 2.0, 0.1, 10.0, 0.01, 100.0}) {
            Field u(model.basis_ptr());
            u.coeffs[0] = factor * *witness / peak;
            if (psi(model, u) > 0.0) return u;
        }
    }
    throw no_witness_error("warm_start: no starting field with positive Psi found");
}

namespace detail {

struct RayPeak {
    double t = 0.0;
    double energy = 0.0;
};

// First barrier crest along the ray {t v : t > 0}: a geometric argmax scan
// over [t_lo, t_hi] (the window slides until the maximum is interior),
// sharpened by golden-section in log t.
inline RayPeak ray_peak(const EnergyModel& model, const Field& v, double t_lo, double t_hi,
                        int scan_points) {
    const int n = std::max(scan_points, 9);
    const double ratio = t_hi / t_lo;
    const double cell = std::pow(ratio, 1.0 / (n - 1));
    auto value = [&](double t) { return energy_only(model, scale(t, v)); };

    int best = 0;
    double best_t = t_lo;
    double best_energy = -std::numeric_limits<double>::infinity();
    auto scan = [&] {
        best = 0;
        best_energy = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const double t = t_lo * std::pow(cell, static_cast<double>(i));
            const double energy = value(t);
            if (energy > best_energy) {
                best_energy = energy;
                best = i;
                best_t = t;
            }
        }
    };
    scan();
    for (int shifts = 0; shifts < 60 && (best == 0 || best == n - 1); ++shifts) {
        if (best == 0) {
            t_hi = t_lo * cell;
            t_lo = t_hi / ratio;
            if (t_lo < 1e-300) break;
        } else {
            t_lo = t_hi / cell;
            t_hi = t_lo * ratio;
            if (t_hi > 1e300) break;
        }
        scan();
    }

    double la = std::log(best_t / cell);
    double lb = std::log(best_t * cell);
    constexpr double gr = 0.61803398874989484;
    double l1 = lb - gr * (lb - la);
    double l2 = la + gr * (lb - la);
    double f1 = value(std::exp(l1));
    double f2 = value(std::exp(l2));
    for (int i = 0; i < 48; ++i) {
        if (f1 < f2) {
            la = l1;
            l1 = l2;
            f1 = f2;
            l2 = la + gr * (lb - la);
            f2 = value(std::exp(l2));
        } else {
            lb = l2;
            l2 = l1;
            f2 = f1;
            l1 = lb - gr * (lb - la);
            f1 = value(std::exp(l1));
        }
    }
    RayPeak out;
    out.t = std::exp(0.5 * (la + lb));
    out.energy = value(out.t);
    if (best_energy > out.energy) {
        out.t = best_t;
        out.energy = best_energy;
    }
    return out;
}

} // namespace detail

/// Mountain-pass search by local minimax.  A direction v carries the value
/// h(v) = max_t J(t v), attained at the first barrier crest along its ray;
/// descending h over directions drives the crest point to the saddle.  The
/// crest value can never drop below the pass level, so the iteration cannot
/// slide into the wells the way plain path relaxation can.  `path_points`
/// sets the resolution of the crest scan, and every `redistribute_every`
/// iterations the scan window is widened to re-bracket the crest.
inline CriticalPoint mountain_pass(const EnergyModel& model, const Field& endpoint,
                                   const SolverConfig& config = {},
                                   const IterObserver& observer = {}) {
    if (!endpoint.basis || !compatible(model.basis(), *endpoint.basis))
        throw std::invalid_argument("mountain_pass: field lives on a different basis");
    if (config.path_points < 3)
        throw std::invalid_argument("mountain_pass: need at least 3 path points");
    if (!(detail::energy_only(model, endpoint) < 0.0))
        throw degenerate_geometry("mountain_pass: endpoint energy is not negative (no valley)");

    const int scan_points = std::clamp(config.path_points, 17, 101);
    const double endpoint_norm = h_half_norm(endpoint);
    Field v = scale(1.0 / endpoint_norm, endpoint);
    const auto crest = detail::ray_peak(model, v, 1e-10 * endpoint_norm, endpoint_norm,
                                        std::max(scan_points, 81));
    if (!(crest.energy > 0.0))
        throw degenerate_geometry("mountain_pass: no positive barrier along the start ray");
    double t = crest.t;
    Field u = scale(t, v);
    auto eg = detail::eval_energy_grad(model, u);

    CriticalPoint out;
    double step = config.initial_step;
    int iter = 0;
    for (; iter < config.max_iters && eg.dual > config.grad_tol; ++iter) {
        if (observer) observer(iter, eg.energy, eg.dual);
        Field d(u.basis);
        for (std::size_t j = 0; j < d.coeffs.size(); ++j)
            d.coeffs[j] = -eg.grad[j] / model.basis().sqrt_eigenvalues[j];
        const double slope = -eg.dual * eg.dual;

        const bool wide =
            config.redistribute_every > 0 && (iter + 1) % config.redistribute_every == 0;
        const double window = wide ? 1e3 : 8.0;
        const int points = wide ? std::max(scan_points, 81) : scan_points;

        double alpha = step;
        bool accepted = false;
        Field trial_v;
        Field trial_u;
        double trial_t = 0.0;
        std::optional<detail::EnergyAndGrad> trial_eg;
        const double noise =
            64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(eg.energy));
        while (alpha > 1e-18) {
            Field raw = axpy(u, alpha, d);
            const double raw_norm = h_half_norm(raw);
            if (raw_norm > 0.0) {
                trial_v = scale(1.0 / raw_norm, raw);
                const auto peak = detail::ray_peak(model, trial_v, t / window, t * window, points);
                const double target = eg.energy + config.armijo_c * alpha * slope;
                const bool resolvable = config.armijo_c * alpha * (-slope) >= noise;
                if (resolvable && peak.energy <= target) {
                    trial_t = peak.t;
                    accepted = true;
                    break;
                }
                if (peak.energy <= target + noise) {
                    trial_u = scale(peak.t, trial_v);
                    trial_eg = detail::eval_energy_grad(model, trial_u);
                    if (trial_eg->dual <= eg.dual * (1.0 - 1e-6)) {
                        trial_t = peak.t;
                        accepted = true;
                        break;
                    }
                    trial_eg.reset();
                }
            }
            alpha *= config.backtrack;
        }
        if (!accepted) break; // at the numerical floor; report what we have
        v = std::move(trial_v);
        t = trial_t;
        u = trial_eg ? std::move(trial_u) : scale(t, v);
        step = std::min(alpha * 2.0, 1e6);
        eg = trial_eg ? std::move(*trial_eg) : detail::eval_energy_grad(model, u);
    }

    out.u = std::move(u);
    out.energy = eg.energy;
    out.grad_norm = eg.dual;
    out.h_norm = h_half_norm(out.u);
    out.iterations = iter;
    out.converged = eg.dual <= config.grad_tol;
    out.kind = classify(out, config);
    if (out.converged && out.kind == PointKind::trivial)
        throw degenerate_geometry(
            "mountain_pass: the crest converged to the trivial point; "
            "increase path_points or loosen the discretization");
    return out;
}

inline CriticalPoint mountain_pass(const EnergyModel& model, const CriticalPoint& valley,
                                   const SolverConfig& config = {},
                                   const IterObserver& observer = {}) {
    return mountain_pass(model, valley.u, config, observer);
}

/// Heuristic barrier radius: with |F(t)| <= (eps/2) t^2 + m_eps |t|^3 and the
/// embedding estimates |u|_{L^2} <= lambda_1^{-1/4} |u|_H, |u|_{L^3} <= c_3 |u|_H,
/// the energy is positive on spheres of radius below 1/(4 lambda sup(beta) m_eps c_3^3).
inline double mountain_pass_radius(const EnergyModel& model, double endpoint_norm,
                                   int embedding_trials = 64) {
    if (!(model.lambda() > 0.0)) return 0.99 * endpoint_norm;
    const auto& g = model.nonlinearity();
    const double beta_sup = model.weight().sup_norm();
    const double c2 = std::pow(model.basis().eigenvalues[0], -0.25);
    const double eps = 1.0 / (2.0 * model.lambda() * beta_sup * c2 * c2);

    double m_eps = 0.0;
    for (int i = 0; i < 4000; ++i) {
        const double t = std::exp(std::log(1e-8) + (std::log(1e6) - std::log(1e-8)) * i / 3999);
        for (double s : {t, -t}) {
            const double excess = std::abs(g.F(s)) - 0.5 * eps * s * s;
            if (excess > 0.0) m_eps = std::max(m_eps, excess / (std::abs(s) * s * s));
        }
    }
    if (m_eps == 0.0) return 0.99 * endpoint_norm;

    // Monte-Carlo estimate of the L^3 embedding constant on the truncated space.
    std::mt19937_64 rng(0xc3c3c3ULL);
    double c3 = 0.0;
    const auto& grid = model.grid();
    for (int trial = 0; trial < embedding_trials; ++trial) {
        Field u = random_field(model.basis_ptr(), rng);
        const auto values = model.sample(u);
        double l3 = 0.0;
        for (std::size_t m = 0; m < values.size(); ++m)
            l3 += grid.weights[m] * std::abs(values[m]) * values[m] * values[m];
        const double h = h_half_norm(u);
        if (h > 0.0) c3 = std::max(c3, std::cbrt(l3) / h);
    }
    if (c3 == 0.0) return 0.99 * endpoint_norm;

    const double r = 1.0 / (4.0 * model.lambda() * beta_sup * m_eps * c3 * c3 * c3);
    return std::min(r, 0.99 * endpoint_norm);
}

struct SolveReport {
    NonexistenceCheck nonexistence;
    CriticalPoint minimizer;
    std::optional<CriticalPoint> mountain_pass_point;
    bool distinct = false;
    double separation = 0.0;
};

/// Warm-started minimization plus, when the minimum is a genuine well, a
/// mountain-pass search from 0 to the minimizer.
inline SolveReport solve_both(const EnergyModel& model, const SolverConfig& config = {}) {
    EnergyModel prepared = model.nonlinearity().cf()
                               ? model
                               : model.with_nonlinearity(
                                     model.nonlinearity().with_cf(estimate_cf(model.nonlinearity())));
    SolveReport report;
    report.nonexistence = check_nonexistence(prepared);
    report.minimizer = minimize(prepared, warm_start(prepared), config);

    // The warm start can land in the trivial basin even when lambda is not
    // certified non-existent; a few random restarts cover that corner.
    if (report.minimizer.kind == PointKind::trivial && !report.nonexistence.certified &&
        config.restarts > 0) {
        std::mt19937_64 rng(config.seed);
        for (int attempt = 0; attempt < config.restarts; ++attempt) {
            const CriticalPoint candidate =
                minimize(prepared, random_field(prepared.basis_ptr(), rng), config);
            if (candidate.energy < report.minimizer.energy) report.minimizer = candidate;
        }
    }

    if (report.minimizer.kind == PointKind::minimizer) {
        report.mountain_pass_point = mountain_pass(prepared, report.minimizer.u, config);
        report.separation = h_half_distance(report.minimizer.u, report.mountain_pass_point->u);
        report.distinct = report.separation > config.separation_tol;
    }
    return report;
}

} // namespace halflap
