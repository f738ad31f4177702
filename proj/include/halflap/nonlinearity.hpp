#pragma once

// Nonlinearities f with primitive F(t) = int_0^t f(s) ds.
//
// Builtins: the log-square model f(t) = log(1 + t^2) with its analytic
// primitive, and the zero model.  Custom nonlinearities come either from a
// callable (primitive filled in by adaptive Simpson) or from a sampled table
// (natural cubic spline, integrated exactly piece by piece).

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace halflap {

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature of f over [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Natural cubic spline through (xs, ys), constant beyond the table ends.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> xs, std::vector<double> ys)
        : x_(std::move(xs)), y_(std::move(ys)) {
        const std::size_t n = x_.size();
        if (n < 3 || y_.size() != n)
            throw std::invalid_argument("CubicSpline: need at least 3 samples");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("CubicSpline: abscissae must be strictly increasing");

        // Tridiagonal solve for second derivatives, natural boundary conditions.
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
        std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0), rhs(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
        }
        m_.assign(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            const double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[n - 1] = rhs[n - 1] / diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];

        // Running exact integral of the spline from x_[0] to each knot.
        integral_.assign(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i)
            integral_[i + 1] = integral_[i] + segment_integral(i, x_[i + 1]);
    }

    [[nodiscard]] double operator()(double t) const {
        if (t <= x_.front()) return y_.front();
        if (t >= x_.back()) return y_.back();
        const std::size_t i = segment(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

    /// Exact integral of the spline from x_[0] to t (linear continuation outside).
    [[nodiscard]] double integral_from_start(double t) const {
        if (t <= x_.front()) return y_.front() * (t - x_.front());
        if (t >= x_.back()) return integral_.back() + y_.back() * (t - x_.back());
        const std::size_t i = segment(t);
        return integral_[i] + segment_integral(i, t);
    }

    [[nodiscard]] double min_x() const { return x_.front(); }
    [[nodiscard]] double max_x() const { return x_.back(); }

private:
    [[nodiscard]] std::size_t segment(double t) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        return std::min(std::max<std::size_t>(i, 1) - 1, x_.size() - 2);
    }

    /// Integral of segment i from x_[i] to t in [x_[i], x_[i+1]].
    [[nodiscard]] double segment_integral(std::size_t i, double t) const {
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
        // Antiderivative of the standard spline form evaluated between b=0 (t=x_i) and b.
        const double term_lin = h * (y_[i] * (1.0 - a * a) + y_[i + 1] * b * b) / 2.0;
        const double term_cub = h * h * h / 6.0 *
                                (m_[i] * ((1.0 - a * a * a * a) / 4.0 - (1.0 - a * a) / 2.0) +
                                 m_[i + 1] * (b * b * b * b / 4.0 - b * b / 2.0));
        return term_lin + term_cub;
    }

    std::vector<double> x_, y_, m_, integral_;
};

/// Maximize a unimodal-ish function on [a, b] by golden-section; returns (argmax, max).
inline std::pair<double, double> golden_max(const std::function<double(double)>& g, double a,
                                            double b, int iters = 200) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double g1 = g(x1), g2 = g(x2);
    for (int i = 0; i < iters && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (g1 < g2) {
            a = x1; x1 = x2; g1 = g2;
            x2 = a + gr * (b - a); g2 = g(x2);
        } else {
            b = x2; x2 = x1; g2 = g1;
            x1 = b - gr * (b - a); g1 = g(x1);
        }
    }
    return g1 > g2 ? std::make_pair(x1, g1) : std::make_pair(x2, g2);
}

/// Primitive of log(1+t^2): 2 atan(t) + t log(1+t^2) - 2t, with a series
/// branch near zero where the closed form loses all its digits.
inline double log_square_primitive(double t) {
    if (std::abs(t) < 0.05) {
        // F(t) = sum_{k>=1} (-1)^{k+1} t^{2k+1} / (k (2k+1))
        const double t2 = t * t;
        double term = t * t2, sum = 0.0;
        for (int k = 1; k < 40; ++k) {
            const double contrib = term / (k * (2.0 * k + 1.0));
            sum += (k % 2 == 1) ? contrib : -contrib;
            term *= t2;
            if (std::abs(term) < 1e-30) break;
        }
        return sum;
    }
    return 2.0 * std::atan(t) + t * std::log1p(t * t) - 2.0 * t;
}

} // namespace detail

struct NonlinearityFlags {
    bool superlinear_at_zero = false;   // f(t)/t -> 0 as t -> 0
    bool sublinear_at_infinity = false; // f(t)/t -> 0 as |t| -> inf
    bool sign_condition = false;        // some t with F(t) > 0
};

struct CfEstimate {
    double value = 0.0;  // max |f(t)| / |t|
    double argmax = 0.0; // where the scan found it
    double t_max = 0.0;  // scan range used
    int grid = 0;        // scan resolution used
};

class Nonlinearity {
public:
    Nonlinearity() = default;

    Nonlinearity(std::string name, std::function<double(double)> f, std::function<double(double)> F,
                 NonlinearityFlags flags)
        : name_(std::move(name)), f_(std::move(f)), F_(std::move(F)), flags_(flags) {}

    [[nodiscard]] double f(double t) const { return f_(t); }
    [[nodiscard]] double F(double t) const { return F_(t); }
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const NonlinearityFlags& flags() const { return flags_; }
    [[nodiscard]] const std::optional<CfEstimate>& cf() const { return cf_; }

    [[nodiscard]] Nonlinearity with_cf(CfEstimate estimate) const {
        Nonlinearity out = *this;
        out.cf_ = estimate;
        return out;
    }

    static Nonlinearity log_square() {
        return Nonlinearity(
            "log-square", [](double t) { return std::log1p(t * t); },
            [](double t) { return detail::log_square_primitive(t); },
            NonlinearityFlags{true, true, true});
    }

    static Nonlinearity zero() {
        return Nonlinearity(
            "zero", [](double) { return 0.0; }, [](double) { return 0.0; },
            NonlinearityFlags{true, true, false});
    }

    /// Custom nonlinearity from a callable; primitive by adaptive Simpson
    /// unless one is supplied.
    static Nonlinearity custom(std::string name, std::function<double(double)> f,
                               std::function<double(double)> F = {},
                               NonlinearityFlags flags = {}) {
        if (!F) {
            auto fcopy = f;
            F = [fcopy](double t) { return detail::adaptive_simpson(fcopy, 0.0, t, 1e-10); };
        }
        return Nonlinearity(std::move(name), std::move(f), std::move(F), flags);
    }

    /// Custom nonlinearity from samples (t_i, f(t_i)); cubic interpolation,
    /// primitive integrated exactly from the spline.
    static Nonlinearity from_table(std::string name, std::vector<double> ts, std::vector<double> fs,
                                   NonlinearityFlags flags = {}) {
        auto spline = std::make_shared<detail::CubicSpline>(std::move(ts), std::move(fs));
        const double at_zero = spline->integral_from_start(0.0);
        return Nonlinearity(
            std::move(name), [spline](double t) { return (*spline)(t); },
            [spline, at_zero](double t) { return spline->integral_from_start(t) - at_zero; }, flags);
    }

private:
    std::string name_;
    std::function<double(double)> f_ = [](double) { return 0.0; };
    std::function<double(double)> F_ = [](double) { return 0.0; };
    NonlinearityFlags flags_;
    std::optional<CfEstimate> cf_;
};

/// Builtin models by name.
inline Nonlinearity builtin(const std::string& name) {
    if (name == "log-square") return Nonlinearity::log_square();
    if (name == "zero") return Nonlinearity::zero();
    throw std::invalid_argument("builtin nonlinearity '" + name + "' unknown (log-square, zero)");
}

/// Truncation keeping only the action on positive arguments:
/// f+(t) = f(t) for t >= 0, 0 for t < 0.
inline Nonlinearity positive_part(const Nonlinearity& g);

/// Largest ratio |f(t)|/|t| over a symmetric log-spaced scan of [1e-6, t_max],
/// refined by golden-section around the best grid cell.  Ties between the
/// positive and negative branch go to positive t.
inline CfEstimate estimate_cf(const Nonlinearity& g, double t_max = 1e4, int grid = 2000) {
    if (!(t_max > 1e-6)) throw std::invalid_argument("estimate_cf: t_max must exceed 1e-6");
    if (grid < 8) throw std::invalid_argument("estimate_cf: grid too coarse");

    const double lo = std::log(1e-6), hi = std::log(t_max);
    auto ratio = [&](double t) { return std::abs(g.f(t)) / std::abs(t); };

    auto scan_side = [&](double sign) {
        double best_t = sign * 1e-6, best_r = 0.0;
        int best_i = 0;
        for (int i = 0; i < grid; ++i) {
            const double t = sign * std::exp(lo + (hi - lo) * i / (grid - 1));
            const double r = ratio(t);
            if (std::isfinite(r) && r > best_r) {
                best_r = r;
                best_t = t;
                best_i = i;
            }
        }
        // Refine inside the bracketing grid cells.
        const int ia = std::max(0, best_i - 1), ib = std::min(grid - 1, best_i + 1);
        double a = sign * std::exp(lo + (hi - lo) * ia / (grid - 1));
        double b = sign * std::exp(lo + (hi - lo) * ib / (grid - 1));
        if (a > b) std::swap(a, b);
        auto [t_ref, r_ref] = detail::golden_max(ratio, a, b);
        if (r_ref > best_r) {
            best_r = r_ref;
            best_t = t_ref;
        }
        return std::make_pair(best_t, best_r);
    };

    const auto [tp, rp] = scan_side(+1.0);
    const auto [tn, rn] = scan_side(-1.0);

    CfEstimate est;
    est.t_max = t_max;
    est.grid = grid;
    if (rn > rp * (1.0 + 1e-12)) {
        est.value = rn;
        est.argmax = tn;
    } else {
        est.value = rp;
        est.argmax = tp;
    }
    if (!(est.value > 0.0))
        throw undefined_cf_error("estimate_cf: |f(t)|/|t| vanishes on the scan range");
    return est;
}

/// Some t with F(t) > 0, or nullopt.  Among the admissible scan points the
/// one minimizing t^2/F(t) is returned: any choice satisfies the contract,
/// and this one gives well-scaled search grids downstream.
inline std::optional<double> find_sign_witness(const Nonlinearity& g, double t_max = 1e4,
                                               int grid = 4000) {
    const double lo = std::log(1e-6), hi = std::log(t_max);
    double best_t = 0.0, best_ratio = 0.0;
    bool found = false;
    for (int i = 0; i < grid; ++i) {
        const double mag = std::exp(lo + (hi - lo) * i / (grid - 1));
        for (double t : {mag, -mag}) {
            const double F = g.F(t);
            if (!std::isfinite(F) || !(F > 0.0)) continue;
            const double r = t * t / F;
            if (!found || r < best_ratio) {
                found = true;
                best_ratio = r;
                best_t = t;
            }
        }
    }
    if (!found) return std::nullopt;
    return best_t;
}

inline Nonlinearity positive_part(const Nonlinearity& g) {
    auto f = [g](double t) { return t >= 0.0 ? g.f(t) : 0.0; };
    auto F = [g](double t) { return t >= 0.0 ? g.F(t) : 0.0; };
    Nonlinearity out(g.name() + "+", f, F,
                     NonlinearityFlags{g.flags().superlinear_at_zero,
                                       g.flags().sublinear_at_infinity, false});
    NonlinearityFlags flags = out.flags();
    flags.sign_condition = find_sign_witness(out).has_value();
    return Nonlinearity(out.name(), f, F, flags);
}

/// Measured sups of |f(t)/t| near zero and near the far end of the scan
/// range; recorded in threshold certificates next to the declared flags.
struct HypothesisSpotCheck {
    double sup_near_zero = 0.0;
    double near_zero_range = 0.0;
    double sup_near_infinity = 0.0;
    double near_infinity_range = 0.0;
};

inline HypothesisSpotCheck spot_check_hypotheses(const Nonlinearity& g, double t_small = 1e-3,
                                                 double t_large = 1e4) {
    HypothesisSpotCheck out;
    out.near_zero_range = t_small;
    out.near_infinity_range = t_large;
    for (int i = 0; i < 64; ++i) {
        const double mag_small = t_small * std::pow(10.0, -3.0 * i / 63.0);
        const double mag_large = t_large * std::pow(10.0, -1.0 * i / 63.0);
        for (double s : {1.0, -1.0}) {
            out.sup_near_zero = std::max(out.sup_near_zero, std::abs(g.f(s * mag_small) / mag_small));
            out.sup_near_infinity =
                std::max(out.sup_near_infinity, std::abs(g.f(s * mag_large) / mag_large));
        }
    }
    return out;
}

} // namespace halflap
