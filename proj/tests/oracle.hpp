#pragma once

// Slow, independent reference computations the unit tests compare the library
// against: composite Simpson quadrature, direct trigonometric sums, and
// central finite differences.  Nothing here reuses the library's quadrature
// or gradient code paths.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <halflap/energy.hpp>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) throw std::invalid_argument("simpson: n must be even");
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

inline double simpson2(const std::function<double(double, double)>& f, double ax, double bx,
                       double ay, double by, int nx, int ny) {
    auto inner = [&](double x) {
        return simpson([&](double y) { return f(x, y); }, ay, by, ny);
    };
    return simpson(inner, ax, bx, nx);
}

// Direct sine-series evaluation, bypassing BasisTable.
inline double eval_interval(const std::vector<double>& coeffs, double length, double x) {
    double acc = 0.0;
    const double norm = std::sqrt(2.0 / length);
    for (std::size_t j = 0; j < coeffs.size(); ++j)
        acc += coeffs[j] * norm * std::sin((j + 1) * M_PI * x / length);
    return acc;
}

inline double eval_rectangle(const halflap::Field& u, double x, double y) {
    const auto& basis = *u.basis;
    const double l1 = basis.domain.lengths[0], l2 = basis.domain.lengths[1];
    const double norm = 2.0 / std::sqrt(l1 * l2);
    double acc = 0.0;
    for (std::size_t j = 0; j < u.coeffs.size(); ++j) {
        const auto& mode = basis.modes[j];
        acc += u.coeffs[j] * norm * std::sin(mode[0] * M_PI * x / l1) *
               std::sin(mode[1] * M_PI * y / l2);
    }
    return acc;
}

inline std::vector<double> fd_grad(const halflap::EnergyModel& model, const halflap::Field& u,
                                   double h = 1e-6) {
    std::vector<double> grad(u.coeffs.size());
    halflap::Field probe = u;
    for (std::size_t j = 0; j < u.coeffs.size(); ++j) {
        probe.coeffs[j] = u.coeffs[j] + h;
        const double plus = halflap::j_lambda(model, probe);
        probe.coeffs[j] = u.coeffs[j] - h;
        const double minus = halflap::j_lambda(model, probe);
        probe.coeffs[j] = u.coeffs[j];
        grad[j] = (plus - minus) / (2.0 * h);
    }
    return grad;
}

inline double l2_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

inline double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

} // namespace oracle
