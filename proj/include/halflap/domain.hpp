#pragma once

// Bounded Lipschitz domains the library knows how to handle.  Intervals and
// axis-aligned rectangles carry an explicit Dirichlet eigenbasis (products of
// sines); balls are kept only for the closed-form threshold machinery and
// never get a basis or a quadrature grid.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"

namespace halflap {

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    if (n < 1) throw std::invalid_argument("unit_ball_volume: dimension must be >= 1");
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(1.0 + 0.5 * n);
}

enum class DomainKind { interval, rectangle, ball };

struct Domain {
    DomainKind kind = DomainKind::interval;
    int dim = 1;
    std::vector<double> lengths; // interval: {L}; rectangle: {L1, L2}
    double radius = 0.0;         // ball only

    static Domain interval(double length) {
        if (!(length > 0.0)) throw std::invalid_argument("Domain::interval: length must be positive");
        Domain d;
        d.kind = DomainKind::interval;
        d.dim = 1;
        d.lengths = {length};
        return d;
    }

    static Domain rectangle(double l1, double l2) {
        if (!(l1 > 0.0) || !(l2 > 0.0))
            throw std::invalid_argument("Domain::rectangle: side lengths must be positive");
        Domain d;
        d.kind = DomainKind::rectangle;
        d.dim = 2;
        d.lengths = {l1, l2};
        return d;
    }

    static Domain ball(int n, double r) {
        if (n < 1) throw std::invalid_argument("Domain::ball: dimension must be >= 1");
        if (!(r > 0.0)) throw std::invalid_argument("Domain::ball: radius must be positive");
        Domain d;
        d.kind = DomainKind::ball;
        d.dim = n;
        d.radius = r;
        return d;
    }

    [[nodiscard]] double measure() const {
        switch (kind) {
            case DomainKind::interval: return lengths[0];
            case DomainKind::rectangle: return lengths[0] * lengths[1];
            case DomainKind::ball: return unit_ball_volume(dim) * std::pow(radius, dim);
        }
        return 0.0;
    }

    /// Radius of the largest ball centered anywhere inside the domain.
    [[nodiscard]] double inradius() const {
        switch (kind) {
            case DomainKind::interval: return 0.5 * lengths[0];
            case DomainKind::rectangle: return 0.5 * std::min(lengths[0], lengths[1]);
            case DomainKind::ball: return radius;
        }
        return 0.0;
    }

    [[nodiscard]] std::vector<double> center() const {
        switch (kind) {
            case DomainKind::interval: return {0.5 * lengths[0]};
            case DomainKind::rectangle: return {0.5 * lengths[0], 0.5 * lengths[1]};
            case DomainKind::ball: return std::vector<double>(static_cast<std::size_t>(dim), 0.0);
        }
        return {};
    }

    [[nodiscard]] bool has_spectral_basis() const { return kind != DomainKind::ball; }

    /// True when the open ball B(x0, tau) fits inside the domain.
    [[nodiscard]] bool contains_ball(std::span<const double> x0, double tau) const {
        if (static_cast<int>(x0.size()) != dim || !(tau > 0.0)) return false;
        switch (kind) {
            case DomainKind::interval:
            case DomainKind::rectangle:
                for (int i = 0; i < dim; ++i)
                    if (x0[i] - tau < 0.0 || x0[i] + tau > lengths[static_cast<std::size_t>(i)])
                        return false;
                return true;
            case DomainKind::ball: {
                double r2 = 0.0;
                for (double c : x0) r2 += c * c;
                return std::sqrt(r2) + tau <= radius;
            }
        }
        return false;
    }

    /// Multiplicity results assume dimension >= 2; interval runs are flagged.
    [[nodiscard]] bool meets_dimension_hypothesis() const { return dim >= 2; }

    [[nodiscard]] std::string describe() const {
        switch (kind) {
            case DomainKind::interval: return "interval(0," + std::to_string(lengths[0]) + ")";
            case DomainKind::rectangle:
                return "rectangle(" + std::to_string(lengths[0]) + "x" + std::to_string(lengths[1]) + ")";
            case DomainKind::ball:
                return "ball(n=" + std::to_string(dim) + ",r=" + std::to_string(radius) + ")";
        }
        return "?";
    }

    friend bool operator==(const Domain& a, const Domain& b) {
        return a.kind == b.kind && a.dim == b.dim && a.lengths == b.lengths && a.radius == b.radius;
    }
};

} // namespace halflap
