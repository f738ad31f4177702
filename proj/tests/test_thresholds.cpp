#include <gtest/gtest.h>

#include <halflap/thresholds.hpp>

#include "oracle.hpp"

#include <cmath>
#include <numbers>

using namespace halflap;

namespace {
constexpr double kPi = std::numbers::pi;

EnergyModel square_model(int J, int M, double lambda) {
    const auto basis = build_basis(Domain::rectangle(kPi, kPi), J);
    auto grid = build_quadrature(basis->domain, M);
    Weight w = Weight::constant(1.0, grid.size());
    return EnergyModel(basis, std::move(grid), std::move(w), Nonlinearity::log_square(), lambda);
}
} // namespace

TEST(thresholds, nonexistence_bound_formula) {
    EXPECT_DOUBLE_EQ(lambda_nonexist(4.0, 0.5, 2.0), 2.0);
    EXPECT_THROW(lambda_nonexist(-1.0, 0.5, 2.0), std::invalid_argument);
    EXPECT_THROW(lambda_nonexist(4.0, 0.0, 2.0), std::invalid_argument);
}

TEST(thresholds, nonexistence_check_splits_at_the_bound) {
    auto model = square_model(8, 24, 0.0);
    model = model.with_nonlinearity(
        model.nonlinearity().with_cf(estimate_cf(model.nonlinearity())));
    const double bound = std::sqrt(2.0) / model.nonlinearity().cf()->value;
    const auto below = check_nonexistence(model.with_lambda(0.9 * bound));
    EXPECT_TRUE(below.certified);
    EXPECT_GT(below.margin, 0.0);
    EXPECT_NEAR(below.bound, bound, 1e-12);
    const auto above = check_nonexistence(model.with_lambda(1.1 * bound));
    EXPECT_FALSE(above.certified);
    EXPECT_LT(above.margin, 0.0);
    // Without a cached c_f the check refuses to guess.
    EXPECT_THROW(check_nonexistence(square_model(8, 24, 1.0)), std::invalid_argument);
}

TEST(thresholds, cone_field_plateau_and_ramp) {
    const auto grid = build_quadrature(Domain::rectangle(2.0, 2.0), 48);
    const ConeParams cone{{1.0, 1.0}, 0.8, 0.5, 3.0};
    const auto values = cone_field(cone, grid);
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double dx = grid.node(m)[0] - 1.0, dy = grid.node(m)[1] - 1.0;
        const double r = std::hypot(dx, dy);
        if (r <= 0.4)
            EXPECT_DOUBLE_EQ(values[m], 3.0);
        else if (r >= 0.8)
            EXPECT_DOUBLE_EQ(values[m], 0.0);
        else
            EXPECT_NEAR(values[m], 3.0 * (0.8 - r) / 0.4, 1e-12);
    }
}

TEST(thresholds, cone_params_validated) {
    const Domain d = Domain::rectangle(2.0, 2.0);
    EXPECT_NO_THROW((ConeParams{{1.0, 1.0}, 0.9, 0.5, 1.0}).validate(d));
    EXPECT_THROW((ConeParams{{1.0, 1.0}, 1.1, 0.5, 1.0}).validate(d), std::invalid_argument);
    EXPECT_THROW((ConeParams{{1.0, 1.0}, 0.9, 1.5, 1.0}).validate(d), std::invalid_argument);
    EXPECT_THROW((ConeParams{{1.0}, 0.9, 0.5, 1.0}).validate(d), std::invalid_argument);
}

TEST(thresholds, cone_gradient_identity_1d) {
    // n = 1: the analytic value is t^2 * 2 * (1-sigma)/(1-sigma)^2 / tau... in
    // closed form omega_1 = 2 and the quadrature of the piecewise slope must
    // agree once the grid resolves the annulus.
    const auto grid = build_quadrature(Domain::interval(2.0), 2048);
    const ConeParams cone{{1.0}, 0.7, 0.4, 1.3};
    const double analytic = cone_gradient_sq_analytic(cone, 1);
    const double quad = cone_gradient_sq_integral(cone, grid);
    EXPECT_NEAR(quad, analytic, 0.005 * analytic);
}

TEST(thresholds, cone_gradient_identity_2d) {
    const auto grid = build_quadrature(Domain::rectangle(kPi, kPi), 256);
    const ConeParams cone{{kPi / 2, kPi / 2}, 0.9, 0.5, 2.0};
    const double analytic = cone_gradient_sq_analytic(cone, 2);
    const double quad = cone_gradient_sq_integral(cone, grid);
    EXPECT_NEAR(quad, analytic, 0.01 * analytic);
}

TEST(thresholds, cone_norm_bound_dominates_lifted_energy) {
    // The closed-form bound adds |Omega|/4 t^2 to the gradient term; it must
    // dominate the brute-force cylinder energy of the lift exp(-y/2) omega.
    const Domain domain = Domain::rectangle(kPi, kPi);
    const auto grid = build_quadrature(domain, 128);
    const ConeParams cone{{kPi / 2, kPi / 2}, 1.2, 0.5, 1.5};
    const auto values = cone_field(cone, grid);
    // |grad w|^2 integrated in y: grad_x part carries int exp(-y) = 1, the
    // y-derivative part carries 1/4 int exp(-y) omega^2.
    double omega_sq = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m)
        omega_sq += grid.weights[m] * values[m] * values[m];
    const double lifted = cone_gradient_sq_integral(cone, grid) + 0.25 * omega_sq;
    EXPECT_LE(lifted, cone_cylinder_norm_bound(cone, domain) * (1.0 + 0.02));
}

TEST(thresholds, psi_witness_has_positive_margin) {
    const Weight w = Weight::constant(1.0);
    const auto witness =
        find_psi_witness(Nonlinearity::log_square(), w, Domain::rectangle(kPi, kPi));
    EXPECT_GT(witness.margin, 0.0);
    EXPECT_GT(witness.sigma, 0.0);
    EXPECT_LT(witness.sigma, 1.0);
    EXPECT_THROW(find_psi_witness(Nonlinearity::zero(), w, Domain::rectangle(kPi, kPi)),
                 no_witness_error);
}

TEST(thresholds, lambda_zero_square_reference_value) {
    const auto result =
        lambda_zero(Nonlinearity::log_square(), Weight::constant(1.0), Domain::rectangle(kPi, kPi));
    // Grid-minimized cone bound for the unit-weight pi x pi square.
    EXPECT_NEAR(result.lambda0, 15.7, 2.0);
    EXPECT_GT(result.denominator_margin, 0.0);
    EXPECT_GT(result.psi_lower_bound, 0.0);
    // The witness cone must be admissible.
    EXPECT_NO_THROW(result.cone.validate(Domain::rectangle(kPi, kPi)));
}

TEST(thresholds, lambda_zero_scales_inversely_with_weight) {
    // Doubling a constant weight doubles Psi, halving the bound.
    const auto one =
        lambda_zero(Nonlinearity::log_square(), Weight::constant(1.0), Domain::rectangle(kPi, kPi));
    const auto two =
        lambda_zero(Nonlinearity::log_square(), Weight::constant(2.0), Domain::rectangle(kPi, kPi));
    EXPECT_NEAR(two.lambda0, 0.5 * one.lambda0, 1e-10 * one.lambda0);
}

TEST(thresholds, lambda_zero_requires_sign_witness) {
    EXPECT_THROW(lambda_zero(Nonlinearity::zero(), Weight::constant(1.0), Domain::ball(2, 1.0)),
                 no_witness_error);
}

TEST(thresholds, lambda_star_estimate_sits_inside_the_bracket) {
    const auto model = square_model(16, 48, 1.0);
    const auto est = estimate_lambda_star(model, 800);
    const auto bound =
        lambda_zero(model.nonlinearity(), model.weight(), model.basis().domain);
    EXPECT_GT(est.upper, 0.0);
    EXPECT_GE(est.upper, est.lower - 1e-10);
    EXPECT_LE(est.upper, bound.lambda0 + 1e-10);
    EXPECT_GT(est.trials_used, 0);
    EXPECT_FALSE(est.witness_kind.empty());
}

TEST(thresholds, lambda_star_estimate_improves_with_budget) {
    // The trial family is a fixed sequence, so a bigger prefix can only help.
    const auto model = square_model(12, 32, 1.0);
    const double coarse = estimate_lambda_star(model, 40).upper;
    const double fine = estimate_lambda_star(model, 400).upper;
    EXPECT_LE(fine, coarse + 1e-14);
}

TEST(thresholds, z2_closed_form_crosscheck) {
    // For n = 2, z_2(sigma) = (1+sigma) / ((2 sigma^2 - 1)(1 - sigma)).
    for (double sigma : {0.75, 0.8, 0.9, 0.95}) {
        const double expected =
            (1.0 + sigma) / ((2.0 * sigma * sigma - 1.0) * (1.0 - sigma));
        EXPECT_NEAR(z_n(2, sigma), expected, 1e-12 * expected);
    }
}

TEST(thresholds, z_n_domain_is_enforced) {
    EXPECT_THROW(z_n(2, 0.70), std::domain_error); // below 2^{-1/2}
    EXPECT_THROW(z_n(2, 1.0), std::domain_error);
    EXPECT_THROW(z_n(3, 0.79), std::domain_error); // below 2^{-1/3} ~ 0.7937
    EXPECT_NO_THROW(z_n(3, 0.80));
    EXPECT_THROW(z_n(1, 0.9), std::invalid_argument);
}

TEST(thresholds, zeta_identity) {
    for (int n : {2, 3, 4, 5})
        for (double r : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            const auto info = zeta_info(n, r);
            const double identity = 0.5 * (info.min_z / (r * r) + 0.25) * info.value;
            EXPECT_NEAR(identity, 1.0, 1e-12) << "n=" << n << " r=" << r;
            EXPECT_LT(info.value, 8.0);
            EXPECT_GT(info.sigma_star, std::pow(2.0, -1.0 / n));
            EXPECT_LT(info.sigma_star, 1.0);
        }
}

TEST(thresholds, zeta_grows_with_radius) {
    EXPECT_LT(zeta(3, 0.5), zeta(3, 1.0));
    EXPECT_LT(zeta(3, 1.0), zeta(3, 5.0));
    // Large balls approach the asymptote 8.
    EXPECT_NEAR(zeta(3, 1e4), 8.0, 1e-4);
}

TEST(thresholds, ball_criterion_log_square) {
    // t^2/F(t) -> 3/t as t -> 0+ never happens (it diverges); the minimum over
    // S is attained at moderate t and is strictly positive.
    const auto check = check_theorem_ball(Nonlinearity::log_square(), 3, 1.0);
    EXPECT_TRUE(check.verifiable);
    EXPECT_GT(check.min_ratio, 0.0);
    EXPECT_GT(check.t0, 0.0);
    EXPECT_EQ(check.condition_holds, check.min_ratio < check.zeta_value);
    // A big enough ball always satisfies the criterion (zeta -> 8 while the
    // ratio minimum is radius-independent) provided min_ratio < 8.
    if (check.min_ratio < 8.0) {
        const auto big = check_theorem_ball(Nonlinearity::log_square(), 3, 1e4);
        EXPECT_TRUE(big.condition_holds);
    }
}

TEST(thresholds, ball_criterion_rejects_sign_changing_f) {
    // f(t) = t^3 - t is negative on (0,1): the positive-part hypothesis fails.
    const auto g = Nonlinearity::custom("cubic-dip", [](double t) { return t * t * t - t; });
    EXPECT_THROW(check_theorem_ball(g, 3, 1.0), std::invalid_argument);
}

TEST(thresholds, ball_criterion_zero_nonlinearity_unverifiable) {
    const auto check = check_theorem_ball(Nonlinearity::zero(), 3, 1.0);
    EXPECT_FALSE(check.verifiable);
    EXPECT_FALSE(check.condition_holds);
}

TEST(thresholds, certificate_assembles_the_bracket) {
    const auto model = square_model(12, 32, 1.0);
    const auto cert = compute_certificate(model, {}, 300);
    EXPECT_EQ(cert.lambda1, 2.0);
    EXPECT_TRUE(cert.dimension_hypothesis_met);
    EXPECT_NEAR(cert.cf.value, 0.80474, 5e-5);
    EXPECT_NEAR(cert.lambda_nonexist, std::sqrt(2.0) / cert.cf.value, 1e-12);
    EXPECT_LE(cert.lambda_nonexist, cert.lambda_star.upper + 1e-10);
    EXPECT_LE(cert.lambda_star.upper, cert.lambda0.lambda0 + 1e-10);
    EXPECT_DOUBLE_EQ(cert.beta_essinf, 1.0);
    EXPECT_DOUBLE_EQ(cert.beta_sup, 1.0);
}
