#include <gtest/gtest.h>

#include <halflap/energy.hpp>

#include "oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace halflap;

namespace {
constexpr double kPi = std::numbers::pi;

EnergyModel interval_model(int J, int M, double lambda,
                           Nonlinearity g = Nonlinearity::log_square()) {
    const auto basis = build_basis(Domain::interval(kPi), J);
    auto grid = build_quadrature(basis->domain, M);
    Weight w = Weight::constant(1.0, grid.size());
    return EnergyModel(basis, std::move(grid), std::move(w), std::move(g), lambda);
}
} // namespace

TEST(weight, constant_and_bounds) {
    const Weight w = Weight::constant(2.5, 10);
    EXPECT_DOUBLE_EQ(w.essinf(), 2.5);
    EXPECT_DOUBLE_EQ(w.sup_norm(), 2.5);
    EXPECT_TRUE(w.warning().empty());
    EXPECT_THROW(Weight::constant(0.0, 10), std::invalid_argument);
    EXPECT_THROW(Weight::from_values({1.0, -0.5}), std::invalid_argument);
}

TEST(weight, declared_bounds_checked_against_nodes) {
    // Node range [1, 2]; declaring [0.5, 3] is legal but loose (> 1% slack).
    const Weight loose = Weight::from_values({1.0, 1.5, 2.0}, 0.5, 3.0);
    EXPECT_DOUBLE_EQ(loose.essinf(), 0.5);
    EXPECT_DOUBLE_EQ(loose.sup_norm(), 3.0);
    EXPECT_FALSE(loose.warning().empty());
    const Weight tight = Weight::from_values({1.0, 1.5, 2.0}, 1.0, 2.0);
    EXPECT_TRUE(tight.warning().empty());
    // Declared bounds that exclude observed nodes are an error.
    EXPECT_THROW(Weight::from_values({1.0, 2.0}, 1.5, 3.0), std::invalid_argument);
    EXPECT_THROW(Weight::from_values({1.0, 2.0}, 0.5, 1.5), std::invalid_argument);
}

TEST(energy, phi_is_half_squared_seminorm) {
    const auto model = interval_model(6, 32, 1.0);
    Field u(model.basis_ptr());
    u.coeffs = {1.0, 2.0, 0.0, 0.0, 0.0, 0.0};
    // lambda_j = j^2 on (0, pi): Phi = (1*1 + 4*2)/2.
    EXPECT_NEAR(phi(model, u), 0.5 * (1.0 * 1.0 + 4.0 * 2.0), 1e-14);
}

TEST(energy, psi_matches_independent_quadrature) {
    const auto model = interval_model(8, 64, 1.0);
    std::mt19937_64 rng(23);
    const Field u = random_field(model.basis_ptr(), rng);
    const auto& g = model.nonlinearity();
    const double ref = oracle::simpson(
        [&](double x) { return g.F(oracle::eval_interval(u.coeffs, kPi, x)); }, 0.0, kPi, 20000);
    EXPECT_NEAR(psi(model, u), ref, 1e-10);
}

TEST(energy, psi_with_variable_weight) {
    const auto basis = build_basis(Domain::interval(kPi), 8);
    auto grid = build_quadrature(basis->domain, 64);
    auto beta = [](const double* x) { return 1.0 + 0.5 * std::sin(x[0]); };
    Weight w = Weight::from_function(beta, grid);
    // Node extrema only: Gauss nodes are interior, so both bounds are near
    // misses of the true range [1, 1.5].
    EXPECT_NEAR(w.essinf(), 1.0, 1e-3);
    EXPECT_NEAR(w.sup_norm(), 1.5, 1e-3);
    const EnergyModel model(basis, std::move(grid), std::move(w), Nonlinearity::log_square(), 1.0);
    std::mt19937_64 rng(29);
    const Field u = random_field(basis, rng);
    const auto& g = model.nonlinearity();
    const double ref = oracle::simpson(
        [&](double x) {
            return (1.0 + 0.5 * std::sin(x)) * g.F(oracle::eval_interval(u.coeffs, kPi, x));
        },
        0.0, kPi, 20000);
    EXPECT_NEAR(psi(model, u), ref, 1e-10);
}

TEST(energy, j_lambda_combines_phi_and_psi) {
    const auto model = interval_model(6, 48, 3.5);
    std::mt19937_64 rng(31);
    const Field u = random_field(model.basis_ptr(), rng);
    EXPECT_NEAR(j_lambda(model, u), phi(model, u) - 3.5 * psi(model, u), 1e-14);
}

TEST(energy, gradient_matches_finite_differences) {
    const auto model = interval_model(10, 64, 2.0);
    std::mt19937_64 rng(37);
    for (int t = 0; t < 5; ++t) {
        const Field u = random_field(model.basis_ptr(), rng);
        const Field g = grad_j(model, u);
        const auto fd = oracle::fd_grad(model, u);
        EXPECT_LT(oracle::l2_diff(g.coeffs, fd), 1e-5 * std::max(1.0, oracle::l2_norm(fd)));
    }
}

TEST(energy, gradient_matches_finite_differences_2d) {
    const auto basis = build_basis(Domain::rectangle(kPi, kPi), 12);
    auto grid = build_quadrature(basis->domain, 24);
    Weight w = Weight::constant(1.0, grid.size());
    const EnergyModel model(basis, std::move(grid), std::move(w), Nonlinearity::log_square(), 4.0);
    std::mt19937_64 rng(41);
    const Field u = random_field(basis, rng);
    const Field g = grad_j(model, u);
    const auto fd = oracle::fd_grad(model, u);
    EXPECT_LT(oracle::l2_diff(g.coeffs, fd), 1e-5 * std::max(1.0, oracle::l2_norm(fd)));
}

TEST(energy, gradient_vanishes_at_zero_field) {
    const auto model = interval_model(6, 32, 2.0);
    const Field zero(model.basis_ptr());
    EXPECT_LT(oracle::l2_norm(grad_j(model, zero).coeffs), 1e-15);
    EXPECT_DOUBLE_EQ(j_lambda(model, zero), 0.0);
}

TEST(energy, dual_norm_closed_form_single_mode) {
    const auto model = interval_model(4, 32, 0.0);
    Field g(model.basis_ptr());
    g.coeffs = {0.0, 3.0, 0.0, 0.0}; // lambda_2 = 4, sqrt = 2
    EXPECT_NEAR(dual_norm(g), 3.0 / std::sqrt(2.0), 1e-15);
    // With lambda = 0 the gradient is diagonal and the dual norm equals |u|.
    std::mt19937_64 rng(43);
    const Field u = random_field(model.basis_ptr(), rng);
    EXPECT_NEAR(grad_norm_dual(model, u), h_half_norm(u), 1e-12);
}

TEST(energy, with_lambda_shares_tables) {
    const auto model = interval_model(6, 32, 1.0);
    const auto moved = model.with_lambda(9.0);
    EXPECT_EQ(&model.table(), &moved.table());
    EXPECT_DOUBLE_EQ(moved.lambda(), 9.0);
    std::mt19937_64 rng(47);
    const Field u = random_field(model.basis_ptr(), rng);
    EXPECT_NEAR(psi(model, u), psi(moved, u), 1e-16);
    EXPECT_THROW(model.with_lambda(-1.0), std::invalid_argument);
}

TEST(energy, rejects_mismatched_pieces) {
    const auto basis = build_basis(Domain::interval(kPi), 4);
    auto grid = build_quadrature(Domain::interval(2.0), 16);
    EXPECT_THROW(EnergyModel(basis, std::move(grid), Weight::constant(1.0, 16),
                             Nonlinearity::zero(), 1.0),
                 std::invalid_argument);
    auto good_grid = build_quadrature(basis->domain, 16);
    EXPECT_THROW(EnergyModel(basis, std::move(good_grid), Weight::constant(1.0, 5),
                             Nonlinearity::zero(), 1.0),
                 std::invalid_argument);
}
