#include <gtest/gtest.h>

#include <halflap/field.hpp>

#include "oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace halflap;

namespace {
constexpr double kPi = std::numbers::pi;

std::shared_ptr<const SpectralBasis> interval_basis(int J, double L = kPi) {
    return build_basis(Domain::interval(L), J);
}
} // namespace

TEST(basis, interval_eigenvalues_closed_form) {
    const auto basis = build_basis(Domain::interval(2.0), 12);
    ASSERT_EQ(basis->size(), 12u);
    for (std::size_t j = 0; j < basis->size(); ++j) {
        const double m = static_cast<double>(j + 1);
        EXPECT_NEAR(basis->eigenvalues[j], m * m * kPi * kPi / 4.0, 1e-12);
        EXPECT_DOUBLE_EQ(basis->sqrt_eigenvalues[j], std::sqrt(basis->eigenvalues[j]));
        EXPECT_EQ(basis->modes[j][0], static_cast<int>(j + 1));
        EXPECT_EQ(basis->modes[j][1], 0);
    }
}

TEST(basis, rectangle_eigenvalues_sorted_with_lexicographic_ties) {
    const auto basis = build_basis(Domain::rectangle(kPi, kPi), 10);
    // On the square the spectrum starts 2, 5, 5, 8, 10, 10, ... (m^2 + p^2).
    EXPECT_NEAR(basis->eigenvalues[0], 2.0, 1e-12);
    EXPECT_NEAR(basis->eigenvalues[1], 5.0, 1e-12);
    EXPECT_NEAR(basis->eigenvalues[2], 5.0, 1e-12);
    EXPECT_NEAR(basis->eigenvalues[3], 8.0, 1e-12);
    for (std::size_t j = 1; j < basis->size(); ++j)
        EXPECT_GE(basis->eigenvalues[j], basis->eigenvalues[j - 1]);
    // Tie (1,2) vs (2,1) resolved lexicographically.
    EXPECT_EQ(basis->modes[1], (std::array<int, 2>{1, 2}));
    EXPECT_EQ(basis->modes[2], (std::array<int, 2>{2, 1}));
}

TEST(basis, eval_matches_direct_trig_sum) {
    const auto basis = build_basis(Domain::rectangle(1.5, 2.5), 9);
    std::mt19937_64 rng(7);
    Field u = random_field(basis, rng);
    for (int trial = 0; trial < 25; ++trial) {
        const double x = 1.5 * detail::uniform01(rng);
        const double y = 2.5 * detail::uniform01(rng);
        double lib = 0.0;
        const double pt[2] = {x, y};
        for (std::size_t j = 0; j < u.coeffs.size(); ++j)
            lib += u.coeffs[j] * basis->eval(j, pt);
        EXPECT_NEAR(lib, oracle::eval_rectangle(u, x, y), 1e-12);
    }
}

TEST(basis, eval_gradient_matches_finite_differences) {
    const auto basis = build_basis(Domain::rectangle(kPi, 2.0), 6);
    const double pt[2] = {0.9, 1.1};
    const double h = 1e-6;
    for (std::size_t j = 0; j < basis->size(); ++j) {
        double g[2];
        basis->eval_gradient(j, pt, g);
        for (int d = 0; d < 2; ++d) {
            double lo[2] = {pt[0], pt[1]}, hi[2] = {pt[0], pt[1]};
            lo[d] -= h;
            hi[d] += h;
            const double fd = (basis->eval(j, hi) - basis->eval(j, lo)) / (2.0 * h);
            EXPECT_NEAR(g[d], fd, 1e-6);
        }
    }
}

TEST(basis, table_rows_match_pointwise_eval) {
    const auto basis = build_basis(Domain::rectangle(1.0, 1.0), 7);
    const auto grid = build_quadrature(basis->domain, 6);
    const BasisTable table(*basis, grid, true);
    for (std::size_t j = 0; j < basis->size(); ++j)
        for (std::size_t m = 0; m < grid.size(); ++m) {
            EXPECT_NEAR(table.row(j)[m], basis->eval(j, grid.node(m)), 1e-14);
            double g[2];
            basis->eval_gradient(j, grid.node(m), g);
            EXPECT_NEAR(table.grad_row(0, j)[m], g[0], 1e-13);
            EXPECT_NEAR(table.grad_row(1, j)[m], g[1], 1e-13);
        }
}

TEST(basis, modes_are_l2_orthonormal_under_quadrature) {
    const auto basis = interval_basis(10);
    const auto grid = build_quadrature(basis->domain, 32);
    const BasisTable table(*basis, grid);
    for (std::size_t i = 0; i < basis->size(); ++i)
        for (std::size_t j = i; j < basis->size(); ++j) {
            double s = 0.0;
            for (std::size_t m = 0; m < grid.size(); ++m)
                s += grid.weights[m] * table.row(i)[m] * table.row(j)[m];
            EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
        }
}

TEST(basis, rejects_bad_arguments) {
    EXPECT_THROW(build_basis(Domain::ball(2, 1.0), 4), unsupported_domain);
    EXPECT_THROW(build_basis(Domain::interval(1.0), 0), std::invalid_argument);
}

TEST(field, norm_and_arithmetic) {
    const auto basis = interval_basis(4);
    Field u(basis);
    u.coeffs = {1.0, 0.0, 0.0, 0.0};
    // Single first mode on (0,pi): lambda_1 = 1, so the seminorm is |a_1|.
    EXPECT_DOUBLE_EQ(h_half_norm(u), 1.0);
    Field v(basis);
    v.coeffs = {0.0, 2.0, 0.0, 0.0}; // lambda_2 = 4
    EXPECT_NEAR(h_half_norm(v), 2.0 * std::sqrt(2.0), 1e-15);

    const Field w = axpy(u, 3.0, v);
    EXPECT_DOUBLE_EQ(w.coeffs[0], 1.0);
    EXPECT_DOUBLE_EQ(w.coeffs[1], 6.0);
    const Field s = scale(-2.0, w);
    EXPECT_DOUBLE_EQ(s.coeffs[1], -12.0);
    EXPECT_NEAR(h_half_distance(w, axpy(w, -1.0, w)), h_half_norm(w), 1e-15);
}

TEST(field, half_laplacian_acts_diagonally) {
    const auto basis = interval_basis(5);
    std::mt19937_64 rng(3);
    const Field u = random_field(basis, rng);
    const Field au = apply_half_laplacian(u);
    for (std::size_t j = 0; j < u.coeffs.size(); ++j)
        EXPECT_DOUBLE_EQ(au.coeffs[j], u.coeffs[j] * basis->sqrt_eigenvalues[j]);
}

TEST(field, extension_isometry_closed_form) {
    const auto basis = build_basis(Domain::rectangle(kPi, kPi), 32);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        const Field u = random_field(basis, rng);
        const ExtensionField w = extend(u);
        EXPECT_NEAR(x_norm(w), h_half_norm(u), 1e-12 * h_half_norm(u));
        const Field back = trace(w);
        EXPECT_EQ(back.coeffs, u.coeffs);
    }
}

TEST(field, extension_decays_from_trace_value) {
    const auto basis = interval_basis(6);
    std::mt19937_64 rng(5);
    const Field u = random_field(basis, rng);
    const ExtensionField w = extend(u);
    const double x = 1.2;
    EXPECT_NEAR(extension_value(w, &x, 0.0),
                oracle::eval_interval(u.coeffs, kPi, x), 1e-13);
    // Asymptotically the slowest mode dominates: |w(x,y)| <= C exp(-y).
    EXPECT_LT(std::abs(extension_value(w, &x, 20.0)), 1e-7);
}

TEST(field, cylinder_quadrature_norm_matches_closed_form) {
    const auto basis = build_basis(Domain::rectangle(kPi, kPi), 12);
    const auto grid = build_quadrature(basis->domain, 48);
    const CylinderNormQuadrature qnorm(*basis, grid);
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
        const Field u = random_field(basis, rng);
        const double exact = h_half_norm(u);
        EXPECT_NEAR(qnorm(extend(u)), exact, 1e-8 * exact);
    }
}

TEST(field, cylinder_energy_matches_y_quadrature) {
    // Independent route: integrate |grad w|^2 over the cylinder with Simpson
    // in x and a truncated fine Simpson rule in y.
    const auto basis = interval_basis(3);
    Field u(basis);
    u.coeffs = {0.7, -0.4, 0.2};
    auto integrand = [&](double x, double y) {
        double wy = 0.0, wx = 0.0;
        for (std::size_t j = 0; j < u.coeffs.size(); ++j) {
            const double sj = basis->sqrt_eigenvalues[j];
            const double phi = basis->eval(j, &x);
            double dphi;
            basis->eval_gradient(j, &x, &dphi);
            const double decay = std::exp(-sj * y);
            wy += u.coeffs[j] * (-sj) * phi * decay;
            wx += u.coeffs[j] * dphi * decay;
        }
        return wy * wy + wx * wx;
    };
    const double energy_sq = oracle::simpson2(integrand, 0.0, kPi, 0.0, 40.0, 600, 4000);
    const double exact = h_half_norm(u);
    EXPECT_NEAR(std::sqrt(energy_sq), exact, 1e-6 * exact);
}

TEST(field, project_roundtrips_sampled_values) {
    const auto basis = build_basis(Domain::rectangle(2.0, 1.0), 10);
    const auto grid = build_quadrature(basis->domain, 40);
    std::mt19937_64 rng(17);
    const Field u = random_field(basis, rng);
    const auto values = sample_on_grid(u, grid);
    const Field back = project(values, grid, basis);
    EXPECT_LT(oracle::l2_diff(back.coeffs, u.coeffs), 1e-10);
}

TEST(field, rayleigh_minimum_is_sqrt_lambda1) {
    const auto basis = build_basis(Domain::rectangle(kPi, kPi), 16);
    // lambda_1 = 2 on the pi x pi square; the quotient can never dip below
    // sqrt(lambda_1) and the included first mode attains it.
    EXPECT_NEAR(rayleigh_min(*basis, 200), std::sqrt(2.0), 1e-14);
}

TEST(field, random_field_is_deterministic_per_seed) {
    const auto basis = interval_basis(8);
    std::mt19937_64 a(42), b(42), c(43);
    EXPECT_EQ(random_field(basis, a).coeffs, random_field(basis, b).coeffs);
    EXPECT_NE(random_field(basis, a).coeffs, random_field(basis, c).coeffs);
}

TEST(field, mismatched_bases_rejected) {
    const Field u(interval_basis(4)), v(interval_basis(5));
    EXPECT_THROW(axpy(u, 1.0, v), std::invalid_argument);
    EXPECT_THROW((Field{interval_basis(4), {1.0, 2.0}}), std::invalid_argument);
}
