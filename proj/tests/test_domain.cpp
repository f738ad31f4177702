#include <gtest/gtest.h>

#include <halflap/domain.hpp>

#include <cmath>
#include <numbers>

using halflap::Domain;
using halflap::unit_ball_volume;

TEST(domain, unit_ball_volume_known_values) {
    EXPECT_DOUBLE_EQ(unit_ball_volume(1), 2.0);
    EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-15);
    EXPECT_NEAR(unit_ball_volume(3), 4.0 / 3.0 * std::numbers::pi, 1e-14);
    EXPECT_NEAR(unit_ball_volume(4), std::numbers::pi * std::numbers::pi / 2.0, 1e-14);
    EXPECT_THROW(unit_ball_volume(0), std::invalid_argument);
}

TEST(domain, interval_geometry) {
    const Domain d = Domain::interval(3.0);
    EXPECT_EQ(d.dim, 1);
    EXPECT_DOUBLE_EQ(d.measure(), 3.0);
    EXPECT_DOUBLE_EQ(d.inradius(), 1.5);
    EXPECT_DOUBLE_EQ(d.center()[0], 1.5);
    EXPECT_TRUE(d.has_spectral_basis());
    EXPECT_FALSE(d.meets_dimension_hypothesis());
    EXPECT_THROW(Domain::interval(0.0), std::invalid_argument);
    EXPECT_THROW(Domain::interval(-1.0), std::invalid_argument);
}

TEST(domain, rectangle_geometry) {
    const Domain d = Domain::rectangle(2.0, 5.0);
    EXPECT_EQ(d.dim, 2);
    EXPECT_DOUBLE_EQ(d.measure(), 10.0);
    EXPECT_DOUBLE_EQ(d.inradius(), 1.0);
    EXPECT_DOUBLE_EQ(d.center()[0], 1.0);
    EXPECT_DOUBLE_EQ(d.center()[1], 2.5);
    EXPECT_TRUE(d.has_spectral_basis());
    EXPECT_TRUE(d.meets_dimension_hypothesis());
    EXPECT_THROW(Domain::rectangle(1.0, 0.0), std::invalid_argument);
}

TEST(domain, ball_geometry) {
    const Domain d = Domain::ball(3, 2.0);
    EXPECT_EQ(d.dim, 3);
    EXPECT_NEAR(d.measure(), 4.0 / 3.0 * std::numbers::pi * 8.0, 1e-12);
    EXPECT_DOUBLE_EQ(d.inradius(), 2.0);
    EXPECT_EQ(d.center(), (std::vector<double>{0.0, 0.0, 0.0}));
    EXPECT_FALSE(d.has_spectral_basis());
    EXPECT_TRUE(d.meets_dimension_hypothesis());
    EXPECT_THROW(Domain::ball(3, -1.0), std::invalid_argument);
    EXPECT_THROW(Domain::ball(0, 1.0), std::invalid_argument);
}

TEST(domain, contains_ball_rectangle) {
    const Domain d = Domain::rectangle(2.0, 1.0);
    const double c[2] = {1.0, 0.5};
    EXPECT_TRUE(d.contains_ball(std::span(c, 2), 0.5));
    EXPECT_FALSE(d.contains_ball(std::span(c, 2), 0.51));
    const double off[2] = {0.3, 0.5};
    EXPECT_TRUE(d.contains_ball(std::span(off, 2), 0.3));
    EXPECT_FALSE(d.contains_ball(std::span(off, 2), 0.4));
    EXPECT_FALSE(d.contains_ball(std::span(c, 2), 0.0)); // degenerate radius
    const double one[1] = {1.0};
    EXPECT_FALSE(d.contains_ball(std::span(one, 1), 0.1)); // dimension mismatch
}

TEST(domain, contains_ball_ball) {
    const Domain d = Domain::ball(2, 1.0);
    const double c[2] = {0.3, 0.4}; // |c| = 0.5
    EXPECT_TRUE(d.contains_ball(std::span(c, 2), 0.5));
    EXPECT_FALSE(d.contains_ball(std::span(c, 2), 0.501));
}

TEST(domain, equality_and_describe) {
    EXPECT_EQ(Domain::interval(2.0), Domain::interval(2.0));
    EXPECT_FALSE(Domain::interval(2.0) == Domain::interval(3.0));
    EXPECT_FALSE(Domain::interval(2.0) == Domain::ball(1, 1.0));
    EXPECT_NE(Domain::rectangle(1.0, 2.0).describe().find("rectangle"), std::string::npos);
    EXPECT_NE(Domain::ball(3, 1.0).describe().find("n=3"), std::string::npos);
}
