#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mound/core.hpp"

using namespace mound;

namespace {

Profile hat(std::size_t n) {
    Profile p{0.0, 0.0, 2.0, std::vector<double>(n + 1)};
    for (std::size_t i = 0; i <= n; ++i) p.heights[i] = 1.0 - std::abs(p.x_at(i) - 1.0);
    return p;
}

Profile sine(std::size_t n) {
    Profile p{0.0, 0.0, M_PI, std::vector<double>(n + 1)};
    for (std::size_t i = 0; i <= n; ++i) p.heights[i] = std::sin(p.x_at(i));
    return p;
}

}  // namespace

TEST(PhysicalParams, RatioAndDeltaAgree) {
    const auto p = PhysicalParams::from_delta(2.0, 0.3, 0.4);
    EXPECT_DOUBLE_EQ(p.kappa2() * (1.0 - p.delta()), p.kappa1());
    EXPECT_DOUBLE_EQ(p.ratio(), 0.7);
    EXPECT_DOUBLE_EQ(p.porosity(), 0.4);
    const auto q = PhysicalParams::from_ratio(2.0, 0.7);
    EXPECT_DOUBLE_EQ(q.kappa2(), 2.0 / 0.7);
    EXPECT_DOUBLE_EQ(q.kappa_max(), q.kappa2());
}

TEST(PhysicalParams, RejectsOutOfRange) {
    EXPECT_THROW(PhysicalParams::from_ratio(1.0, 1.5), std::invalid_argument);
    EXPECT_THROW(PhysicalParams::from_ratio(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(PhysicalParams::from_delta(-1.0, 0.2), std::invalid_argument);
}

TEST(InitialProfile, ParabolicBump) {
    const Profile p = make_initial_profile({InitialShape::parabolic, 1.0, 1.0, 0.0}, 100);
    EXPECT_EQ(p.size(), 101u);
    EXPECT_EQ(p.heights.front(), 0.0);
    EXPECT_EQ(p.heights.back(), 0.0);
    EXPECT_DOUBLE_EQ(p.heights[50], 1.0);
    EXPECT_DOUBLE_EQ(p.max_height(), 1.0);
    EXPECT_DOUBLE_EQ(p.x_at(50), 0.5);
}

TEST(InitialProfile, ZeroAmplitude) {
    const Profile p = make_initial_profile({InitialShape::cosine, 0.0, 2.0, 1.0}, 40);
    for (double h : p.heights) EXPECT_EQ(h, 0.0);
    EXPECT_EQ(mass(p), 0.0);
    EXPECT_EQ(dipole_moment(p), 0.0);
}

TEST(Integrals, ParabolaMass) {
    const Profile p = make_initial_profile({}, 200);
    EXPECT_NEAR(mass(p), 2.0 / 3.0, 1e-4);
}

TEST(Integrals, HatMassAndMoment) {
    const Profile p = hat(400);
    EXPECT_NEAR(mass(p), 1.0, 1e-12);
    // x h is piecewise quadratic; the trapezoid error is dx^2 / 6 over the two pieces
    EXPECT_NEAR(dipole_moment(p), 1.0, 1e-4);
}

TEST(Integrals, SecondOrderConvergence) {
    // int_0^pi sin = 2, int_0^pi x sin = pi
    const double e1 = std::abs(mass(sine(50)) - 2.0);
    const double e2 = std::abs(mass(sine(100)) - 2.0);
    EXPECT_NEAR(e1 / e2, 4.0, 0.05);
    const double d1 = std::abs(dipole_moment(sine(50)) - M_PI);
    const double d2 = std::abs(dipole_moment(sine(100)) - M_PI);
    EXPECT_NEAR(d1 / d2, 4.0, 0.05);
}

TEST(Integrals, LinearInHeights) {
    Profile p = sine(64);
    const double m = mass(p);
    const double q = dipole_moment(p);
    for (double& h : p.heights) h *= 2.5;
    EXPECT_NEAR(mass(p), 2.5 * m, 1e-14);
    EXPECT_NEAR(dipole_moment(p), 2.5 * q, 1e-14);
}

TEST(Integrals, ShiftIncreasesMoment) {
    const Profile a = make_initial_profile({InitialShape::parabolic, 1.0, 1.0, 0.0}, 100);
    const Profile b = make_initial_profile({InitialShape::parabolic, 1.0, 1.0, 0.5}, 100);
    EXPECT_NEAR(mass(a), mass(b), 1e-12);
    EXPECT_GT(dipole_moment(b), dipole_moment(a));
}

TEST(Integrals, NonUniformMatchesUniform) {
    const Profile p = sine(32);
    std::vector<double> x(p.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = p.x_at(i);
    EXPECT_NEAR(mass(x, p.heights), mass(p), 1e-14);
    EXPECT_NEAR(dipole_moment(x, p.heights), dipole_moment(p), 1e-14);
}

TEST(KappaSelect, SignPicksBranch) {
    const auto p = PhysicalParams::from_ratio(1.0, 0.5);
    EXPECT_EQ(kappa_select(1.0, p), p.kappa1());
    EXPECT_EQ(kappa_select(-1.0, p), p.kappa2());
    EXPECT_EQ(kappa_select(0.0, p), p.kappa1());
    EXPECT_EQ(kappa_select(-0.0, p), p.kappa1());
    for (double v : {1e-300, 3.0, 1e10}) EXPECT_NE(kappa_select(v, p), kappa_select(-v, p));
}

TEST(LeftFlux, SquareRootProfile) {
    Profile p{0.0, 0.0, 1.0, std::vector<double>(201)};
    for (std::size_t i = 0; i < p.size(); ++i) p.heights[i] = std::sqrt(p.x_at(i));
    EXPECT_NEAR(left_normalized_flux(p), 1.0, 1e-9);
    Profile zero{0.0, 0.0, 1.0, std::vector<double>(11, 0.0)};
    EXPECT_EQ(left_normalized_flux(zero), 0.0);
}

TEST(ProfileOps, InterpolateAndValidate) {
    const Profile p = hat(4);
    EXPECT_DOUBLE_EQ(p.interpolate(0.25), 0.25);
    EXPECT_EQ(p.interpolate(-0.1), 0.0);
    EXPECT_EQ(p.interpolate(2.1), 0.0);
    Profile bad = p;
    bad.heights[2] = -1.0;
    EXPECT_THROW(validate(bad), std::invalid_argument);
    bad = p;
    bad.x_right = bad.x_left;
    EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(SampleTimes, LogAndLinear) {
    const auto lg = sample_times(0.1, 100.0, 4);
    ASSERT_EQ(lg.size(), 4u);
    EXPECT_EQ(lg.front(), 0.1);
    EXPECT_EQ(lg.back(), 100.0);
    EXPECT_NEAR(lg[1], 1.0, 1e-12);
    const auto lin = sample_times(0.0, 3.0, 4);
    EXPECT_NEAR(lin[1], 1.0, 1e-15);
    EXPECT_EQ(lin.back(), 3.0);
}

TEST(Shapes, NamesRoundTrip) {
    for (auto s : {InitialShape::parabolic, InitialShape::cosine}) EXPECT_EQ(parse_initial_shape(to_string(s)), s);
    EXPECT_THROW(parse_initial_shape("gaussian"), std::invalid_argument);
}
