#include <gtest/gtest.h>

#include <cmath>

#include "mound/analysis.hpp"
#include "mound/errors.hpp"
#include "mound/front_solver.hpp"
#include "mound/similarity.hpp"

using namespace mound;

namespace {

/// Wet points 3..7 on a dx = 0.1 grid, fronts at 0.25 and 0.76.
FrontState five_wet() {
    FrontState s;
    s.origin = 0.0;
    s.dx = 0.1;
    s.u = {0.0, 0.0, 0.0, 0.2, 0.5, 0.6, 0.5, 0.3, 0.0, 0.0, 0.0};
    s.previous = s.u;
    s.first = 3;
    s.last = 7;
    s.x_l = 0.25;
    s.x_r = 0.76;
    s.time = 1.0;
    return s;
}

struct Validation {
    DrainageRunOutput out;
    SimilarityErrors err;
};

Validation validate_run(std::size_t n) {
    const SimilarityProfile sim = drainage_similarity(0.2);
    DrainageRunConfig c;
    c.grid = {0.0, 2.0, n};
    c.t_start = 1.0;
    c.t_end = 10.0;
    c.snapshot_times = {1.0, 2.0, 5.0, 10.0};
    const FrontState init = make_front_state([&](double x) { return eval_similarity(sim, x, 1.0); }, sim.x_left(1.0),
                                             sim.x_right(1.0), c.grid, 1.0);
    Validation v;
    v.out = run_drainage(c, init, DrainageSpec::law([&](double t) { return sim.normalized_flux(t); }));
    v.err = similarity_error(v.out, sim);
    return v;
}

const Validation& coarse() {
    static const Validation v = validate_run(400);
    return v;
}

const Validation& fine() {
    static const Validation v = validate_run(800);
    return v;
}

FloodDrainOutput flood(double multiplier) {
    FloodDrainConfig c;
    c.run.grid = {0.0, 5.0, 200};
    c.run.t_start = 0.1;
    c.run.t_end = 20.0;
    c.multiplier = multiplier;
    return run_flood_then_drain(c);
}

}  // namespace

TEST(FrontStep, HandEvaluatedPointRule) {
    const auto p = PhysicalParams::from_ratio(1.0, 0.5);  // kappa2 = 2
    FrontStepOptions o;
    o.left_cell = LeftCellRule::point;
    const FrontState n = step_front(five_wet(), p, DrainageSpec::constant(0.8), 1e-4, o);

    // left point: 0.2 + 2e-4 / 0.15 * 2 * ((0.25 - 0.04) / 0.1 - 0.8)
    EXPECT_NEAR(n.u[3], 0.2 + 2e-4 / 0.15 * 2.0 * 1.3, 1e-15);
    // interior, all falling (kappa2): second differences -0.1, -0.22, -0.05
    EXPECT_NEAR(n.u[4], 0.498, 1e-15);
    EXPECT_NEAR(n.u[5], 0.5956, 1e-15);
    EXPECT_NEAR(n.u[6], 0.499, 1e-15);
    // right point: 0.3 + 2e-4 / 0.16 * ((0.25 - 0.09) / 0.1 - 0.09 / 0.06)
    EXPECT_NEAR(n.u[7], 0.300125, 1e-15);

    EXPECT_NEAR(n.x_l, 0.3 - n.u[3] * n.u[3] / 0.8, 1e-15);
    EXPECT_NEAR(n.x_r, 0.7 + 0.300125 * 0.1 / (0.499 - 0.300125), 1e-12);
    // the right front passed grid point 8, which joins at zero height
    EXPECT_EQ(n.last, 8u);
    EXPECT_EQ(n.u[8], 0.0);
    EXPECT_EQ(n.first, 3u);
    EXPECT_EQ(n.previous, five_wet().u);
}

TEST(FrontStep, ConservativeLeftCellBalancesFlux) {
    const auto p = PhysicalParams::from_ratio(1.0, 0.5);
    const FrontState s = five_wet();
    const FrontState n = step_front(s, p, DrainageSpec::constant(0.8), 1e-4);
    const double target = left_cell_mass(0.2, 0.5, 0.8, 0.1) + 1e-4 * 2.0 * ((0.25 - 0.04) / 0.1 - 0.8);
    EXPECT_NEAR(left_cell_mass(n.u[3], n.u[4], 0.8, 0.1), target, 1e-15);
    EXPECT_NEAR(n.u[4], 0.498, 1e-15);
}

TEST(FrontStep, LeftCellMass) {
    // sqrt profile up to the wet point, then linear; front offset capped at dx
    EXPECT_NEAR(left_cell_mass(0.2, 0.5, 0.8, 0.1), 2.0 / 3.0 * 0.2 * 0.05 + 0.1 * (0.6 + 0.5) / 8.0, 1e-16);
    EXPECT_NEAR(left_cell_mass(1.0, 1.0, 0.5, 0.1), 2.0 / 3.0 * 0.1 + 0.1 * 4.0 / 8.0, 1e-16);
    EXPECT_EQ(left_cell_mass(0.0, 0.0, 1.0, 0.1), 0.0);
    EXPECT_LT(left_cell_mass(0.1, 0.3, 1.0, 0.1), left_cell_mass(0.11, 0.3, 1.0, 0.1));
}

TEST(FrontStep, ZeroStateStaysDry) {
    FrontState s = five_wet();
    for (double& u : s.u) u = 0.0;
    s.previous = s.u;
    const auto p = PhysicalParams::from_ratio(1.0, 1.0);
    const FrontState n = step_front(s, p, DrainageSpec::free_boundary(), 1e-3);
    for (double u : n.u) EXPECT_EQ(u, 0.0);
}

TEST(LeftBoundary, Examples) {
    FrontState s;
    s.origin = 0.0;
    s.dx = 0.25;
    s.u.assign(12, 0.0);
    s.first = 4;
    s.last = 8;
    s.x_l = 0.8;
    s.u[4] = 0.1;
    EXPECT_NEAR(update_left_boundary(s, 0.05), 0.8, 1e-15);
    EXPECT_NEAR(update_left_boundary(s, 1e300), 1.0, 1e-15);
    s.u[4] = 0.0;
    EXPECT_EQ(update_left_boundary(s, 0.05), 1.0);
    EXPECT_THROW(update_left_boundary(s, 0.0), std::invalid_argument);
}

TEST(RightBoundary, Examples) {
    FrontState s;
    s.origin = 0.0;
    s.dx = 0.1;
    s.u.assign(20, 0.0);
    s.first = 5;
    s.last = 11;
    s.x_r = 1.15;
    for (std::size_t i = 5; i < 10; ++i) s.u[i] = 0.5;
    s.u[10] = 0.2;
    s.u[11] = 0.1;
    EXPECT_NEAR(update_right_boundary(s), 1.2, 1e-14);
    s.u[10] = 0.1;
    EXPECT_NEAR(update_right_boundary(s), 1.25, 1e-14);
}

TEST(RightBoundary, ExactProfileExtrapolation) {
    const SimilarityProfile sim = drainage_similarity(0.2);
    double previous = 0.0;
    for (std::size_t n : {200, 400, 800}) {
        const FrontState s = make_front_state([&](double x) { return eval_similarity(sim, x, 2.0); },
                                              sim.x_left(2.0), sim.x_right(2.0), FrontGrid{0.0, 2.0, n}, 2.0);
        const double err = std::abs(update_right_boundary(s) - sim.x_right(2.0));
        EXPECT_LT(err, 2.0 * s.dx * s.dx);
        if (previous > 0.0) EXPECT_LT(err, previous);
        previous = err;
    }
}

TEST(StableDt, LeftBoundOnlyForFreeEdge) {
    const auto p = PhysicalParams::from_ratio(1.0, 1.0);
    FrontState s = five_wet();
    s.x_l = 0.299;  // tiny dx_l
    const double forced = stable_dt(s, p, DrainageSpec::constant(0.5), 0.25, 1.0);
    const double free = stable_dt(s, p, DrainageSpec::free_boundary(), 0.25, 1.0);
    EXPECT_LT(free, forced);
    EXPECT_NEAR(free, 0.25 * 0.1 * 0.001 / (4.0 * 0.2), 1e-15);
    EXPECT_EQ(stable_dt(s, p, DrainageSpec::constant(0.5), 0.25, 1e-9), 1e-9);
}

TEST(FrontState, Construction) {
    const FrontGrid g{0.0, 4.0, 40};
    EXPECT_THROW(make_front_state([](double) { return 1.0; }, 1.0, 0.5, g, 0.0), std::invalid_argument);
    EXPECT_THROW(make_front_state([](double) { return 1.0; }, 1.0, 4.5, g, 0.0), std::invalid_argument);
    EXPECT_THROW(make_front_state([](double) { return 1.0; }, 0.2, 1.0, g, 0.0, true), std::invalid_argument);
    const FrontState s = make_front_state([](double) { return 1.0; }, 1.05, 1.95, g, 0.0);
    EXPECT_EQ(s.first, 11u);
    EXPECT_EQ(s.last, 19u);
    EXPECT_NEAR(s.dx_l(), 0.05, 1e-12);
    EXPECT_EQ(s.u[10], 0.0);
    EXPECT_EQ(s.u[20], 0.0);
}

TEST(FreeDrainage, MirrorSymmetry) {
    DrainageRunConfig c;
    c.grid = {0.0, 8.0, 160};
    c.t_end = 2.0;
    c.snapshot_times = {0.5, 2.0};
    const InitialCondition ic{InitialShape::parabolic, 1.0, 2.0, 3.0};
    const FrontState init = make_front_state(ic, 3.0, 5.0, c.grid, 0.0);
    const DrainageRunOutput out = run_drainage(c, init, DrainageSpec::free_boundary());
    for (const FrontState& s : out.states) {
        EXPECT_NEAR(s.x_l + s.x_r, 8.0, 1e-9);
        for (std::size_t i = 0; i < s.u.size(); ++i) EXPECT_NEAR(s.u[i], s.u[s.u.size() - 1 - i], 1e-12);
    }
}

TEST(FreeDrainage, MassConservedAndFrontsAdvance) {
    DrainageRunConfig c;
    c.grid = {0.0, 8.0, 400};
    c.t_end = 10.0;
    const InitialCondition ic{InitialShape::parabolic, 1.0, 1.0, 3.5};
    const DrainageRunOutput out = run_drainage(c, make_front_state(ic, 3.5, 4.5, c.grid, 0.0),
                                               DrainageSpec::free_boundary());
    const double m0 = out.series.front().mass;
    for (const auto& r : out.series) EXPECT_LE(std::abs(r.mass - m0) / m0, 0.01);
    EXPECT_LT(out.series.back().x_left, 3.0);
    EXPECT_GT(out.series.back().x_right, 5.0);
    EXPECT_FALSE(out.extinction_time.has_value());
}

TEST(ForcedDrainage, MassNonincreasingAndExtinct) {
    DrainageRunConfig c;
    c.grid = {0.0, 8.0, 400};
    c.t_end = 10.0;
    c.snapshot_times = {0.5, 1.0};
    const InitialCondition ic{InitialShape::parabolic, 1.0, 1.0, 3.5};
    const DrainageRunOutput out = run_drainage(c, make_front_state(ic, 3.5, 4.5, c.grid, 0.0),
                                               DrainageSpec::constant(0.5));
    ASSERT_TRUE(out.extinction_time.has_value());
    EXPECT_GT(*out.extinction_time, 0.0);
    for (std::size_t k = 1; k < out.series.size(); ++k) EXPECT_LE(out.series[k].mass, out.series[k - 1].mass);
    for (const FrontState& s : out.states) {
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            if (i < s.first || i > s.last) {
                EXPECT_EQ(s.u[i], 0.0);
            } else {
                EXPECT_GE(s.u[i], 0.0);
            }
        }
    }
}

TEST(ForcedDrainage, FrontHittingGridEdgeIsReported) {
    DrainageRunConfig c;
    c.grid = {0.0, 1.2, 60};
    c.t_end = 50.0;
    const InitialCondition ic{InitialShape::parabolic, 1.0, 1.0, 0.1};
    EXPECT_THROW(run_drainage(c, make_front_state(ic, 0.1, 1.1, c.grid, 0.0), DrainageSpec::free_boundary()),
                 InstabilityError);
}

TEST(SimilarityValidation, StartsOnTheExactSolution) {
    const auto& err = coarse().err;
    ASSERT_EQ(err.snapshot_times.front(), 1.0);
    EXPECT_LE(err.sup_h_rel_err.front(), 1e-3);
}

TEST(SimilarityValidation, FrontSlopesAndErrors) {
    const auto& v = coarse();
    EXPECT_NEAR(fit_front(v.out.series).exponent, 0.2, 0.01);
    std::vector<double> t, xl;
    for (const auto& r : v.out.series) {
        t.push_back(r.time);
        xl.push_back(r.x_left);
    }
    EXPECT_NEAR(fit_powerlaw(t, xl).exponent, 0.2, 0.01);
    EXPECT_LE(v.err.max_xl(), 0.02);
    EXPECT_LE(v.err.max_xr(), 0.02);
    EXPECT_FALSE(v.out.extinction_time.has_value());
}

TEST(SimilarityValidation, SupErrorWithinTwoPercent) {
    const auto& err = coarse().err;
    ASSERT_EQ(err.snapshot_times.size(), 4u);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_LE(err.sup_h_rel_err[k], 0.02) << "t = " << err.snapshot_times[k];
}

TEST(SimilarityValidation, SupErrorHalvesWithGrid) {
    const auto& a = coarse().err;
    const auto& b = fine().err;
    ASSERT_EQ(a.snapshot_times, b.snapshot_times);
    for (std::size_t k = 1; k < 4; ++k)
        EXPECT_GE(a.sup_h_rel_err[k] / b.sup_h_rel_err[k], 1.5)
            << "t = " << a.snapshot_times[k] << ": " << a.sup_h_rel_err[k] << " -> " << b.sup_h_rel_err[k];
}

TEST(SimilarityValidation, AllErrorsDecreaseWithGrid) {
    const auto& a = coarse().err;
    const auto& b = fine().err;
    EXPECT_LT(b.max_sup_h(), a.max_sup_h());
    EXPECT_LT(b.max_xl(), a.max_xl());
    EXPECT_LT(b.max_xr(), a.max_xr());
}

TEST(FloodThenDrain, Extinguishes) {
    const FloodDrainOutput two = flood(2.0);
    ASSERT_TRUE(two.extinction_time.has_value());
    EXPECT_GT(*two.extinction_time, 1.0);
    EXPECT_EQ(two.mass_increases, 0u);
    EXPECT_NEAR(two.q0, 2.0 * two.natural_flux, 1e-15);
    const FloodDrainOutput four = flood(4.0);
    ASSERT_TRUE(four.extinction_time.has_value());
    EXPECT_LT(*four.extinction_time, *two.extinction_time);
    EXPECT_FALSE(flood(0.0).extinction_time.has_value());
}
