#pragma once
//
// Fixed-grid front tracking for the forced-drainage problem.
//
// Heights live on a uniform grid; the fronts x_l and x_r sit between grid
// points. The wet points adjacent to each front (u_l, u_r) get dedicated
// updates that fold in the boundary data at the front:
//
//   u_l += 2 dt / (dx + dx_l) kappa2 [(u_{l+1}^2 - u_l^2) / dx - q]
//   u_r += 2 dt / (dx + dx_r) kappa1 [(u_{r-1}^2 - u_r^2) / dx - u_r^2 / dx_r]
//
// Under drainage the left front is placed where h^2, extrapolated with the
// prescribed slope q, reaches zero; the right front by linear extrapolation
// of h through the last two wet points.
//
// The left edge can alternatively be pinned at the first grid point
// (h = 0 there, natural outflow) or left free (zero flux, mirrored right
// front treatment).

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mound/core.hpp"

namespace mound {

struct FrontGrid {
    double origin = 0.0;
    double length = 4.0;
    std::size_t n_cells = 400;

    double dx() const noexcept { return length / static_cast<double>(n_cells); }
};

struct FrontState {
    double origin = 0.0;
    double dx = 0.01;
    /// All grid values; exactly zero outside [first, last].
    std::vector<double> u;
    std::vector<double> previous;
    std::size_t first = 0;
    std::size_t last = 0;
    double x_l = 0.0;
    double x_r = 0.0;
    /// Left edge held at grid point 0 with h = 0.
    bool pinned_left = false;
    double time = 0.0;

    double x(std::size_t i) const noexcept { return origin + dx * static_cast<double>(i); }
    double dx_l() const noexcept { return x(first) - x_l; }
    double dx_r() const noexcept { return x_r - x(last); }
    std::size_t wet_count() const noexcept { return u.empty() || last < first ? 0 : last - first + 1; }
    double max_height() const;
};

/// Samples h on the grid strictly between the fronts. For a pinned left edge
/// x_left must equal grid.origin.
FrontState make_front_state(const std::function<double(double)>& h, double x_left, double x_right,
                            const FrontGrid& grid, double time, bool pinned_left = false);
FrontState make_front_state(const Profile& p, const FrontGrid& grid, bool pinned_left = false);

/// Polyline (x_l, 0), wet points, (x_r, 0).
struct FrontPolyline {
    std::vector<double> x;
    std::vector<double> h;
};
FrontPolyline polyline(const FrontState& s);

/// Resamples the polyline onto a uniform profile over [x_l, x_r].
Profile to_profile(const FrontState& s);
double mass(const FrontState& s);
double dipole_moment(const FrontState& s);
/// One-sided second-order d(h^2)/dx at the left front from (x_l, 0) and the
/// first two wet points.
double left_normalized_flux(const FrontState& s);
SeriesRecord make_record(const FrontState& s);

/// Boundary flux prescribed at the left front, in normalized units d(h^2)/dx.
class DrainageSpec {
public:
    enum class Mode { free, constant, law };

    static DrainageSpec free_boundary() { return DrainageSpec(Mode::free, 0.0, {}); }
    static DrainageSpec constant(double q0);
    static DrainageSpec law(std::function<double(double)> q);

    Mode mode() const noexcept { return mode_; }
    /// Flux at time t; zero for a free boundary.
    double at(double t) const;

private:
    DrainageSpec(Mode mode, double q0, std::function<double(double)> q)
        : mode_(mode), q0_(q0), law_(std::move(q)) {}

    Mode mode_;
    double q0_;
    std::function<double(double)> law_;
};

enum class ActivationRule {
    zero,        ///< a newly wet grid point starts at h = 0
    interpolate  ///< it starts on the line from the last wet value to the front
};

/// Update of the left wet point under forced drainage.
enum class LeftCellRule {
    point,        ///< explicit update of u_l over a cell of width (dx + dx_l) / 2
    conservative  ///< evolve the mass of [x_l, x_l+dx/2 past the wet point] and rebuild u_l from it
};

struct FrontStepOptions {
    double clip_tol = 1e-12;
    ActivationRule activation = ActivationRule::zero;
    LeftCellRule left_cell = LeftCellRule::conservative;
};

/// Water held between x_l and half a cell past the first wet point when h^2
/// rises from the front with slope q (front offset capped at dx) and h is
/// linear beyond the wet point towards its neighbor value.
double left_cell_mass(double u_l, double u_next, double q, double dx);

/// New left front for forced drainage: x(first) - u_l^2 / q, kept within one
/// cell of the wet point and of the previous front. `s` carries the fresh
/// heights and the previous front position.
double update_left_boundary(const FrontState& s, double q);

/// New right front by linear extrapolation of the last two wet heights, moved
/// at most one cell from the previous front and never behind the last wet
/// point. With a single wet point the front sits half a cell past it.
double update_right_boundary(const FrontState& s);

/// Extrapolated left front for a free (zero-flux) boundary.
double update_free_left_boundary(const FrontState& s);

/// Explicit bound cfl dx^2 / (4 kappa_max max h), tightened near a front
/// whose stencil uses the shorter spacing dx_r (or dx_l on a free left edge).
double stable_dt(const FrontState& s, const PhysicalParams& params, const DrainageSpec& q, double cfl,
                 double dt_max = 1.0);

/// One explicit step. Throws InstabilityError on negative interior heights or
/// when a front runs into the edge of the grid.
FrontState step_front(const FrontState& s, const PhysicalParams& params, const DrainageSpec& q, double dt,
                      const FrontStepOptions& options = {});

struct DrainageRunConfig {
    PhysicalParams params = PhysicalParams::from_ratio(1.0, 1.0);
    FrontGrid grid{};
    double cfl = 0.25;
    double t_start = 0.0;
    double t_end = 10.0;
    double dt_max = 1.0;
    std::size_t series_samples = 200;
    std::vector<double> snapshot_times;
    /// Extinction once mass drops below this fraction of the initial mass.
    double mass_floor_fraction = 1e-6;
    FrontStepOptions step{};
};

struct DrainageRunOutput : RunOutput {
    /// Raw grid states at the snapshot times.
    std::vector<FrontState> states;
};

DrainageRunOutput run_drainage(const DrainageRunConfig& cfg, const FrontState& initial, const DrainageSpec& q);

struct FloodDrainConfig {
    DrainageRunConfig run{};
    InitialCondition ic{};
    /// Time at which forced drainage starts.
    double t_switch = 1.0;
    /// q0 = multiplier * natural outflow flux at t_switch; 0 keeps natural outflow.
    double multiplier = 2.0;
};

struct FloodDrainOutput : DrainageRunOutput {
    double natural_flux = 0.0;
    double q0 = 0.0;
    /// Drainage-phase steps whose mass exceeded the mass before the step.
    std::size_t mass_increases = 0;
    /// Largest such excess relative to the mass before the step.
    double max_mass_increase = 0.0;
};

FloodDrainOutput run_flood_then_drain(const FloodDrainConfig& cfg);

}  // namespace mound
