#pragma once
//
// Natural-outflow problem (h(0,t) = 0, zero-flux free front x_r) solved on
// the stretched coordinate xi = x / x_r(t), which pins the front at xi = 1.
//
// In xi the equation d_t h = kappa d_xx h^2 becomes
//
//   d_t H = [kappa d_xixi H^2 - 2 kappa1 xi d_xi H(1) d_xi H] / x_r^2,
//
// and the front advances with v = -2 kappa1 d_x h(x_r), the speed of a
// nearly stationary tip. Time stepping is explicit (FTCS); the diffusivity
// of each cell is picked from the sign of the second difference of H^2 on
// the previous time level.

#include <cstddef>
#include <vector>

#include "mound/core.hpp"

namespace mound {

struct RescaledState {
    /// H on the uniform xi-grid over [0, 1], both ends included.
    std::vector<double> heights;
    /// Heights on the previous time level; empty before the first step.
    std::vector<double> previous;
    double x_r = 1.0;
    double time = 0.0;

    std::size_t cells() const noexcept { return heights.size() - 1; }
    double dxi() const noexcept { return 1.0 / static_cast<double>(heights.size() - 1); }
};

/// Maps a profile on [0, x_r] onto the xi-grid. Requires x_left == 0.
RescaledState to_rescaled(const Profile& p);
Profile to_profile(const RescaledState& s);

enum class AdvectionStencil {
    centered,  ///< (u_{i+1} - u_{i-1}) / (2 dxi); conserves the dipole moment
    one_sided  ///< (u_i - u_{i-1}) / dxi
};

struct DipoleStepOptions {
    AdvectionStencil advection = AdvectionStencil::centered;
    /// Absolute magnitude below which negative heights are clipped to zero.
    double clip_tol = 1e-12;
};

/// Front speed v = -2 kappa1 (H_N - H_{N-1}) / (dxi x_r).
double boundary_speed(const RescaledState& s, const PhysicalParams& params);

/// Explicit step bound cfl (dxi x_r)^2 / (4 kappa_max max(H, floor)), capped at dt_max.
double stable_dt(const RescaledState& s, const PhysicalParams& params, double cfl,
                 double dt_max = 1.0, double height_floor = 1e-300);

/// Advances one explicit step. Throws InstabilityError when a height falls
/// below -clip_tol.
RescaledState step_dipole(const RescaledState& s, const PhysicalParams& params, double dt,
                          const DipoleStepOptions& options = {});

struct DipoleRunConfig {
    PhysicalParams params = PhysicalParams::from_ratio(1.0, 1.0);
    InitialCondition ic{};
    std::size_t n_cells = 400;
    double cfl = 0.25;
    double t_start = 0.1;
    double t_end = 100.0;
    double dt_max = 1.0;
    std::size_t series_samples = 200;
    std::vector<double> snapshot_times;
    AdvectionStencil advection = AdvectionStencil::centered;
};

/// Runs from the initial bump (left edge pinned at x = 0) to t_end. Series
/// rows land exactly on sample_times(t_start, t_end, series_samples) and
/// snapshots exactly on the requested times inside [t_start, t_end].
RunOutput run_dipole(const DipoleRunConfig& cfg);

}  // namespace mound
