#include "mound/dipole_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mound/errors.hpp"
#include "mound/marching.hpp"

namespace mound {

RescaledState to_rescaled(const Profile& p) {
    validate(p);
    if (p.x_left != 0.0) throw std::invalid_argument("rescaled state requires a profile starting at x = 0");
    RescaledState s;
    s.heights = p.heights;
    s.heights.front() = 0.0;
    s.heights.back() = 0.0;
    s.x_r = p.x_right;
    s.time = p.time;
    return s;
}

Profile to_profile(const RescaledState& s) {
    return Profile{s.time, 0.0, s.x_r, s.heights};
}

double boundary_speed(const RescaledState& s, const PhysicalParams& params) {
    const std::size_t n = s.cells();
    const double slope = (s.heights[n] - s.heights[n - 1]) / s.dxi();
    return -2.0 * params.kappa1() * slope / s.x_r;
}

double stable_dt(const RescaledState& s, const PhysicalParams& params, double cfl, double dt_max,
                 double height_floor) {
    const double h_max = std::max(*std::max_element(s.heights.begin(), s.heights.end()), height_floor);
    const double dx = s.dxi() * s.x_r;
    return std::min(dt_max, cfl * dx * dx / (4.0 * params.kappa_max() * h_max));
}

RescaledState step_dipole(const RescaledState& s, const PhysicalParams& params, double dt,
                          const DipoleStepOptions& options) {
    const std::size_t n = s.cells();
    const double dxi = s.dxi();
    const auto& u = s.heights;
    const auto& prev = s.previous.empty() ? s.heights : s.previous;

    const double tip_slope = (u[n] - u[n - 1]) / dxi;
    const double scale = dt / (s.x_r * s.x_r);

    RescaledState next;
    next.heights.assign(n + 1, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double prev_d2 = prev[i - 1] * prev[i - 1] - 2.0 * prev[i] * prev[i] + prev[i + 1] * prev[i + 1];
        const double kappa = kappa_select(prev_d2, params);
        const double d2 = (u[i - 1] * u[i - 1] - 2.0 * u[i] * u[i] + u[i + 1] * u[i + 1]) / (dxi * dxi);
        const double du = options.advection == AdvectionStencil::centered ? (u[i + 1] - u[i - 1]) / (2.0 * dxi)
                                                                          : (u[i] - u[i - 1]) / dxi;
        const double xi = static_cast<double>(i) * dxi;
        double value = u[i] + scale * (kappa * d2 - 2.0 * params.kappa1() * xi * du * tip_slope);
        if (value < 0.0) {
            if (value < -options.clip_tol || !std::isfinite(value))
                throw InstabilityError(s.time + dt, "negative height " + std::to_string(value) + " at xi index " +
                                                        std::to_string(i));
            value = 0.0;
        }
        next.heights[i] = value;
    }
    next.previous = u;
    next.x_r = s.x_r + boundary_speed(s, params) * dt;
    next.time = s.time + dt;
    return next;
}

RunOutput run_dipole(const DipoleRunConfig& cfg) {
    if (!(cfg.t_end >= cfg.t_start)) throw std::invalid_argument("t_end must not precede t_start");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");

    InitialCondition ic = cfg.ic;
    ic.offset = 0.0;
    RescaledState state = to_rescaled(make_initial_profile(ic, cfg.n_cells, cfg.t_start));
    DipoleStepOptions options;
    options.advection = cfg.advection;
    options.clip_tol = 1e-12 * std::max(ic.amplitude, 1e-300);

    const Schedule schedule(cfg.t_start, cfg.t_end, cfg.series_samples, cfg.snapshot_times);
    RunOutput out;

    auto record = [&](const RescaledState& st) {
        const Profile p = to_profile(st);
        if (schedule.is_series(st.time)) out.series.push_back(make_record(p));
        if (schedule.is_snapshot(st.time)) out.snapshots.push_back(p);
    };

    record(state);
    for (double target : schedule.stops()) {
        if (target <= state.time) continue;
        while (state.time < target) {
            double dt = stable_dt(state, cfg.params, cfg.cfl, cfg.dt_max);
            const bool last = state.time + dt >= target;
            if (last) dt = target - state.time;
            state = step_dipole(state, cfg.params, dt, options);
            if (last) state.time = target;
            ++out.steps;
        }
        record(state);
    }
    return out;
}

}  // namespace mound
