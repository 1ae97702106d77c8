#include "mound/front_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "mound/errors.hpp"
#include "mound/marching.hpp"

namespace mound {

namespace {

double sq(double v) { return v * v; }

void check_height(double value, double clip_tol, double time, std::size_t i) {
    if (!std::isfinite(value) || value < -clip_tol)
        throw InstabilityError(time, "negative height " + std::to_string(value) + " at grid index " + std::to_string(i));
}

bool is_forced(const DrainageSpec& q, double t) {
    return q.mode() != DrainageSpec::Mode::free && q.at(t) > 0.0;
}

double activation_value(const FrontState& s, std::size_t from, std::size_t to, double front, ActivationRule rule) {
    if (rule == ActivationRule::zero) return 0.0;
    const double span = std::abs(front - s.x(from));
    if (span <= 0.0) return 0.0;
    return s.u[from] * std::abs(front - s.x(to)) / span;
}

/// Inverse of left_cell_mass in u_l; nullopt when even u_l = 0 holds too much.
std::optional<double> solve_left_value(double target, double u_next, double q, double dx) {
    if (target < left_cell_mass(0.0, u_next, q, dx)) return std::nullopt;
    double lo = 0.0;
    double hi = 8.0 * target / (3.0 * dx) + 1e-300;
    for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (left_cell_mass(mid, u_next, q, dx) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double left_cell_mass(double u_l, double u_next, double q, double dx) {
    const double dxl = std::min(u_l * u_l / q, dx);
    return 2.0 / 3.0 * u_l * dxl + dx * (3.0 * u_l + u_next) / 8.0;
}

double FrontState::max_height() const {
    double m = 0.0;
    for (std::size_t i = first; i <= last && i < u.size(); ++i) m = std::max(m, u[i]);
    return m;
}

FrontState make_front_state(const std::function<double(double)>& h, double x_left, double x_right,
                            const FrontGrid& grid, double time, bool pinned_left) {
    if (grid.n_cells < 8 || !(grid.length > 0.0)) throw std::invalid_argument("front grid needs >= 8 cells");
    if (!(x_left < x_right)) throw std::invalid_argument("fronts require x_left < x_right");

    FrontState s;
    s.origin = grid.origin;
    s.dx = grid.dx();
    s.u.assign(grid.n_cells + 1, 0.0);
    s.pinned_left = pinned_left;
    s.time = time;

    if (pinned_left) {
        if (std::abs(x_left - grid.origin) > 1e-12 * s.dx)
            throw std::invalid_argument("a pinned left edge must sit at the grid origin");
        x_left = grid.origin;
    } else if (!(x_left > s.x(0))) {
        throw std::invalid_argument("left front must lie inside the grid");
    }
    if (!(x_right < s.x(grid.n_cells))) throw std::invalid_argument("right front must lie inside the grid");

    bool any = false;
    for (std::size_t i = 0; i <= grid.n_cells; ++i) {
        const double xi = s.x(i);
        if (xi <= x_left || xi >= x_right) continue;
        s.u[i] = std::max(0.0, h(xi));
        if (!any) s.first = i;
        s.last = i;
        any = true;
    }
    if (!any) throw std::invalid_argument("no grid point lies between the fronts");
    if (pinned_left) s.first = 1;
    s.x_l = x_left;
    s.x_r = x_right;
    s.previous = s.u;
    return s;
}

FrontState make_front_state(const Profile& p, const FrontGrid& grid, bool pinned_left) {
    validate(p);
    return make_front_state([&p](double x) { return p.interpolate(x); }, p.x_left, p.x_right, grid, p.time,
                            pinned_left);
}

FrontPolyline polyline(const FrontState& s) {
    FrontPolyline line;
    if (s.wet_count() == 0) return line;
    line.x.push_back(s.x_l);
    line.h.push_back(0.0);
    for (std::size_t i = s.first; i <= s.last; ++i) {
        if (s.x(i) <= line.x.back()) continue;
        line.x.push_back(s.x(i));
        line.h.push_back(s.u[i]);
    }
    if (s.x_r > line.x.back()) {
        line.x.push_back(s.x_r);
        line.h.push_back(0.0);
    } else {
        line.h.back() = 0.0;
    }
    return line;
}

Profile to_profile(const FrontState& s) {
    const FrontPolyline line = polyline(s);
    Profile p;
    p.time = s.time;
    if (line.x.size() < 2) {
        p.x_left = s.x_l;
        p.x_right = std::max(s.x_r, s.x_l + s.dx);
        p.heights.assign(9, 0.0);
        return p;
    }
    p.x_left = line.x.front();
    p.x_right = line.x.back();
    const auto cells = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil((p.x_right - p.x_left) / s.dx)));
    p.heights.resize(cells + 1);
    std::size_t k = 1;
    for (std::size_t i = 0; i <= cells; ++i) {
        const double x = p.x_at(i);
        while (k + 1 < line.x.size() && line.x[k] < x) ++k;
        const double w = std::clamp((x - line.x[k - 1]) / (line.x[k] - line.x[k - 1]), 0.0, 1.0);
        p.heights[i] = (1.0 - w) * line.h[k - 1] + w * line.h[k];
    }
    p.heights.front() = 0.0;
    p.heights.back() = 0.0;
    return p;
}

double mass(const FrontState& s) {
    const FrontPolyline line = polyline(s);
    return mass(line.x, line.h);
}

double dipole_moment(const FrontState& s) {
    const FrontPolyline line = polyline(s);
    return dipole_moment(line.x, line.h);
}

double left_normalized_flux(const FrontState& s) {
    const FrontPolyline line = polyline(s);
    if (line.x.size() < 3) return 0.0;
    // derivative at x0 of the quadratic through three points of w = h^2
    const double x0 = line.x[0], x1 = line.x[1], x2 = line.x[2];
    const double w0 = sq(line.h[0]), w1 = sq(line.h[1]), w2 = sq(line.h[2]);
    const double a = x1 - x0, b = x2 - x0;
    return (w1 - w0) * b / (a * (b - a)) - (w2 - w0) * a / (b * (b - a));
}

SeriesRecord make_record(const FrontState& s) {
    const FrontPolyline line = polyline(s);
    return SeriesRecord{s.time,
                        s.x_l,
                        s.x_r,
                        s.max_height(),
                        mass(line.x, line.h),
                        dipole_moment(line.x, line.h),
                        left_normalized_flux(s)};
}

DrainageSpec DrainageSpec::constant(double q0) {
    if (!(q0 >= 0.0) || !std::isfinite(q0)) throw std::invalid_argument("drainage flux must be nonnegative");
    return q0 == 0.0 ? free_boundary() : DrainageSpec(Mode::constant, q0, {});
}

DrainageSpec DrainageSpec::law(std::function<double(double)> q) {
    if (!q) throw std::invalid_argument("drainage law must be callable");
    return DrainageSpec(Mode::law, 0.0, std::move(q));
}

double DrainageSpec::at(double t) const {
    switch (mode_) {
        case Mode::free: return 0.0;
        case Mode::constant: return q0_;
        case Mode::law: {
            const double q = law_(t);
            if (!(q >= 0.0)) throw std::invalid_argument("drainage law returned a negative flux");
            return q;
        }
    }
    return 0.0;
}

double update_left_boundary(const FrontState& s, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("left front update needs a positive drainage flux");
    const double wet = s.x(s.first);
    const double offset = sq(s.u[s.first]) / q;
    double x = wet - std::min(offset, s.dx);
    x = std::max(x, s.x_l - s.dx);
    return std::min(x, wet);
}

double update_right_boundary(const FrontState& s) {
    const bool has_neighbor = s.last >= 1 && (s.last > s.first || (s.pinned_left && s.last == 1));
    if (s.wet_count() < 2 && !has_neighbor) return s.x(s.last) + 0.5 * s.dx;
    const double ur = s.u[s.last];
    const double um = s.u[s.last - 1];
    double x = um > ur ? s.x(s.last) + ur * s.dx / (um - ur) : std::numeric_limits<double>::infinity();
    x = std::min(x, s.x_r + s.dx);
    x = std::max(x, s.x_r - s.dx);
    return std::max(x, s.x(s.last));
}

double update_free_left_boundary(const FrontState& s) {
    if (s.wet_count() < 2) return s.x(s.first) - 0.5 * s.dx;
    const double ul = s.u[s.first];
    const double up = s.u[s.first + 1];
    double x = up > ul ? s.x(s.first) - ul * s.dx / (up - ul) : -std::numeric_limits<double>::infinity();
    x = std::max(x, s.x_l - s.dx);
    x = std::min(x, s.x_l + s.dx);
    return std::min(x, s.x(s.first));
}

double stable_dt(const FrontState& s, const PhysicalParams& params, const DrainageSpec& q, double cfl,
                 double dt_max) {
    if (s.wet_count() == 0) return dt_max;
    const double h_max = std::max(s.max_height(), 1e-300);
    double dt = cfl * s.dx * s.dx / (4.0 * params.kappa_max() * h_max);
    // the near-front stencils see the shorter spacing to the front
    const double ur = s.u[s.last];
    if (ur > 0.0 && s.dx_r() < s.dx) dt = std::min(dt, cfl * s.dx * s.dx_r() / (4.0 * params.kappa1() * ur));
    if (!s.pinned_left && !is_forced(q, s.time)) {
        const double ul = s.u[s.first];
        if (ul > 0.0 && s.dx_l() < s.dx) dt = std::min(dt, cfl * s.dx * s.dx_l() / (4.0 * params.kappa1() * ul));
    }
    return std::min(dt, dt_max);
}

FrontState step_front(const FrontState& s, const PhysicalParams& params, const DrainageSpec& q, double dt,
                      const FrontStepOptions& options) {
    FrontState next = s;
    next.time = s.time + dt;
    next.previous = s.u;
    if (s.wet_count() < 2 && !s.pinned_left) return next;

    const auto& u = s.u;
    const auto& prev = s.previous.empty() ? s.u : s.previous;
    const double dx = s.dx;
    const double k1 = params.kappa1();
    const double k2 = params.kappa2();
    const double q_now = q.at(s.time);
    const bool forced = !s.pinned_left && is_forced(q, s.time);

    const std::size_t lo = s.pinned_left ? 1 : s.first + 1;
    for (std::size_t i = lo; i < s.last; ++i) {
        const double prev_d2 = sq(prev[i - 1]) - 2.0 * sq(prev[i]) + sq(prev[i + 1]);
        const double kappa = kappa_select(prev_d2, params);
        double value = u[i] + dt / (dx * dx) * kappa * (sq(u[i - 1]) - 2.0 * sq(u[i]) + sq(u[i + 1]));
        check_height(value, options.clip_tol, next.time, i);
        next.u[i] = std::max(value, 0.0);
    }

    {
        const std::size_t r = s.last;
        const double dxr = s.dx_r();
        const double tip = u[r] > 0.0 ? sq(u[r]) / std::max(dxr, 1e-12 * dx) : 0.0;
        const double value = u[r] + 2.0 * dt / (dx + dxr) * k1 * ((sq(u[r - 1]) - sq(u[r])) / dx - tip);
        check_height(value, options.clip_tol, next.time, r);
        next.u[r] = std::max(value, 0.0);
    }

    bool dried = false;
    if (!s.pinned_left) {
        const std::size_t l = s.first;
        const double dxl = s.dx_l();
        double value = 0.0;
        if (forced && options.left_cell == LeftCellRule::conservative) {
            const double net = dt * k2 * ((sq(u[l + 1]) - sq(u[l])) / dx - q_now);
            double target = left_cell_mass(u[l], u[l + 1], q_now, dx) + net;
            std::size_t at = l;
            auto solved = solve_left_value(target, next.u[at + 1], q_now, dx);
            while (!solved && at + 1 < s.last) {
                // the wet point dries; its neighbor takes over the remaining water
                next.u[at] = 0.0;
                ++at;
                target += dx * next.u[at];
                solved = solve_left_value(target, next.u[at + 1], q_now, dx);
            }
            if (!solved) {
                next.u[at] = 0.0;
                next.first = at + 1;
                next.x_l = next.x_r;
                return next;
            }
            next.first = at;
            value = *solved;
            dried = false;
        } else if (forced) {
            value = u[l] + 2.0 * dt / (dx + dxl) * k2 * ((sq(u[l + 1]) - sq(u[l])) / dx - q_now);
            dried = !(value > 0.0);
        } else {
            const double tip = u[l] > 0.0 ? sq(u[l]) / std::max(dxl, 1e-12 * dx) : 0.0;
            value = u[l] + 2.0 * dt / (dx + dxl) * k1 * ((sq(u[l + 1]) - sq(u[l])) / dx - tip);
            check_height(value, options.clip_tol, next.time, l);
        }
        next.u[next.first] = std::max(value, 0.0);
    }

    // left front
    if (!s.pinned_left) {
        if (forced) {
            if (dried) {
                next.u[next.first] = 0.0;
                ++next.first;
                if (next.first > next.last) {
                    next.x_l = next.x_r;
                    return next;
                }
            }
            next.x_l = update_left_boundary(next, q_now);
        } else {
            next.x_l = update_free_left_boundary(next);
            if (next.first > 0 && next.x_l < next.x(next.first - 1)) {
                const std::size_t added = next.first - 1;
                next.u[added] = activation_value(next, next.first, added, next.x_l, options.activation);
                next.first = added;
            }
            if (next.first == 0 && next.x_l <= next.x(0))
                throw InstabilityError(next.time, "left front reached the edge of the grid");
        }
    }

    // right front
    next.x_r = update_right_boundary(next);
    if (next.last + 1 < next.u.size() && next.x_r > next.x(next.last + 1)) {
        const std::size_t added = next.last + 1;
        next.u[added] = activation_value(next, next.last, added, next.x_r, options.activation);
        next.last = added;
    }
    if (next.last + 1 >= next.u.size()) throw InstabilityError(next.time, "right front reached the edge of the grid");
    return next;
}

namespace {

using StepObserver = std::function<void(const FrontState& before, const FrontState& after)>;

bool extinct(const FrontState& s, double mass_floor) {
    if (!s.pinned_left && s.wet_count() < 2) return true;
    return mass(s) < mass_floor;
}

void march(const DrainageRunConfig& cfg, FrontState& state, const DrainageSpec& q, double mass_floor,
           DrainageRunOutput& out, const StepObserver& observer = {}) {
    const Schedule schedule(cfg.t_start, cfg.t_end, cfg.series_samples, cfg.snapshot_times);
    auto record = [&](const FrontState& st, bool force) {
        if (force || schedule.is_series(st.time)) out.series.push_back(make_record(st));
        if (schedule.is_snapshot(st.time)) {
            out.snapshots.push_back(to_profile(st));
            out.states.push_back(st);
        }
    };

    if (out.series.empty() || out.series.back().time != state.time) record(state, false);
    for (double target : schedule.stops()) {
        if (target <= state.time) continue;
        while (state.time < target) {
            double dt = stable_dt(state, cfg.params, q, cfg.cfl, cfg.dt_max);
            const bool last = state.time + dt >= target;
            if (last) dt = target - state.time;
            FrontState next = step_front(state, cfg.params, q, dt, cfg.step);
            if (last) next.time = target;
            if (observer) observer(state, next);
            state = std::move(next);
            ++out.steps;
            if (extinct(state, mass_floor)) {
                out.extinction_time = state.time;
                record(state, true);
                return;
            }
        }
        record(state, false);
    }
}

void check_config(const DrainageRunConfig& cfg) {
    if (!(cfg.t_end >= cfg.t_start)) throw std::invalid_argument("t_end must not precede t_start");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
}

}  // namespace

DrainageRunOutput run_drainage(const DrainageRunConfig& cfg, const FrontState& initial, const DrainageSpec& q) {
    check_config(cfg);
    FrontState state = initial;
    state.time = cfg.t_start;
    DrainageRunOutput out;
    march(cfg, state, q, cfg.mass_floor_fraction * mass(initial), out);
    return out;
}

FloodDrainOutput run_flood_then_drain(const FloodDrainConfig& cfg) {
    check_config(cfg.run);
    if (!(cfg.t_switch > cfg.run.t_start && cfg.t_switch <= cfg.run.t_end))
        throw std::invalid_argument("drainage switch time must lie in (t_start, t_end]");
    if (!(cfg.multiplier >= 0.0)) throw std::invalid_argument("flux multiplier must be nonnegative");

    InitialCondition ic = cfg.ic;
    ic.offset = cfg.run.grid.origin;
    const auto h0 = [&ic](double x) { return ic(x); };
    FrontState state = make_front_state(h0, ic.offset, ic.offset + ic.width, cfg.run.grid, cfg.run.t_start, true);
    const double mass_floor = cfg.run.mass_floor_fraction * mass(state);

    FloodDrainOutput out;
    DrainageRunConfig natural = cfg.run;
    natural.t_end = cfg.t_switch;
    march(natural, state, DrainageSpec::free_boundary(), mass_floor, out);
    if (out.extinction_time) return out;

    out.natural_flux = left_normalized_flux(state);
    out.q0 = cfg.multiplier * out.natural_flux;

    DrainageRunConfig drain = cfg.run;
    drain.t_start = cfg.t_switch;
    DrainageSpec spec = DrainageSpec::free_boundary();
    if (out.q0 > 0.0) {
        spec = DrainageSpec::constant(out.q0);
        state.pinned_left = false;
        state.first = 1;
        state.x_l = state.x(0);
    }
    const StepObserver watch = [&out](const FrontState& before, const FrontState& after) {
        const double m0 = mass(before);
        const double m1 = mass(after);
        if (m1 > m0) {
            ++out.mass_increases;
            out.max_mass_increase = std::max(out.max_mass_increase, (m1 - m0) / m0);
        }
    };
    march(drain, state, spec, mass_floor, out, watch);
    return out;
}

}  // namespace mound
