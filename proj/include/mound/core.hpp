#pragma once
//
// Shared domain types for the groundwater-mound solvers: seepage parameters
// with capillary retention, sampled mound profiles, initial conditions and
// the integral observables recorded during a run.
//
// Dimension conventions: heights in H, positions in L, time in T, seepage
// diffusivities in L^2/(T*H). Fluxes at the fronts are always carried in the
// normalized form d(h^2)/dx [H^2/L].

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mound {

/// Seepage coefficients for a stratum with capillary retention.
///
/// Water advancing into dry pores sees the full active porosity m and
/// diffuses with kappa1; receding water leaves a fraction delta trapped, so
/// the effective porosity drops to m(1 - delta) and the diffusivity rises to
/// kappa2 = kappa1 / (1 - delta).
class PhysicalParams {
public:
    static PhysicalParams from_delta(double kappa1, double delta, double porosity = 1.0);
    static PhysicalParams from_ratio(double kappa1, double ratio, double porosity = 1.0);

    double kappa1() const noexcept { return kappa1_; }
    double kappa2() const noexcept { return kappa2_; }
    double delta() const noexcept { return delta_; }
    double porosity() const noexcept { return porosity_; }
    /// kappa1 / kappa2 = 1 - delta, in (0, 1].
    double ratio() const noexcept { return 1.0 - delta_; }
    double kappa_max() const noexcept { return kappa2_; }

private:
    PhysicalParams(double kappa1, double delta, double porosity);

    double kappa1_;
    double kappa2_;
    double delta_;
    double porosity_;
};

/// Mound height sampled uniformly on [x_left, x_right], endpoints included.
struct Profile {
    double time = 0.0;
    double x_left = 0.0;
    double x_right = 1.0;
    std::vector<double> heights;

    std::size_t size() const noexcept { return heights.size(); }
    double spacing() const { return (x_right - x_left) / static_cast<double>(heights.size() - 1); }
    double x_at(std::size_t i) const { return x_left + spacing() * static_cast<double>(i); }
    double max_height() const;
    /// Piecewise-linear interpolant; zero outside [x_left, x_right].
    double interpolate(double x) const;
};

/// Throws std::invalid_argument when x_left >= x_right, fewer than two
/// samples, or any height is negative or non-finite.
void validate(const Profile& p);

enum class InitialShape { parabolic, cosine };

std::string_view to_string(InitialShape shape);
InitialShape parse_initial_shape(std::string_view name);

/// Compactly supported, concave bump on [offset, offset + width].
///
/// parabolic: A (1 - (2 s / d - 1)^2), cosine: A sin(pi s / d), s = x - offset.
struct InitialCondition {
    InitialShape shape = InitialShape::parabolic;
    double amplitude = 1.0;
    double width = 1.0;
    double offset = 0.0;

    double operator()(double x) const;
};

/// One row of a run's time series.
struct SeriesRecord {
    double time = 0.0;
    double x_left = 0.0;
    double x_right = 0.0;
    double max_height = 0.0;
    double mass = 0.0;
    double dipole_moment = 0.0;
    double left_normalized_flux = 0.0;
};

Profile make_initial_profile(const InitialCondition& ic, std::size_t n_cells, double time = 0.0);

/// Trapezoid-rule integral of h.
double mass(const Profile& p);
/// Trapezoid-rule integral of x h (the dipole moment Q for a mound on x >= 0).
double dipole_moment(const Profile& p);

/// Trapezoid rules for non-uniform samples; used by the fixed-grid solver
/// whose fronts sit between grid points.
double mass(std::span<const double> x, std::span<const double> h);
double dipole_moment(std::span<const double> x, std::span<const double> h);

/// Diffusivity for a cell given the second difference of h^2 at the previous
/// time level: kappa1 for a rising (or flat) cell, kappa2 for a falling one.
double kappa_select(double second_diff_h2, const PhysicalParams& params) noexcept;

/// Second-order one-sided estimate of d(h^2)/dx at x_left.
double left_normalized_flux(const Profile& p);

SeriesRecord make_record(const Profile& p);

/// Artifacts of one time-marching run.
struct RunOutput {
    std::vector<SeriesRecord> series;
    std::vector<Profile> snapshots;
    std::size_t steps = 0;
    /// Set when the mound vanished (fixed-grid runs only).
    std::optional<double> extinction_time;
};

/// Series sample times: log-spaced when t_start > 0, otherwise uniform.
/// Both ends are included.
std::vector<double> sample_times(double t_start, double t_end, std::size_t count);

}  // namespace mound
