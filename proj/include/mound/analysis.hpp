#pragma once
//
// Exponent extraction and solver cross-checks.

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mound/core.hpp"
#include "mound/dipole_solver.hpp"
#include "mound/front_solver.hpp"
#include "mound/similarity.hpp"

namespace mound {

/// Which part of a log-log curve counts as "straight".
struct FitWindowPolicy {
    enum class Kind {
        /// Trailing run of sliding-window slopes within slope_tol of the final
        /// one; falls back to trailing_fraction when that run covers less than
        /// min_stable_fraction of the log-time range.
        stabilized,
        trailing_fraction,
        explicit_range
    };
    Kind kind = Kind::stabilized;
    double slope_tol = 0.01;
    double trailing_fraction = 0.5;
    double min_stable_fraction = 0.2;
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t min_points = 8;
};

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t points = 0;
    /// "stabilized", "trailing" (fallback or requested) or "explicit".
    std::string window;
};

/// Least squares of log y on log t inside the chosen window. Points with
/// t <= 0 or y <= 0 are ignored; throws std::domain_error when fewer than
/// policy.min_points usable points remain.
PowerLawFit fit_powerlaw(std::span<const double> t, std::span<const double> y, const FitWindowPolicy& policy = {});

struct CollapseMetric {
    double value = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
};

/// Maps every snapshot to (x - x_l) / (x_r - x_l) and h / max h on a common
/// 201-point grid and returns the largest pairwise sup-norm distance.
/// Snapshots without positive height are skipped; throws std::domain_error
/// when none remain.
CollapseMetric collapse_metric(std::span<const Profile> snapshots);

/// Called once per finished ratio, possibly from several threads at once.
using CompareObserver = std::function<void(const EigenResult&, const DipoleRunConfig&, const RunOutput&)>;

struct CompareConfig {
    DipoleRunConfig run{};
    EigenProblem eigen{};
    FitWindowPolicy window{};
    bool parallel = false;
    CompareObserver observer{};
};

struct CompareRow {
    double ratio = 1.0;
    double beta_eigen = 0.0;
    double beta_from_xr = 0.0;
    double alpha_from_max = 0.0;
    double alpha_plus_2beta = 0.0;
    PowerLawFit xr_fit{};
    PowerLawFit max_fit{};
    std::optional<std::string> error;
    std::exception_ptr failure;
};

/// One row per ratio: eigenvalue beta against exponents fitted to a dipole
/// run. A failing component is reported in the row's error field.
std::vector<CompareRow> compare_eigen_pde(std::span<const double> ratios, const CompareConfig& cfg);

/// Convenience: fits of x_right and max_height for a finished run.
PowerLawFit fit_front(std::span<const SeriesRecord> series, const FitWindowPolicy& policy = {});
PowerLawFit fit_max_height(std::span<const SeriesRecord> series, const FitWindowPolicy& policy = {});

struct SimilarityErrors {
    /// Per stored state: max over grid points of |h - h_exact| / max h_exact.
    std::vector<double> snapshot_times;
    std::vector<double> sup_h_rel_err;
    /// Per series row: |x - x_exact| / x_exact.
    std::vector<double> series_times;
    std::vector<double> xl_rel_err;
    std::vector<double> xr_rel_err;

    double max_sup_h() const;
    double max_xl() const;
    double max_xr() const;
};

SimilarityErrors similarity_error(const DrainageRunOutput& run, const SimilarityProfile& sim);

/// Largest |h_fixed - h_rescaled| at the fixed-grid points, divided by the
/// peak of the rescaled profile. Only the rescaled profile is interpolated.
double cross_solver_gap(const Profile& rescaled, const FrontState& fixed);

}  // namespace mound
