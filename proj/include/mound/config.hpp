#pragma once
//
// Run configuration: plain `key = value` text with `#` comments, overridden
// by command-line flags. Several `key=value` tokens may share a line when
// written without spaces around '='.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mound/core.hpp"

namespace mound {

enum class Problem { dipole, drainage, flood_drain, eigen, sweep, validate_similarity, analyze };

std::string_view to_string(Problem p);
Problem parse_problem(std::string_view name);

enum class FluxUnits {
    normalized,  ///< d(h^2)/dx at the front
    physical     ///< discharge; divided by porosity * kappa1
};

struct RunConfig {
    Problem problem = Problem::eigen;

    double kappa1 = 1.0;
    double delta = 0.0;
    double porosity = 1.0;

    std::size_t grid_n = 400;
    double cfl = 0.25;
    double t_start = 0.1;
    double t_end = 100.0;
    std::vector<double> snapshots;
    std::size_t series_samples = 200;

    InitialShape ic_shape = InitialShape::parabolic;
    double ic_amplitude = 1.0;
    double ic_width = 1.0;
    double ic_offset = 0.0;
    double domain_length = 8.0;

    /// drainage: constant front flux (0 = free edge); flood-drain: multiplier
    /// of the natural outflow flux at t_switch.
    double flux = 0.0;
    FluxUnits flux_units = FluxUnits::normalized;
    double t_switch = 1.0;

    double beta = 0.2;

    std::vector<double> ratios{1.0, 0.7, 0.5, 0.3};
    bool parallel = true;

    double eps_tip = 1e-6;
    double ode_step = 1e-3;
    double beta_tol = 1e-6;

    std::string out = "out";
    std::string input;

    double ratio() const noexcept { return 1.0 - delta; }
    PhysicalParams params() const;
    /// flux in d(h^2)/dx units.
    double normalized_flux() const;

    bool operator==(const RunConfig&) const = default;
};

/// Problem-specific defaults before any key is applied.
RunConfig defaults_for(Problem problem);

/// Key/value overrides from flags; they win over the text.
using Overrides = std::map<std::string, std::string>;

/// Parses config text, applies overrides and validates. Throws ConfigError
/// naming the key and, for text input, the 1-based line.
RunConfig parse_config(std::string_view text, const Overrides& overrides = {});
RunConfig load_config(const std::string& path, const Overrides& overrides = {});

/// `key = value` lines of every key that applies to the problem, resolved.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

/// Re-reads the `config.` echo of a summary file.
RunConfig config_from_summary(std::string_view summary);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace mound
