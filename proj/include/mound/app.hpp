#pragma once
//
// Experiment orchestration and result files.
//
//   series.csv     time,x_left,x_right,max_height,mass,dipole_moment,left_flux
//   snapshots.csv  snapshot_time,x,h
//   summary.txt    key = value lines, ending with the resolved config echo
//                  under `config.`
//
// Numbers are written in shortest round-trip form, so identical configs give
// byte-identical files.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mound/config.hpp"
#include "mound/core.hpp"

namespace mound {

inline constexpr std::string_view kVersion = "1.0.0";

inline constexpr std::string_view kSeriesHeader = "time,x_left,x_right,max_height,mass,dipole_moment,left_flux";
inline constexpr std::string_view kSnapshotHeader = "snapshot_time,x,h";

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_instability = 3, exit_convergence = 4 };

using Summary = std::vector<std::pair<std::string, std::string>>;

void write_series(std::ostream& out, std::span<const SeriesRecord> series);
void write_snapshots(std::ostream& out, std::span<const Profile> snapshots);
void write_summary(std::ostream& out, const Summary& summary);

/// Readers for the files above; throw ConfigError on malformed input.
std::vector<SeriesRecord> read_series(std::istream& in);
std::vector<Profile> read_snapshots(std::istream& in);

/// Runs the configured problem and writes its files under cfg.out. Returns
/// the exit status; failures print one line
///   error code=<n> kind=<kind> [field=.. line=.. | time=..] message="..."
/// to `diag`.
int run(const RunConfig& cfg, std::ostream& diag);

/// Maps the in-flight exception to its exit status and writes the
/// diagnostic line. Call from inside a catch block.
int report_current_exception(std::ostream& diag);

}  // namespace mound
