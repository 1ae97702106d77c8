#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "mound/core.hpp"

namespace mound {

/// Output times of a run. Solvers clip their last step so the clock lands
/// exactly on each stop, which lets membership be tested by equality.
class Schedule {
public:
    Schedule(double t_start, double t_end, std::size_t series_samples, const std::vector<double>& snapshot_times)
        : series_(sample_times(t_start, t_end, series_samples)) {
        for (double t : snapshot_times)
            if (t >= t_start && t <= t_end) snapshots_.push_back(t);
        std::sort(snapshots_.begin(), snapshots_.end());
        snapshots_.erase(std::unique(snapshots_.begin(), snapshots_.end()), snapshots_.end());
        stops_ = series_;
        stops_.insert(stops_.end(), snapshots_.begin(), snapshots_.end());
        std::sort(stops_.begin(), stops_.end());
        stops_.erase(std::unique(stops_.begin(), stops_.end()), stops_.end());
    }

    const std::vector<double>& stops() const noexcept { return stops_; }
    bool is_series(double t) const { return std::binary_search(series_.begin(), series_.end(), t); }
    bool is_snapshot(double t) const { return std::binary_search(snapshots_.begin(), snapshots_.end(), t); }

private:
    std::vector<double> series_;
    std::vector<double> snapshots_;
    std::vector<double> stops_;
};

}  // namespace mound
