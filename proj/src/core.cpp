#include "mound/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mound {

PhysicalParams::PhysicalParams(double kappa1, double delta, double porosity)
    : kappa1_(kappa1), kappa2_(kappa1 / (1.0 - delta)), delta_(delta), porosity_(porosity) {
    if (!(kappa1 > 0.0) || !std::isfinite(kappa1))
        throw std::invalid_argument("kappa1 must be positive and finite");
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must lie in [0, 1)");
    if (!(porosity > 0.0 && porosity <= 1.0))
        throw std::invalid_argument("porosity must lie in (0, 1]");
}

PhysicalParams PhysicalParams::from_delta(double kappa1, double delta, double porosity) {
    return PhysicalParams(kappa1, delta, porosity);
}

PhysicalParams PhysicalParams::from_ratio(double kappa1, double ratio, double porosity) {
    if (!(ratio > 0.0 && ratio <= 1.0))
        throw std::invalid_argument("ratio kappa1/kappa2 must lie in (0, 1]");
    return PhysicalParams(kappa1, 1.0 - ratio, porosity);
}

double Profile::max_height() const {
    if (heights.empty()) return 0.0;
    return *std::max_element(heights.begin(), heights.end());
}

double Profile::interpolate(double x) const {
    if (heights.size() < 2 || x <= x_left || x >= x_right) return 0.0;
    const double s = (x - x_left) / spacing();
    const auto i = std::min(static_cast<std::size_t>(s), heights.size() - 2);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * heights[i] + w * heights[i + 1];
}

void validate(const Profile& p) {
    if (p.heights.size() < 2) throw std::invalid_argument("profile needs at least two samples");
    if (!(p.x_left < p.x_right)) throw std::invalid_argument("profile requires x_left < x_right");
    for (double h : p.heights) {
        if (!std::isfinite(h) || h < 0.0)
            throw std::invalid_argument("profile heights must be finite and nonnegative");
    }
}

std::string_view to_string(InitialShape shape) {
    switch (shape) {
        case InitialShape::parabolic: return "parabolic";
        case InitialShape::cosine: return "cosine";
    }
    return "parabolic";
}

InitialShape parse_initial_shape(std::string_view name) {
    if (name == "parabolic") return InitialShape::parabolic;
    if (name == "cosine") return InitialShape::cosine;
    throw std::invalid_argument("unknown initial shape '" + std::string(name) + "'");
}

double InitialCondition::operator()(double x) const {
    const double s = x - offset;
    if (s <= 0.0 || s >= width) return 0.0;
    switch (shape) {
        case InitialShape::parabolic: {
            const double z = 2.0 * s / width - 1.0;
            return std::max(0.0, amplitude * (1.0 - z * z));
        }
        case InitialShape::cosine:
            return std::max(0.0, amplitude * std::sin(std::numbers::pi * s / width));
    }
    return 0.0;
}

Profile make_initial_profile(const InitialCondition& ic, std::size_t n_cells, double time) {
    if (!(ic.width > 0.0)) throw std::invalid_argument("initial support width must be positive");
    if (!(ic.amplitude >= 0.0)) throw std::invalid_argument("initial amplitude must be nonnegative");
    if (n_cells < 8) throw std::invalid_argument("initial profile needs at least 8 cells");

    Profile p;
    p.time = time;
    p.x_left = ic.offset;
    p.x_right = ic.offset + ic.width;
    p.heights.resize(n_cells + 1);
    const double dx = ic.width / static_cast<double>(n_cells);
    for (std::size_t i = 0; i <= n_cells; ++i) p.heights[i] = ic(ic.offset + dx * static_cast<double>(i));
    p.heights.front() = 0.0;
    p.heights.back() = 0.0;
    return p;
}

double mass(const Profile& p) {
    if (p.heights.size() < 2) return 0.0;
    double sum = 0.5 * (p.heights.front() + p.heights.back());
    for (std::size_t i = 1; i + 1 < p.heights.size(); ++i) sum += p.heights[i];
    return sum * p.spacing();
}

double dipole_moment(const Profile& p) {
    if (p.heights.size() < 2) return 0.0;
    const std::size_t n = p.heights.size();
    double sum = 0.5 * (p.x_at(0) * p.heights.front() + p.x_at(n - 1) * p.heights.back());
    for (std::size_t i = 1; i + 1 < n; ++i) sum += p.x_at(i) * p.heights[i];
    return sum * p.spacing();
}

double mass(std::span<const double> x, std::span<const double> h) {
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (h[i - 1] + h[i]) * (x[i] - x[i - 1]);
    return sum;
}

double dipole_moment(std::span<const double> x, std::span<const double> h) {
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        sum += 0.5 * (x[i - 1] * h[i - 1] + x[i] * h[i]) * (x[i] - x[i - 1]);
    return sum;
}

double kappa_select(double second_diff_h2, const PhysicalParams& params) noexcept {
    // a flat cell counts as advancing
    return second_diff_h2 < 0.0 ? params.kappa2() : params.kappa1();
}

double left_normalized_flux(const Profile& p) {
    if (p.heights.size() < 3) return 0.0;
    const double w0 = p.heights[0] * p.heights[0];
    const double w1 = p.heights[1] * p.heights[1];
    const double w2 = p.heights[2] * p.heights[2];
    return (-3.0 * w0 + 4.0 * w1 - w2) / (2.0 * p.spacing());
}

SeriesRecord make_record(const Profile& p) {
    return SeriesRecord{p.time, p.x_left, p.x_right, p.max_height(), mass(p), dipole_moment(p),
                        left_normalized_flux(p)};
}

std::vector<double> sample_times(double t_start, double t_end, std::size_t count) {
    std::vector<double> out;
    if (!(t_end > t_start) || count < 2) {
        out.push_back(t_start);
        if (t_end > t_start) out.push_back(t_end);
        return out;
    }
    out.reserve(count);
    const double last = static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        const double w = static_cast<double>(k) / last;
        if (t_start > 0.0)
            out.push_back(t_start * std::pow(t_end / t_start, w));
        else
            out.push_back(t_start + (t_end - t_start) * w);
    }
    out.front() = t_start;
    out.back() = t_end;
    return out;
}

}  // namespace mound
