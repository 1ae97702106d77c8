#include "mound/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

namespace mound {

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

Line least_squares(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Line line;
    line.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    line.intercept = my - line.slope * mx;
    line.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    return line;
}

PowerLawFit make_fit(std::span<const double> lt, std::span<const double> ly, std::size_t begin, std::size_t end,
                     std::string window) {
    const Line line = least_squares(lt.subspan(begin, end - begin), ly.subspan(begin, end - begin));
    PowerLawFit fit;
    fit.exponent = line.slope;
    fit.prefactor = std::exp(line.intercept);
    fit.r_squared = line.r_squared;
    fit.t_min = std::exp(lt[begin]);
    fit.t_max = std::exp(lt[end - 1]);
    fit.points = end - begin;
    fit.window = std::move(window);
    return fit;
}

std::size_t trailing_start(std::span<const double> lt, double fraction) {
    const double cut = lt.back() - fraction * (lt.back() - lt.front());
    std::size_t k = 0;
    while (k < lt.size() && lt[k] < cut) ++k;
    return k;
}

}  // namespace

PowerLawFit fit_powerlaw(std::span<const double> t, std::span<const double> y, const FitWindowPolicy& policy) {
    if (t.size() != y.size()) throw std::invalid_argument("fit needs matching t and y sequences");
    std::vector<double> kept_t, lt, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] > 0.0 && y[i] > 0.0 && std::isfinite(t[i]) && std::isfinite(y[i])) {
            kept_t.push_back(t[i]);
            lt.push_back(std::log(t[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    const std::size_t min_points = std::max<std::size_t>(policy.min_points, 2);
    if (lt.size() < min_points) throw std::domain_error("power-law fit needs at least " + std::to_string(min_points) + " positive points");

    const std::size_t n = lt.size();
    auto fallback = [&] {
        std::size_t begin = trailing_start(lt, policy.trailing_fraction);
        begin = std::min(begin, n - min_points);
        return make_fit(lt, ly, begin, n, "trailing");
    };

    switch (policy.kind) {
        case FitWindowPolicy::Kind::explicit_range: {
            std::size_t begin = 0, end = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (kept_t[i] < policy.t_min) begin = i + 1;
                if (kept_t[i] <= policy.t_max) end = i + 1;
            }
            if (end < begin + min_points) throw std::domain_error("fit window holds too few points");
            return make_fit(lt, ly, begin, end, "explicit");
        }
        case FitWindowPolicy::Kind::trailing_fraction:
            return fallback();
        case FitWindowPolicy::Kind::stabilized: {
            const std::size_t width = std::max(min_points, n / 8);
            if (n < width + 1) return fallback();
            const std::size_t last_window = n - width;
            const double final_slope = least_squares(std::span(lt).subspan(last_window, width),
                                                     std::span(ly).subspan(last_window, width))
                                           .slope;
            std::size_t begin = last_window;
            while (begin > 0) {
                const double s = least_squares(std::span(lt).subspan(begin - 1, width),
                                               std::span(ly).subspan(begin - 1, width))
                                     .slope;
                if (std::abs(s - final_slope) >= policy.slope_tol) break;
                --begin;
            }
            const double covered = (lt.back() - lt[begin]) / (lt.back() - lt.front());
            if (covered < policy.min_stable_fraction) return fallback();
            return make_fit(lt, ly, begin, n, "stabilized");
        }
    }
    return fallback();
}

CollapseMetric collapse_metric(std::span<const Profile> snapshots) {
    constexpr std::size_t grid = 201;
    std::vector<std::vector<double>> curves;
    CollapseMetric result;
    for (const Profile& p : snapshots) {
        const double peak = p.max_height();
        if (!(peak > 0.0) || p.heights.size() < 2) {
            ++result.excluded;
            continue;
        }
        std::vector<double> c(grid);
        for (std::size_t k = 0; k < grid; ++k) {
            const double xi = static_cast<double>(k) / static_cast<double>(grid - 1);
            const double x = p.x_left + xi * (p.x_right - p.x_left);
            c[k] = (k == 0 || k + 1 == grid) ? p.heights[k == 0 ? 0 : p.heights.size() - 1] / peak
                                             : p.interpolate(x) / peak;
        }
        curves.push_back(std::move(c));
    }
    if (curves.empty()) throw std::domain_error("collapse metric needs a snapshot with positive height");
    result.used = curves.size();
    for (std::size_t a = 0; a < curves.size(); ++a)
        for (std::size_t b = a + 1; b < curves.size(); ++b)
            for (std::size_t k = 0; k < grid; ++k)
                result.value = std::max(result.value, std::abs(curves[a][k] - curves[b][k]));
    return result;
}

namespace {

std::vector<double> column(std::span<const SeriesRecord> series, double SeriesRecord::*field) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& r : series) out.push_back(r.*field);
    return out;
}

CompareRow compare_one(double ratio, const CompareConfig& cfg) {
    CompareRow row;
    row.ratio = ratio;
    try {
        EigenProblem prob = cfg.eigen;
        prob.ratio = ratio;
        const EigenResult eigen = shoot_beta(prob);
        row.beta_eigen = eigen.beta;

        DipoleRunConfig run = cfg.run;
        run.params = PhysicalParams::from_ratio(cfg.run.params.kappa1(), ratio, cfg.run.params.porosity());
        const RunOutput out = run_dipole(run);
        if (cfg.observer) cfg.observer(eigen, run, out);
        row.xr_fit = fit_front(out.series, cfg.window);
        row.max_fit = fit_max_height(out.series, cfg.window);
        row.beta_from_xr = row.xr_fit.exponent;
        row.alpha_from_max = -row.max_fit.exponent;
        row.alpha_plus_2beta = row.alpha_from_max + 2.0 * row.beta_from_xr;
    } catch (const std::exception& e) {
        row.error = e.what();
        row.failure = std::current_exception();
    }
    return row;
}

}  // namespace

PowerLawFit fit_front(std::span<const SeriesRecord> series, const FitWindowPolicy& policy) {
    const auto t = column(series, &SeriesRecord::time);
    const auto x = column(series, &SeriesRecord::x_right);
    return fit_powerlaw(t, x, policy);
}

PowerLawFit fit_max_height(std::span<const SeriesRecord> series, const FitWindowPolicy& policy) {
    const auto t = column(series, &SeriesRecord::time);
    const auto h = column(series, &SeriesRecord::max_height);
    return fit_powerlaw(t, h, policy);
}

std::vector<CompareRow> compare_eigen_pde(std::span<const double> ratios, const CompareConfig& cfg) {
    std::vector<CompareRow> rows;
    rows.reserve(ratios.size());
    if (!cfg.parallel) {
        for (double r : ratios) rows.push_back(compare_one(r, cfg));
        return rows;
    }
    std::vector<std::future<CompareRow>> jobs;
    for (double r : ratios) jobs.push_back(std::async(std::launch::async, compare_one, r, std::cref(cfg)));
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

double SimilarityErrors::max_sup_h() const {
    return sup_h_rel_err.empty() ? 0.0 : *std::max_element(sup_h_rel_err.begin(), sup_h_rel_err.end());
}

double SimilarityErrors::max_xl() const {
    return xl_rel_err.empty() ? 0.0 : *std::max_element(xl_rel_err.begin(), xl_rel_err.end());
}

double SimilarityErrors::max_xr() const {
    return xr_rel_err.empty() ? 0.0 : *std::max_element(xr_rel_err.begin(), xr_rel_err.end());
}

SimilarityErrors similarity_error(const DrainageRunOutput& run, const SimilarityProfile& sim) {
    SimilarityErrors err;
    double f_max = 0.0;
    for (double g : sim.g) f_max = std::max(f_max, std::sqrt(g));

    for (const FrontState& s : run.states) {
        const double peak = sim.amplitude(s.time) * f_max;
        double worst = 0.0;
        for (std::size_t i = 0; i < s.u.size(); ++i)
            worst = std::max(worst, std::abs(s.u[i] - eval_similarity(sim, s.x(i), s.time)));
        err.snapshot_times.push_back(s.time);
        err.sup_h_rel_err.push_back(worst / peak);
    }
    for (const SeriesRecord& r : run.series) {
        if (!(r.time > 0.0)) continue;
        err.series_times.push_back(r.time);
        err.xl_rel_err.push_back(std::abs(r.x_left - sim.x_left(r.time)) / sim.x_left(r.time));
        err.xr_rel_err.push_back(std::abs(r.x_right - sim.x_right(r.time)) / sim.x_right(r.time));
    }
    return err;
}

double cross_solver_gap(const Profile& rescaled, const FrontState& fixed) {
    const double peak = rescaled.max_height();
    if (!(peak > 0.0)) throw std::domain_error("cross-solver comparison needs a positive reference peak");
    double worst = 0.0;
    for (std::size_t i = 0; i < fixed.u.size(); ++i)
        worst = std::max(worst, std::abs(fixed.u[i] - rescaled.interpolate(fixed.x(i))));
    return worst / peak;
}

}  // namespace mound
