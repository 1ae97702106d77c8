#include "mound/app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "mound/analysis.hpp"
#include "mound/dipole_solver.hpp"
#include "mound/errors.hpp"
#include "mound/front_solver.hpp"
#include "mound/similarity.hpp"

namespace mound {

namespace fs = std::filesystem;

namespace {

std::string num(double v) { return format_double(v); }

std::string quote_text(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += (c == '\n') ? ' ' : c;
    }
    return out + "\"";
}

void add(Summary& s, std::string key, std::string value) { s.emplace_back(std::move(key), std::move(value)); }

void add_fit(Summary& s, const std::string& name, const PowerLawFit& fit) {
    add(s, name + "_exponent", num(fit.exponent));
    add(s, name + "_prefactor", num(fit.prefactor));
    add(s, name + "_r_squared", num(fit.r_squared));
    add(s, name + "_window", fit.window);
    add(s, name + "_t_min", num(fit.t_min));
    add(s, name + "_t_max", num(fit.t_max));
    add(s, name + "_points", std::to_string(fit.points));
}

std::vector<double> column(std::span<const SeriesRecord> series, double SeriesRecord::*field) {
    std::vector<double> v;
    for (const auto& r : series) v.push_back(r.*field);
    return v;
}

/// Exponent fits of a finished series; a fit without enough data is
/// reported instead of failing the run.
void add_exponent_fits(Summary& s, std::span<const SeriesRecord> series, bool with_left) {
    const auto t = column(series, &SeriesRecord::time);
    auto fit = [&](const std::string& name, double SeriesRecord::*field) -> std::optional<PowerLawFit> {
        try {
            const PowerLawFit f = fit_powerlaw(t, column(series, field));
            add_fit(s, name, f);
            return f;
        } catch (const std::domain_error& e) {
            add(s, name + "_error", quote_text(e.what()));
            return std::nullopt;
        }
    };
    const auto xr = fit("x_right_fit", &SeriesRecord::x_right);
    if (with_left) fit("x_left_fit", &SeriesRecord::x_left);
    const auto hm = fit("max_height_fit", &SeriesRecord::max_height);
    if (xr && hm) {
        add(s, "beta_fit", num(xr->exponent));
        add(s, "alpha_fit", num(-hm->exponent));
        add(s, "alpha_plus_2beta_fit", num(2.0 * xr->exponent - hm->exponent));
    }
}

void add_collapse(Summary& s, std::span<const Profile> snapshots) {
    if (snapshots.size() < 2) return;
    try {
        const CollapseMetric c = collapse_metric(snapshots);
        add(s, "collapse", num(c.value));
        add(s, "collapse_snapshots", std::to_string(c.used));
        if (c.excluded) add(s, "collapse_excluded", std::to_string(c.excluded));
    } catch (const std::domain_error& e) {
        add(s, "collapse_error", quote_text(e.what()));
    }
}

void add_config(Summary& s, const RunConfig& cfg) {
    add(s, "version", std::string(kVersion));
    for (auto& [k, v] : config_entries(cfg)) add(s, "config." + k, v);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("out", "cannot write '" + path.string() + "'");
    return out;
}

void write_run_files(const fs::path& dir, const RunOutput& run) {
    auto series = open_out(dir / "series.csv");
    write_series(series, run.series);
    auto snaps = open_out(dir / "snapshots.csv");
    write_snapshots(snaps, run.snapshots);
}

void write_summary_file(const fs::path& dir, const std::string& name, const Summary& s) {
    auto out = open_out(dir / name);
    write_summary(out, s);
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("out", "cannot create output directory '" + dir + "'");
    return fs::path(dir);
}

InitialCondition initial_condition(const RunConfig& cfg, double offset) {
    InitialCondition ic;
    ic.shape = cfg.ic_shape;
    ic.amplitude = cfg.ic_amplitude;
    ic.width = cfg.ic_width;
    ic.offset = offset;
    return ic;
}

DipoleRunConfig dipole_config(const RunConfig& cfg) {
    DipoleRunConfig d;
    d.params = cfg.params();
    d.ic = initial_condition(cfg, 0.0);
    d.n_cells = cfg.grid_n;
    d.cfl = cfg.cfl;
    d.t_start = cfg.t_start;
    d.t_end = cfg.t_end;
    d.series_samples = cfg.series_samples;
    d.snapshot_times = cfg.snapshots;
    return d;
}

EigenProblem eigen_problem(const RunConfig& cfg, double ratio) {
    EigenProblem p;
    p.ratio = ratio;
    p.eps_tip = cfg.eps_tip;
    p.step = cfg.ode_step;
    p.beta_tol = cfg.beta_tol;
    return p;
}

double dipole_drift(std::span<const SeriesRecord> series) {
    if (series.empty() || series.front().dipole_moment == 0.0) return 0.0;
    const double q0 = series.front().dipole_moment;
    double drift = 0.0;
    for (const auto& r : series) drift = std::max(drift, std::abs(r.dipole_moment - q0) / std::abs(q0));
    return drift;
}

Summary dipole_summary(const RunOutput& out) {
    Summary s;
    add(s, "steps", std::to_string(out.steps));
    if (!out.series.empty()) {
        add(s, "final_time", num(out.series.back().time));
        add(s, "final_x_right", num(out.series.back().x_right));
        add(s, "final_max_height", num(out.series.back().max_height));
    }
    add(s, "dipole_moment_drift", num(dipole_drift(out.series)));
    add_exponent_fits(s, out.series, false);
    add_collapse(s, out.snapshots);
    return s;
}

void run_dipole_problem(const RunConfig& cfg, const fs::path& dir) {
    const RunOutput out = run_dipole(dipole_config(cfg));
    write_run_files(dir, out);
    Summary s;
    add(s, "problem", "dipole");
    add(s, "ratio", num(cfg.ratio()));
    for (auto& kv : dipole_summary(out)) s.push_back(kv);
    add_config(s, cfg);
    write_summary_file(dir, "summary.txt", s);
}

void add_extinction(Summary& s, const RunOutput& out) {
    add(s, "extinction_time", out.extinction_time ? num(*out.extinction_time) : "none");
}

void run_drainage_problem(const RunConfig& cfg, const fs::path& dir) {
    DrainageRunConfig d;
    d.params = cfg.params();
    d.grid = {0.0, cfg.domain_length, cfg.grid_n};
    d.cfl = cfg.cfl;
    d.t_start = cfg.t_start;
    d.t_end = cfg.t_end;
    d.series_samples = cfg.series_samples;
    d.snapshot_times = cfg.snapshots;
    const InitialCondition ic = initial_condition(cfg, cfg.ic_offset);
    const FrontState init = make_front_state(ic, ic.offset, ic.offset + ic.width, d.grid, cfg.t_start);
    const double q = cfg.normalized_flux();
    const DrainageRunOutput out = run_drainage(d, init, q > 0.0 ? DrainageSpec::constant(q) : DrainageSpec::free_boundary());
    write_run_files(dir, out);

    Summary s;
    add(s, "problem", "drainage");
    add(s, "ratio", num(cfg.ratio()));
    add(s, "normalized_flux", num(q));
    add(s, "steps", std::to_string(out.steps));
    add_extinction(s, out);
    if (!out.series.empty()) {
        const double m0 = out.series.front().mass;
        add(s, "initial_mass", num(m0));
        add(s, "final_mass", num(out.series.back().mass));
        if (m0 > 0.0) add(s, "mass_change", num((out.series.back().mass - m0) / m0));
    }
    add_config(s, cfg);
    write_summary_file(dir, "summary.txt", s);
}

void run_flood_problem(const RunConfig& cfg, const fs::path& dir) {
    FloodDrainConfig f;
    f.run.params = cfg.params();
    f.run.grid = {0.0, cfg.domain_length, cfg.grid_n};
    f.run.cfl = cfg.cfl;
    f.run.t_start = cfg.t_start;
    f.run.t_end = cfg.t_end;
    f.run.series_samples = cfg.series_samples;
    f.run.snapshot_times = cfg.snapshots;
    f.ic = initial_condition(cfg, 0.0);
    f.t_switch = cfg.t_switch;
    f.multiplier = cfg.flux;
    const FloodDrainOutput out = run_flood_then_drain(f);
    write_run_files(dir, out);

    Summary s;
    add(s, "problem", "flood-drain");
    add(s, "ratio", num(cfg.ratio()));
    add(s, "natural_flux", num(out.natural_flux));
    add(s, "q0", num(out.q0));
    add(s, "q0_physical", num(out.q0 * cfg.porosity * cfg.kappa1));
    add(s, "steps", std::to_string(out.steps));
    add_extinction(s, out);
    add(s, "mass_increases", std::to_string(out.mass_increases));
    add(s, "max_mass_increase", num(out.max_mass_increase));
    add_config(s, cfg);
    write_summary_file(dir, "summary.txt", s);
}

void add_eigen(Summary& s, const EigenResult& e) {
    add(s, "beta", num(e.beta));
    add(s, "alpha", num(e.alpha()));
    add(s, "gamma", num(e.gamma()));
    add(s, "epsilon", num(e.epsilon_exp()));
    add(s, "alpha_plus_2beta", num(e.alpha() + 2.0 * e.beta));
    add(s, "residual", num(e.residual));
    add(s, "switch_point", e.switch_point ? num(*e.switch_point) : "none");
    add(s, "iterations", std::to_string(e.iterations));
}

void run_eigen_problem(const RunConfig& cfg, const fs::path& dir) {
    const EigenResult e = shoot_beta(eigen_problem(cfg, cfg.ratio()));
    auto profile = open_out(dir / "profile.csv");
    profile << "xi,f\n";
    for (std::size_t i = 0; i < e.xi.size(); ++i) profile << num(e.xi[i]) << ',' << num(e.f[i]) << '\n';

    Summary s;
    add(s, "problem", "eigen");
    add(s, "ratio", num(cfg.ratio()));
    add_eigen(s, e);
    add_config(s, cfg);
    write_summary_file(dir, "summary.txt", s);
}

std::string ratio_dir(double ratio) { return "ratio_" + num(ratio); }

void run_sweep_problem(const RunConfig& cfg, const fs::path& dir) {
    CompareConfig cc;
    cc.run = dipole_config(cfg);
    cc.eigen = eigen_problem(cfg, 1.0);
    cc.parallel = cfg.parallel;
    cc.observer = [&](const EigenResult& e, const DipoleRunConfig& run, const RunOutput& out) {
        const fs::path sub = prepare_dir((dir / ratio_dir(e.ratio)).string());
        write_run_files(sub, out);
        RunConfig member = cfg;
        member.problem = Problem::dipole;
        member.delta = run.params.delta();
        Summary s;
        add(s, "problem", "dipole");
        add(s, "ratio", num(e.ratio));
        add_eigen(s, e);
        for (auto& kv : dipole_summary(out)) s.push_back(kv);
        add_config(s, member);
        write_summary_file(sub, "summary.txt", s);
    };
    const auto rows = compare_eigen_pde(cfg.ratios, cc);

    Summary s;
    add(s, "problem", "sweep");
    add(s, "columns", "ratio,beta_eigen,beta_from_xr,alpha_from_max,alpha_plus_2beta");
    std::exception_ptr first_failure;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string key = "row." + std::to_string(i + 1);
        if (r.error) {
            add(s, key, num(r.ratio) + ",error," + quote_text(*r.error));
            if (!first_failure) first_failure = r.failure;
            continue;
        }
        add(s, key, num(r.ratio) + ',' + num(r.beta_eigen) + ',' + num(r.beta_from_xr) + ',' + num(r.alpha_from_max) +
                        ',' + num(r.alpha_plus_2beta));
    }
    add_config(s, cfg);
    write_summary_file(dir, "summary.txt", s);
    if (first_failure) std::rethrow_exception(first_failure);
}

void run_validate_problem(const RunConfig& cfg, const fs::path& dir) {
    EigenProblem prob = eigen_problem(cfg, 1.0);
    const SimilarityProfile sim = drainage_similarity(cfg.beta, prob, 1.0, cfg.kappa1);

    DrainageRunConfig d;
    d.params = PhysicalParams::from_ratio(cfg.kappa1, 1.0, cfg.porosity);
    d.grid = {0.0, cfg.domain_length, cfg.grid_n};
    d.cfl = cfg.cfl;
    d.t_start = cfg.t_start;
    d.t_end = cfg.t_end;
    d.series_samples = cfg.series_samples;
    d.snapshot_times = cfg.snapshots;
    if (!(sim.x_right(cfg.t_end) < cfg.domain_length))
        throw ConfigError("domain_length", "domain_length must exceed the right front at t_end (" +
                                               num(sim.x_right(cfg.t_end)) + ")");
    const FrontState init = make_front_state([&sim, &cfg](double x) { return eval_similarity(sim, x, cfg.t_start); },
                                             sim.x_left(cfg.t_start), sim.x_right(cfg.t_start), d.grid, cfg.t_start);
    const DrainageRunOutput out =
        run_drainage(d, init, DrainageSpec::law([&sim](double t) { return sim.normalized_flux(t); }));
    write_run_files(dir, out);
    const SimilarityErrors err = similarity_error(out, sim);

    Summary s;
    add(s, "problem", "validate-similarity");
    add(s, "beta", num(sim.beta));
    add(s, "lambda", num(sim.lambda));
    add(s, "dg_left", num(sim.dg_left));
    add(s, "flux_exponent", num(3.0 * sim.beta - 2.0));
    add(s, "steps", std::to_string(out.steps));
    add_extinction(s, out);
    for (std::size_t i = 0; i < err.snapshot_times.size(); ++i)
        add(s, "sup_error." + num(err.snapshot_times[i]), num(err.sup_h_rel_err[i]));
    add(s, "max_x_left_error", num(err.max_xl()));
    add(s, "max_x_right_error", num(err.max_xr()));
    add_exponent_fits(s, out.series, true);
    add_config(s, cfg);
    write_summary_file(dir, "summary.txt", s);
}

void run_analyze_problem(const RunConfig& cfg, const fs::path& dir) {
    const fs::path in(cfg.input);
    std::ifstream series_in(in / "series.csv");
    if (!series_in) throw ConfigError("input", "cannot read '" + (in / "series.csv").string() + "'");
    const auto series = read_series(series_in);
    std::vector<Profile> snapshots;
    if (std::ifstream snaps_in(in / "snapshots.csv"); snaps_in) snapshots = read_snapshots(snaps_in);

    Summary s;
    add(s, "problem", "analyze");
    add(s, "series_rows", std::to_string(series.size()));
    add(s, "snapshots", std::to_string(snapshots.size()));
    add_exponent_fits(s, series, false);
    add(s, "dipole_moment_drift", num(dipole_drift(series)));
    add_collapse(s, snapshots);
    add_config(s, cfg);
    write_summary_file(dir, "analysis.txt", s);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    return cells;
}

double cell(const std::string& text, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("input", "bad number '" + text + "'", line);
    }
}

void expect_header(std::istream& in, std::string_view header) {
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw ConfigError("input", "expected header '" + std::string(header) + "'", 1);
}

}  // namespace

void write_series(std::ostream& out, std::span<const SeriesRecord> series) {
    out << kSeriesHeader << '\n';
    for (const auto& r : series)
        out << num(r.time) << ',' << num(r.x_left) << ',' << num(r.x_right) << ',' << num(r.max_height) << ','
            << num(r.mass) << ',' << num(r.dipole_moment) << ',' << num(r.left_normalized_flux) << '\n';
}

void write_snapshots(std::ostream& out, std::span<const Profile> snapshots) {
    out << kSnapshotHeader << '\n';
    for (const auto& p : snapshots)
        for (std::size_t i = 0; i < p.heights.size(); ++i)
            out << num(p.time) << ',' << num(p.x_at(i)) << ',' << num(p.heights[i]) << '\n';
}

void write_summary(std::ostream& out, const Summary& summary) {
    for (const auto& [k, v] : summary) out << k << " = " << v << '\n';
}

std::vector<SeriesRecord> read_series(std::istream& in) {
    expect_header(in, kSeriesHeader);
    std::vector<SeriesRecord> rows;
    int line_no = 1;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.empty()) continue;
        const auto c = split(line);
        if (c.size() != 7) throw ConfigError("input", "series row needs 7 columns", line_no);
        rows.push_back({cell(c[0], line_no), cell(c[1], line_no), cell(c[2], line_no), cell(c[3], line_no),
                        cell(c[4], line_no), cell(c[5], line_no), cell(c[6], line_no)});
    }
    return rows;
}

std::vector<Profile> read_snapshots(std::istream& in) {
    expect_header(in, kSnapshotHeader);
    std::vector<Profile> out;
    std::vector<double> xs;
    int line_no = 1;
    auto finish = [&] {
        if (out.empty()) return;
        Profile& p = out.back();
        if (xs.size() < 2) throw ConfigError("input", "snapshot at t = " + num(p.time) + " has fewer than 2 points");
        p.x_left = xs.front();
        p.x_right = xs.back();
        xs.clear();
    };
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.empty()) continue;
        const auto c = split(line);
        if (c.size() != 3) throw ConfigError("input", "snapshot row needs 3 columns", line_no);
        const double t = cell(c[0], line_no);
        if (out.empty() || out.back().time != t) {
            finish();
            out.push_back(Profile{t, 0.0, 1.0, {}});
        }
        xs.push_back(cell(c[1], line_no));
        out.back().heights.push_back(cell(c[2], line_no));
    }
    finish();
    return out;
}

int report_current_exception(std::ostream& diag) {
    try {
        throw;
    } catch (const ConfigError& e) {
        diag << "error code=" << exit_config << " kind=config field=" << (e.field().empty() ? "-" : e.field())
             << " line=" << e.line() << " message=" << quote_text(e.what()) << '\n';
        return exit_config;
    } catch (const InstabilityError& e) {
        diag << "error code=" << exit_instability << " kind=instability time=" << num(e.time())
             << " message=" << quote_text(e.what()) << '\n';
        return exit_instability;
    } catch (const ConvergenceError& e) {
        diag << "error code=" << exit_convergence << " kind=convergence message=" << quote_text(e.what()) << '\n';
        return exit_convergence;
    } catch (const std::invalid_argument& e) {
        diag << "error code=" << exit_config << " kind=config field=- line=0 message=" << quote_text(e.what()) << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        diag << "error code=1 kind=internal message=" << quote_text(e.what()) << '\n';
        return 1;
    }
}

int run(const RunConfig& cfg, std::ostream& diag) {
    try {
        const fs::path dir = prepare_dir(cfg.out);
        switch (cfg.problem) {
            case Problem::dipole: run_dipole_problem(cfg, dir); break;
            case Problem::drainage: run_drainage_problem(cfg, dir); break;
            case Problem::flood_drain: run_flood_problem(cfg, dir); break;
            case Problem::eigen: run_eigen_problem(cfg, dir); break;
            case Problem::sweep: run_sweep_problem(cfg, dir); break;
            case Problem::validate_similarity: run_validate_problem(cfg, dir); break;
            case Problem::analyze: run_analyze_problem(cfg, dir); break;
        }
        return exit_ok;
    } catch (...) {
        return report_current_exception(diag);
    }
}

}  // namespace mound
