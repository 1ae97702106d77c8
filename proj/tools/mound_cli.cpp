#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mound/app.hpp"
#include "mound/config.hpp"
#include "mound/errors.hpp"

namespace {

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

constexpr Flag kCommon[] = {
    {"--out", "out", "output directory"},
    {"--cfl", "cfl", "explicit step safety factor"},
    {"--grid-n", "grid_n", "number of grid intervals"},
    {"--t-start", "t_start", "start time"},
    {"--t-end", "t_end", "end time"},
    {"--snapshots", "snapshots", "comma-separated snapshot times"},
    {"--series-samples", "series_samples", "number of series rows"},
};

constexpr Flag kMedium[] = {
    {"--kappa1", "kappa1", "diffusivity of advancing water"},
    {"--ratio", "ratio", "kappa1 / kappa2 in (0, 1]"},
    {"--delta", "delta", "trapped fraction, 1 - ratio"},
};

constexpr Flag kEigen[] = {
    {"--eps-tip", "eps_tip", "series hand-over offset from the tip"},
    {"--ode-step", "ode_step", "largest integration step"},
    {"--beta-tol", "beta_tol", "bisection bracket width"},
};

struct Command {
    CLI::App* app;
    mound::Overrides overrides;
};

template <std::size_t N>
void bind(CLI::App* app, mound::Overrides& overrides, const Flag (&flags)[N]) {
    for (const Flag& f : flags) {
        app->add_option_function<std::string>(
            f.name, [&overrides, key = std::string(f.key)](const std::string& v) { overrides[key] = v; }, f.help);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Groundwater mound spreading and drainage solvers"};
    cli.require_subcommand(1);
    cli.set_version_flag("--version", std::string(mound::kVersion));

    std::string config_path;
    mound::Overrides overrides;
    std::string analyze_dir;

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = cli.add_subcommand(name, help);
        sub->add_option("--config", config_path, "config file of key = value lines")->check(CLI::ExistingFile);
        return sub;
    };

    CLI::App* dipole = add("dipole", "spreading mound on a rescaled grid");
    bind(dipole, overrides, kCommon);
    bind(dipole, overrides, kMedium);

    CLI::App* drainage = add("drainage", "fixed-grid mound with a draining left edge");
    bind(drainage, overrides, kCommon);
    bind(drainage, overrides, kMedium);
    drainage->add_option_function<std::string>(
        "--flux", [&](const std::string& v) { overrides["flux"] = v; }, "constant drainage flux, 0 for a free edge");

    CLI::App* flood = add("flood-drain", "natural outflow, then forced drainage");
    bind(flood, overrides, kCommon);
    bind(flood, overrides, kMedium);
    flood->add_option_function<std::string>(
        "--flux", [&](const std::string& v) { overrides["flux"] = v; }, "multiplier of the natural flux at the switch");
    flood->add_option_function<std::string>(
        "--t-switch", [&](const std::string& v) { overrides["t_switch"] = v; }, "time drainage starts");

    CLI::App* eigen = add("eigen", "self-similar exponent by shooting");
    bind(eigen, overrides, kMedium);
    bind(eigen, overrides, kEigen);
    eigen->add_option_function<std::string>(
        "--out", [&](const std::string& v) { overrides["out"] = v; }, "output directory");

    CLI::App* sweep = add("sweep", "eigenvalue against dipole runs over several ratios");
    bind(sweep, overrides, kCommon);
    bind(sweep, overrides, kEigen);
    sweep->add_option_function<std::string>(
        "--kappa1", [&](const std::string& v) { overrides["kappa1"] = v; }, "diffusivity of advancing water");
    sweep->add_option_function<std::string>(
        "--ratios", [&](const std::string& v) { overrides["ratios"] = v; }, "comma-separated ratios");

    CLI::App* validate = add("validate-similarity", "drainage run against its exact self-similar solution");
    bind(validate, overrides, kCommon);
    validate->add_option_function<std::string>(
        "--kappa1", [&](const std::string& v) { overrides["kappa1"] = v; }, "diffusivity");
    validate->add_option_function<std::string>(
        "--beta", [&](const std::string& v) { overrides["beta"] = v; }, "front exponent below 0.25");

    CLI::App* analyze = add("analyze", "fits and collapse for an existing output directory");
    analyze->add_option("DIR", analyze_dir, "directory with series.csv")->required();
    analyze->add_option_function<std::string>(
        "--out", [&](const std::string& v) { overrides["out"] = v; }, "where analysis.txt goes (default DIR)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : mound::exit_config;
    }

    const CLI::App* chosen = cli.get_subcommands().front();
    overrides["problem"] = chosen->get_name();
    if (chosen == analyze) overrides["input"] = analyze_dir;

    mound::RunConfig cfg;
    try {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw mound::ConfigError("config", "cannot read '" + config_path + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        cfg = mound::parse_config(text, overrides);
    } catch (...) {
        return mound::report_current_exception(std::cerr);
    }
    return mound::run(cfg, std::cerr);
}
