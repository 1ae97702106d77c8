#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "mound/config.hpp"
#include "mound/errors.hpp"

using namespace mound;

namespace {

ConfigError config_error(std::string_view text, const Overrides& overrides = {}) {
    try {
        parse_config(text, overrides);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "expected ConfigError for:\n" << text;
    return ConfigError("", "");
}

std::string as_text(const RunConfig& c) {
    std::string text;
    for (const auto& [k, v] : config_entries(c)) text += k + " = " + v + "\n";
    return text;
}

}  // namespace

TEST(Config, MinimalEigenUsesDefaults) {
    const RunConfig c = parse_config("problem = eigen\nratio = 1.0\n");
    EXPECT_EQ(c, defaults_for(Problem::eigen));
    EXPECT_DOUBLE_EQ(c.ratio(), 1.0);
    EXPECT_DOUBLE_EQ(c.eps_tip, 1e-6);
    EXPECT_DOUBLE_EQ(c.ode_step, 1e-3);
}

TEST(Config, CommentsBlankLinesAndInlineTokens) {
    const RunConfig c = parse_config("# header\n\nproblem=dipole ratio=0.5   # trailing\n  grid_n = 120\n");
    EXPECT_EQ(c.problem, Problem::dipole);
    EXPECT_DOUBLE_EQ(c.delta, 0.5);
    EXPECT_EQ(c.grid_n, 120u);
}

TEST(Config, RatioOutsideRangeRejected) {
    const ConfigError e = config_error("problem = eigen\nratio = 1.5\n");
    EXPECT_EQ(e.field(), "ratio");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(config_error("problem = eigen\nratio = 0\n").field(), "ratio");
    EXPECT_EQ(config_error("problem = eigen\ndelta = 1\n").field(), "delta");
}

TEST(Config, RatioAndDeltaMustAgree) {
    EXPECT_NO_THROW(parse_config("problem = eigen\nratio = 0.75\ndelta = 0.25\n"));
    EXPECT_EQ(config_error("problem = eigen\nratio = 0.5\ndelta = 0.25\n").field(), "ratio");
}

TEST(Config, UnknownKeyReportsLine) {
    const ConfigError e = config_error("problem = eigen\n\n# comment\nkapa1 = 2\n");
    EXPECT_EQ(e.field(), "kapa1");
    EXPECT_EQ(e.line(), 4);
}

TEST(Config, DuplicateAndMalformedLines) {
    EXPECT_EQ(config_error("problem = eigen\nratio = 0.5\nratio = 0.5\n").line(), 3);
    EXPECT_EQ(config_error("problem = dipole\ngrid_n\n").line(), 2);
    EXPECT_EQ(config_error("problem = dipole\ncfl = fast\n").field(), "cfl");
    EXPECT_EQ(config_error("problem = dipole\ngrid_n = -3\n").field(), "grid_n");
    EXPECT_EQ(config_error("problem = dipole\nt_end = nan\n").field(), "t_end");
    EXPECT_EQ(config_error("problem = sweep\nratios = 1,,0.5\n").field(), "ratios");
    EXPECT_EQ(config_error("problem = nonsense\n").field(), "problem");
}

TEST(Config, KeyMustApplyToProblem) {
    const ConfigError e = config_error("problem = eigen\ngrid_n = 100\n");
    EXPECT_EQ(e.field(), "grid_n");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(config_error("problem = dipole\nflux = 1\n").field(), "flux");
    EXPECT_EQ(config_error("problem = drainage\nt_switch = 1\n").field(), "t_switch");
}

TEST(Config, RangeChecksNameTheirKey) {
    EXPECT_EQ(config_error("problem = dipole\ncfl = 1.5\n").field(), "cfl");
    EXPECT_EQ(config_error("problem = dipole\ngrid_n = 4\n").field(), "grid_n");
    EXPECT_EQ(config_error("problem = dipole\nt_start = 0\n").field(), "t_start");
    EXPECT_EQ(config_error("problem = dipole\nt_end = 0.05\n").field(), "t_end");
    EXPECT_EQ(config_error("problem = drainage\nflux = -1\n").field(), "flux");
    EXPECT_EQ(config_error("problem = drainage\nic_width = 9\n").field(), "ic_offset");
    EXPECT_EQ(config_error("problem = validate-similarity\nbeta = 0.3\n").field(), "beta");
    EXPECT_EQ(config_error("problem = sweep\nratios = 1,2\n").field(), "ratios");
    EXPECT_EQ(config_error("problem = eigen\neps_tip = 0.5\n").field(), "eps_tip");
    EXPECT_EQ(config_error("problem = dipole\nsnapshots = 0.05\n").field(), "snapshots");
    EXPECT_EQ(config_error("problem = analyze\n").field(), "input");
    EXPECT_EQ(config_error("problem = dipole\nkappa1 = 0\n").field(), "kappa1");
    EXPECT_EQ(config_error("problem = dipole\nporosity = 2\n").field(), "porosity");
}

TEST(Config, PhysicalFluxIsNormalized) {
    const RunConfig c =
        parse_config("problem = drainage\nflux = 0.3\nflux_units = physical\nkappa1 = 2\nporosity = 0.25\n");
    EXPECT_DOUBLE_EQ(c.normalized_flux(), 0.3 / (0.25 * 2.0));
    const RunConfig n = parse_config("problem = drainage\nflux = 0.3\n");
    EXPECT_DOUBLE_EQ(n.normalized_flux(), 0.3);
    EXPECT_EQ(config_error("problem = drainage\nflux_units = litres\n").field(), "flux_units");
}

TEST(Config, OverridesWinOverText) {
    const RunConfig c = parse_config("problem = dipole\nratio = 0.5\ngrid_n = 100\n",
                                     {{"grid_n", "64"}, {"ratio", "0.7"}});
    EXPECT_EQ(c.grid_n, 64u);
    EXPECT_NEAR(c.ratio(), 0.7, 1e-15);
    const ConfigError e = config_error("problem = dipole\n", {{"cfl", "3"}});
    EXPECT_EQ(e.field(), "cfl");
    EXPECT_EQ(e.line(), 0);
    EXPECT_EQ(config_error("", {{"bogus", "1"}}).field(), "bogus");
}

TEST(Config, ProblemDefaultsAndDerivedValues) {
    const RunConfig d = parse_config("problem = drainage\n");
    EXPECT_DOUBLE_EQ(d.ic_offset, 0.5 * (8.0 - 1.0));
    EXPECT_EQ(d.snapshots.size(), 5u);
    const RunConfig f = parse_config("problem = flood-then-drain\n");
    EXPECT_EQ(f.problem, Problem::flood_drain);
    EXPECT_EQ(f.snapshots, (std::vector<double>{1.0, 20.0}));
    const RunConfig v = parse_config("problem = validate-similarity\n");
    EXPECT_EQ(v.snapshots, (std::vector<double>{1.0, 2.0, 5.0, 10.0}));
    const RunConfig dip = parse_config("problem = dipole\nt_end = 10\n");
    EXPECT_EQ(dip.snapshots.size(), 11u);
    EXPECT_DOUBLE_EQ(dip.snapshots.front(), 1.0);
    EXPECT_DOUBLE_EQ(dip.snapshots.back(), 10.0);
    const RunConfig a = parse_config("problem = analyze\ninput = runs/a\n");
    EXPECT_EQ(a.out, "runs/a");
}

TEST(Config, SnapshotsSortedAndDeduplicated) {
    const RunConfig c = parse_config("problem = dipole\nt_end = 10\nsnapshots = 5, 1, 5, 10\n");
    EXPECT_EQ(c.snapshots, (std::vector<double>{1.0, 5.0, 10.0}));
}

TEST(Config, EntriesRoundTripForEveryProblem) {
    const char* texts[] = {
        "problem = dipole\nratio = 0.3\nt_end = 50\ngrid_n = 333\n",
        "problem = drainage\nflux = 0.7\nflux_units = physical\nkappa1 = 0.3\nporosity = 0.4\n",
        "problem = flood-drain\nflux = 4\nt_switch = 2.5\ndelta = 0.123456789\n",
        "problem = eigen\nratio = 0.1\neps_tip = 1e-7\nbeta_tol = 1e-12\n",
        "problem = sweep\nratios = 0.9, 0.4\nparallel = false\nt_end = 20\n",
        "problem = validate-similarity\nbeta = 0.21\nt_end = 3\n",
        "problem = analyze\ninput = somewhere\nout = elsewhere\n",
    };
    for (const char* text : texts) {
        const RunConfig c = parse_config(text);
        EXPECT_EQ(parse_config(as_text(c)), c) << text;
    }
}

TEST(Config, EntriesOnlyListApplicableKeys) {
    const RunConfig c = defaults_for(Problem::eigen);
    for (const auto& [k, v] : config_entries(c)) {
        EXPECT_NE(k, "grid_n");
        EXPECT_NE(k, "flux");
    }
}

TEST(Config, SummaryEchoRoundTrip) {
    const RunConfig c = parse_config("problem = dipole\nratio = 0.7\nt_end = 12.5\n");
    std::string summary = "steps = 10\nbeta_fit = 0.2\n";
    for (const auto& [k, v] : config_entries(c)) summary += "config." + k + " = " + v + "\n";
    EXPECT_EQ(config_from_summary(summary), c);
}

TEST(Config, FormatDoubleRoundTrips) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-30, 30);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mant(rng), expo(rng));
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(100.0), "100");
}
