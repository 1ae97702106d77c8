#include "mound/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mound/errors.hpp"

namespace mound {

namespace {

using Mask = unsigned;

constexpr Mask bit(Problem p) { return 1u << static_cast<unsigned>(p); }

constexpr Mask kDipole = bit(Problem::dipole);
constexpr Mask kDrainage = bit(Problem::drainage);
constexpr Mask kFlood = bit(Problem::flood_drain);
constexpr Mask kEigen = bit(Problem::eigen);
constexpr Mask kSweep = bit(Problem::sweep);
constexpr Mask kValidate = bit(Problem::validate_similarity);
constexpr Mask kAnalyze = bit(Problem::analyze);
constexpr Mask kAll = 0x7f;
constexpr Mask kMarching = kDipole | kDrainage | kFlood | kSweep | kValidate;

struct KeyInfo {
    std::string_view name;
    Mask problems;
};

// echo order
constexpr KeyInfo kKeys[] = {
    {"problem", kAll},
    {"kappa1", kMarching},
    {"ratio", kDipole | kDrainage | kFlood | kEigen},
    {"delta", kDipole | kDrainage | kFlood | kEigen},
    {"porosity", kMarching},
    {"grid_n", kMarching},
    {"cfl", kMarching},
    {"t_start", kMarching},
    {"t_end", kMarching},
    {"snapshots", kMarching},
    {"series_samples", kMarching},
    {"ic_shape", kDipole | kDrainage | kFlood | kSweep},
    {"ic_amplitude", kDipole | kDrainage | kFlood | kSweep},
    {"ic_width", kDipole | kDrainage | kFlood | kSweep},
    {"ic_offset", kDrainage},
    {"domain_length", kDrainage | kFlood | kValidate},
    {"flux", kDrainage | kFlood},
    {"flux_units", kDrainage},
    {"t_switch", kFlood},
    {"beta", kValidate},
    {"ratios", kSweep},
    {"parallel", kSweep},
    {"eps_tip", kEigen | kSweep | kValidate},
    {"ode_step", kEigen | kSweep | kValidate},
    {"beta_tol", kEigen | kSweep},
    {"out", kAll},
    {"input", kAnalyze},
};

const KeyInfo* find_key(std::string_view name) {
    for (const auto& k : kKeys)
        if (k.name == name) return &k;
    return nullptr;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Entry {
    std::string value;
    int line = 0;
};

double to_double(const std::string& key, const Entry& e) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    if (!e.value.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ConfigError(key, "'" + e.value + "' is not a finite number", e.line);
    return v;
}

std::size_t to_size(const std::string& key, const Entry& e) {
    std::size_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ConfigError(key, "'" + e.value + "' is not a nonnegative integer", e.line);
    return v;
}

bool to_bool(const std::string& key, const Entry& e) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigError(key, "'" + e.value + "' is not true or false", e.line);
}

std::vector<double> to_list(const std::string& key, const Entry& e) {
    std::vector<double> out;
    std::string_view rest = e.value;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item = trim(rest.substr(0, comma));
        if (item.empty()) throw ConfigError(key, "empty item in list '" + e.value + "'", e.line);
        out.push_back(to_double(key, {item, e.line}));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
        if (rest.empty()) throw ConfigError(key, "trailing comma in list '" + e.value + "'", e.line);
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

void require(bool ok, const std::string& key, const std::string& what, const std::map<std::string, Entry>& given) {
    if (ok) return;
    const auto it = given.find(key);
    throw ConfigError(key, key + " " + what, it == given.end() ? 0 : it->second.line);
}

std::map<std::string, Entry> read_entries(std::string_view text) {
    std::map<std::string, Entry> entries;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;

        std::vector<std::string> tokens;
        if (std::count(line.begin(), line.end(), '=') == 1) {
            tokens.push_back(line);
        } else {
            std::istringstream words(line);
            for (std::string w; words >> w;) tokens.push_back(w);
        }
        for (const auto& token : tokens) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) throw ConfigError(trim(token), "expected key = value", line_no);
            const std::string key = trim(std::string_view(token).substr(0, eq));
            const std::string value = trim(std::string_view(token).substr(eq + 1));
            if (key.empty()) throw ConfigError("", "missing key before '='", line_no);
            if (!find_key(key)) throw ConfigError(key, "unknown key '" + key + "'", line_no);
            if (entries.count(key)) throw ConfigError(key, "key '" + key + "' given twice", line_no);
            entries[key] = {value, line_no};
        }
    }
    return entries;
}

std::vector<double> default_snapshots(const RunConfig& c) {
    switch (c.problem) {
        case Problem::dipole:
        case Problem::sweep: {
            // one decade (or the whole run when shorter) ending at t_end
            const double first = std::max(c.t_start, c.t_end / 10.0);
            if (!(first > 0.0)) return sample_times(c.t_start, c.t_end, 11);
            return sample_times(first, c.t_end, 11);
        }
        case Problem::drainage: return sample_times(c.t_start, c.t_end, 5);
        case Problem::flood_drain: return {c.t_switch, c.t_end};
        case Problem::validate_similarity: {
            std::vector<double> s{c.t_start};
            for (double t : {2.0, 5.0, 10.0})
                if (t > c.t_start && t < c.t_end) s.push_back(t);
            s.push_back(c.t_end);
            return s;
        }
        default: return {};
    }
}

void validate(RunConfig& c, const std::map<std::string, Entry>& given) {
    const Mask m = bit(c.problem);
    require(c.kappa1 > 0.0, "kappa1", "must be positive", given);
    if (given.count("ratio")) require(c.ratio() > 0.0 && c.ratio() <= 1.0, "ratio", "must lie in (0, 1]", given);
    require(c.delta >= 0.0 && c.delta < 1.0, given.count("delta") ? "delta" : "ratio",
            given.count("delta") ? "must lie in [0, 1)" : "must lie in (0, 1]", given);
    require(c.porosity > 0.0 && c.porosity <= 1.0, "porosity", "must lie in (0, 1]", given);

    if (m & kMarching) {
        require(c.grid_n >= 8, "grid_n", "must be at least 8", given);
        require(c.cfl > 0.0 && c.cfl <= 1.0, "cfl", "must lie in (0, 1]", given);
        require(c.t_start >= 0.0, "t_start", "must be nonnegative", given);
        require(c.t_end >= c.t_start, "t_end", "must not precede t_start", given);
        require(c.series_samples >= 2, "series_samples", "must be at least 2", given);
    }
    if (m & (kDipole | kDrainage | kFlood | kSweep)) {
        require(c.ic_amplitude > 0.0, "ic_amplitude", "must be positive", given);
        require(c.ic_width > 0.0, "ic_width", "must be positive", given);
    }
    if (m & (kDipole | kSweep)) require(c.t_start > 0.0, "t_start", "must be positive for exponent fits", given);
    if (m & kDrainage) {
        if (!given.count("ic_offset")) c.ic_offset = 0.5 * (c.domain_length - c.ic_width);
        require(c.ic_offset > 0.0 && c.ic_offset + c.ic_width < c.domain_length, "ic_offset",
                "must keep the initial bump strictly inside the domain", given);
        require(c.flux >= 0.0, "flux", "must be nonnegative", given);
    }
    if (m & kFlood) {
        require(c.domain_length > c.ic_width, "domain_length", "must exceed ic_width", given);
        require(c.flux >= 0.0, "flux", "multiplier must be nonnegative", given);
        require(c.t_switch > c.t_start && c.t_switch <= c.t_end, "t_switch", "must lie in (t_start, t_end]", given);
    }
    if (m & kValidate) {
        require(c.beta > 0.0 && c.beta < 0.25, "beta", "must lie in (0, 0.25)", given);
        require(c.t_start > 0.0, "t_start", "must be positive for the similarity solution", given);
        require(c.domain_length > 0.0, "domain_length", "must be positive", given);
    }
    if (m & kSweep) {
        require(!c.ratios.empty(), "ratios", "must list at least one ratio", given);
        for (double r : c.ratios) require(r > 0.0 && r <= 1.0, "ratios", "entries must lie in (0, 1]", given);
    }
    if (m & (kEigen | kSweep | kValidate)) {
        require(c.eps_tip > 0.0 && c.eps_tip < 1e-2, "eps_tip", "must lie in (0, 1e-2)", given);
        require(c.ode_step > 0.0 && c.ode_step <= 0.1, "ode_step", "must lie in (0, 0.1]", given);
        require(c.beta_tol > 0.0, "beta_tol", "must be positive", given);
    }
    if (m & kAnalyze) {
        require(!c.input.empty(), "input", "is required for analyze", given);
        if (!given.count("out")) c.out = c.input;
    }
    require(!c.out.empty(), "out", "must not be empty", given);

    if (m & kMarching) {
        if (!given.count("snapshots")) c.snapshots = default_snapshots(c);
        for (double t : c.snapshots)
            require(t >= c.t_start && t <= c.t_end, "snapshots", "must lie within [t_start, t_end]", given);
        std::sort(c.snapshots.begin(), c.snapshots.end());
        c.snapshots.erase(std::unique(c.snapshots.begin(), c.snapshots.end()), c.snapshots.end());
    }
}

}  // namespace

std::string_view to_string(Problem p) {
    switch (p) {
        case Problem::dipole: return "dipole";
        case Problem::drainage: return "drainage";
        case Problem::flood_drain: return "flood-drain";
        case Problem::eigen: return "eigen";
        case Problem::sweep: return "sweep";
        case Problem::validate_similarity: return "validate-similarity";
        case Problem::analyze: return "analyze";
    }
    return "?";
}

Problem parse_problem(std::string_view name) {
    for (Problem p : {Problem::dipole, Problem::drainage, Problem::flood_drain, Problem::eigen, Problem::sweep,
                      Problem::validate_similarity, Problem::analyze})
        if (to_string(p) == name) return p;
    if (name == "flood-then-drain") return Problem::flood_drain;
    throw ConfigError("problem", "unknown problem '" + std::string(name) + "'");
}

PhysicalParams RunConfig::params() const { return PhysicalParams::from_delta(kappa1, delta, porosity); }

double RunConfig::normalized_flux() const {
    return flux_units == FluxUnits::physical ? flux / (porosity * kappa1) : flux;
}

RunConfig defaults_for(Problem problem) {
    RunConfig c;
    c.problem = problem;
    switch (problem) {
        case Problem::drainage:
            c.t_start = 0.0;
            c.t_end = 10.0;
            c.domain_length = 8.0;
            break;
        case Problem::flood_drain:
            c.t_start = 0.1;
            c.t_end = 20.0;
            c.domain_length = 5.0;
            c.flux = 2.0;
            break;
        case Problem::validate_similarity:
            c.t_start = 1.0;
            c.t_end = 10.0;
            c.domain_length = 2.0;
            break;
        default: break;
    }
    return c;
}

RunConfig parse_config(std::string_view text, const Overrides& overrides) {
    std::map<std::string, Entry> given = read_entries(text);
    for (const auto& [key, value] : overrides) {
        if (!find_key(key)) throw ConfigError(key, "unknown key '" + key + "'");
        given[key] = {value, 0};
    }

    Problem problem = Problem::eigen;
    if (const auto it = given.find("problem"); it != given.end()) {
        try {
            problem = parse_problem(it->second.value);
        } catch (const ConfigError& e) {
            throw ConfigError("problem", e.what(), it->second.line);
        }
    }
    RunConfig c = defaults_for(problem);

    for (const auto& [key, e] : given) {
        const KeyInfo* info = find_key(key);
        if (!(info->problems & bit(problem)))
            throw ConfigError(key, "key '" + key + "' does not apply to problem " + std::string(to_string(problem)),
                              e.line);
        if (key == "problem") continue;
        if (key == "kappa1") c.kappa1 = to_double(key, e);
        else if (key == "ratio") {
            const double r = to_double(key, e);
            if (!(r > 0.0 && r <= 1.0)) throw ConfigError(key, "ratio must lie in (0, 1]", e.line);
            if (!given.count("delta")) c.delta = 1.0 - r;
        }
        else if (key == "delta") c.delta = to_double(key, e);
        else if (key == "porosity") c.porosity = to_double(key, e);
        else if (key == "grid_n") c.grid_n = to_size(key, e);
        else if (key == "cfl") c.cfl = to_double(key, e);
        else if (key == "t_start") c.t_start = to_double(key, e);
        else if (key == "t_end") c.t_end = to_double(key, e);
        else if (key == "snapshots") c.snapshots = to_list(key, e);
        else if (key == "series_samples") c.series_samples = to_size(key, e);
        else if (key == "ic_shape") {
            try {
                c.ic_shape = parse_initial_shape(e.value);
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(key, ex.what(), e.line);
            }
        }
        else if (key == "ic_amplitude") c.ic_amplitude = to_double(key, e);
        else if (key == "ic_width") c.ic_width = to_double(key, e);
        else if (key == "ic_offset") c.ic_offset = to_double(key, e);
        else if (key == "domain_length") c.domain_length = to_double(key, e);
        else if (key == "flux") c.flux = to_double(key, e);
        else if (key == "flux_units") {
            if (e.value == "normalized") c.flux_units = FluxUnits::normalized;
            else if (e.value == "physical") c.flux_units = FluxUnits::physical;
            else throw ConfigError(key, "flux_units must be normalized or physical", e.line);
        }
        else if (key == "t_switch") c.t_switch = to_double(key, e);
        else if (key == "beta") c.beta = to_double(key, e);
        else if (key == "ratios") c.ratios = to_list(key, e);
        else if (key == "parallel") c.parallel = to_bool(key, e);
        else if (key == "eps_tip") c.eps_tip = to_double(key, e);
        else if (key == "ode_step") c.ode_step = to_double(key, e);
        else if (key == "beta_tol") c.beta_tol = to_double(key, e);
        else if (key == "out") c.out = e.value;
        else if (key == "input") c.input = e.value;
    }
    if (given.count("ratio") && given.count("delta")) {
        const auto& r = given.at("ratio");
        if (std::abs(to_double("ratio", r) - c.ratio()) > 1e-12)
            throw ConfigError("ratio", "ratio and delta disagree (ratio must equal 1 - delta)", r.line);
    }
    validate(c, given);
    return c;
}

RunConfig load_config(const std::string& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), overrides);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> out;
    const Mask m = bit(c.problem);
    for (const auto& k : kKeys) {
        if (!(k.problems & m)) continue;
        const std::string name(k.name);
        // ratio when it reads back to the same delta, delta otherwise
        const std::string ratio_text = format_double(c.ratio());
        const bool ratio_exact = 1.0 - to_double("ratio", {ratio_text, 0}) == c.delta;
        std::string v;
        if (name == "problem") v = to_string(c.problem);
        else if (name == "kappa1") v = format_double(c.kappa1);
        else if (name == "ratio") {
            if (!ratio_exact) continue;
            v = ratio_text;
        }
        else if (name == "delta") {
            if (ratio_exact) continue;
            v = format_double(c.delta);
        }
        else if (name == "porosity") v = format_double(c.porosity);
        else if (name == "grid_n") v = std::to_string(c.grid_n);
        else if (name == "cfl") v = format_double(c.cfl);
        else if (name == "t_start") v = format_double(c.t_start);
        else if (name == "t_end") v = format_double(c.t_end);
        else if (name == "snapshots") {
            if (c.snapshots.empty()) continue;
            v = join(c.snapshots);
        }
        else if (name == "series_samples") v = std::to_string(c.series_samples);
        else if (name == "ic_shape") v = to_string(c.ic_shape);
        else if (name == "ic_amplitude") v = format_double(c.ic_amplitude);
        else if (name == "ic_width") v = format_double(c.ic_width);
        else if (name == "ic_offset") v = format_double(c.ic_offset);
        else if (name == "domain_length") v = format_double(c.domain_length);
        else if (name == "flux") v = format_double(c.flux);
        else if (name == "flux_units") v = c.flux_units == FluxUnits::physical ? "physical" : "normalized";
        else if (name == "t_switch") v = format_double(c.t_switch);
        else if (name == "beta") v = format_double(c.beta);
        else if (name == "ratios") v = join(c.ratios);
        else if (name == "parallel") v = c.parallel ? "true" : "false";
        else if (name == "eps_tip") v = format_double(c.eps_tip);
        else if (name == "ode_step") v = format_double(c.ode_step);
        else if (name == "beta_tol") v = format_double(c.beta_tol);
        else if (name == "out") v = c.out;
        else if (name == "input") v = c.input;
        out.emplace_back(name, v);
    }
    return out;
}

RunConfig config_from_summary(std::string_view summary) {
    std::string text;
    std::istringstream in{std::string(summary)};
    for (std::string line; std::getline(in, line);) {
        const std::string t = trim(line);
        if (t.rfind("config.", 0) == 0) text += t.substr(7) + "\n";
    }
    return parse_config(text);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace mound
