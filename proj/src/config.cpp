#include "keyhole/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace keyhole {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) items.push_back(t);
    }
    return items;
}

double parse_number(const std::string& field, const std::string& text) {
    // "pi/N" and "pi" are accepted for angles.
    if (text == "pi") return std::numbers::pi;
    if (text.rfind("pi/", 0) == 0) return std::numbers::pi / parse_number(field, text.substr(3));
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError(field, "expected a number, got '" + text + "'");
    }
    return value;
}

std::int64_t parse_integer(const std::string& field, const std::string& text) {
    std::int64_t value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError(field, "expected an integer, got '" + text + "'");
    return value;
}

std::uint64_t parse_unsigned(const std::string& field, const std::string& text) {
    std::uint64_t value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError(field, "expected an unsigned integer, got '" + text + "'");
    return value;
}

bool parse_bool(const std::string& field, const std::string& text) {
    if (text == "on" || text == "true" || text == "yes") return true;
    if (text == "off" || text == "false" || text == "no") return false;
    throw ConfigError(field, "expected on/off, got '" + text + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Reads keys from one section and reports any left unused.
class SectionReader {
public:
    explicit SectionReader(const ConfigSection& section) : section_(section) {}

    bool has(const std::string& key) const { return section_.values.count(key) != 0; }

    std::string field(const std::string& key) const { return section_.name + "." + key; }

    const std::string& raw(const std::string& key) {
        used_.insert(key);
        auto it = section_.values.find(key);
        if (it == section_.values.end()) throw ConfigError(field(key), "missing");
        return it->second;
    }

    double number(const std::string& key) { return parse_number(field(key), raw(key)); }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    std::int64_t integer(const std::string& key) { return parse_integer(field(key), raw(key)); }
    std::string text(const std::string& key, const std::string& fallback) {
        return has(key) ? raw(key) : fallback;
    }

    void finish() const {
        for (const auto& [key, value] : section_.values) {
            if (!used_.count(key)) throw ConfigError(field(key), "unknown key");
        }
    }

private:
    const ConfigSection& section_;
    std::set<std::string> used_;
};

ExperimentKind parse_kind(const std::string& field, const std::string& text) {
    if (text == "sweep-h") return ExperimentKind::sweep_h;
    if (text == "sweep-density") return ExperimentKind::sweep_density;
    if (text == "sweep-3d") return ExperimentKind::sweep_3d;
    if (text == "validate") return ExperimentKind::validate;
    if (text == "measure-regions") return ExperimentKind::measure_regions;
    throw ConfigError(field, "unknown experiment kind '" + text + "'");
}

KeyholeSpec parse_hole(SectionReader& r, int dimension) {
    KeyholeSpec hole;
    hole.position = r.number("position");
    hole.position_z = r.number("position_z", 0.0);
    hole.depth = r.number("depth", 0.1);
    const std::string shape = r.text("shape", "circular");
    if (shape == "square") {
        hole.shape = HoleShape::square;
    } else if (shape != "circular") {
        throw ConfigError(r.field("shape"), "expected circular or square");
    }
    const int given = r.has("phi") + r.has("psi") + r.has("width");
    if (given != 1) throw ConfigError(r.field("width"), "give exactly one of width, phi (2D) or psi (3D)");
    if (r.has("phi")) {
        if (dimension != 2) throw ConfigError(r.field("phi"), "phi is the 2D wedge angle; use psi in 3D");
        hole.width = 2.0 * hole.depth * std::tan(0.5 * r.number("phi"));
    } else if (r.has("psi")) {
        if (dimension != 3) throw ConfigError(r.field("psi"), "psi is the 3D cone half-angle; use phi in 2D");
        hole.width = 2.0 * hole.depth * std::tan(r.number("psi"));
    } else {
        hole.width = r.number("width");
    }
    return hole;
}

}  // namespace

std::vector<ConfigSection> parse_config_sections(std::string_view text) {
    std::vector<ConfigSection> sections;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
            sections.push_back({trim(t.substr(1, t.size() - 2)), {}, line_no});
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no), "expected key = value");
        if (sections.empty()) throw ConfigError("line " + std::to_string(line_no), "key outside any section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "empty key");
        if (!sections.back().values.emplace(key, value).second) {
            throw ConfigError(sections.back().name + "." + key, "duplicate key");
        }
    }
    return sections;
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::sweep_h: return "sweep-h";
        case ExperimentKind::sweep_density: return "sweep-density";
        case ExperimentKind::sweep_3d: return "sweep-3d";
        case ExperimentKind::validate: return "validate";
        case ExperimentKind::measure_regions: return "measure-regions";
    }
    return "unknown";
}

std::vector<double> SweepGrid::points() const {
    std::vector<double> out;
    if (steps < 1) return out;
    if (steps == 1) return {start};
    out.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / (steps - 1);
        if (log_spacing) {
            out.push_back(std::exp(std::log(start) + t * (std::log(stop) - std::log(start))));
        } else {
            out.push_back(start + t * (stop - start));
        }
    }
    out.front() = start;
    out.back() = stop;
    return out;
}

int ExperimentConfig::max_reflections() const {
    int c = 0;
    for (int v : reflections) c = std::max(c, v);
    return c;
}

void ExperimentConfig::validate() const {
    if (name.empty() || name.find_first_of(",\n\"") != std::string::npos) {
        throw ConfigError("experiment.name", "must be non-empty and free of commas and quotes");
    }
    if (grid.steps < 1) throw ConfigError("sweep.steps", "the grid needs at least one point");
    if (grid.log_spacing && !(grid.start > 0.0 && grid.stop > 0.0)) {
        throw ConfigError("sweep.start", "log spacing needs positive endpoints");
    }
    const bool density_sweep = kind == ExperimentKind::sweep_density;
    if (density_sweep ? !(grid.start >= 0.0 && grid.stop >= 0.0) : !(grid.start > 0.0 && grid.stop > 0.0)) {
        throw ConfigError("sweep.start", density_sweep ? "densities must be non-negative" : "heights must be positive");
    }
    if (kind == ExperimentKind::sweep_h && domain.dimension != 2) {
        throw ConfigError("domain.dimension", "sweep-h is two-dimensional; use sweep-3d");
    }
    if (kind == ExperimentKind::sweep_3d && domain.dimension != 3) {
        throw ConfigError("domain.dimension", "sweep-3d needs dimension = 3");
    }
    if (domain.holes.empty()) throw ConfigError("hole", "at least one [hole] section is required");
    try {
        domain.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("domain", e.what());
    }
    for (const KeyholeSpec& hole : domain.holes) {
        if (domain.dimension == 2 && !(2.0 * hole.half_angle() < std::numbers::pi / 2)) {
            throw ConfigError("hole.width", "2D wedge angle must be below pi/2");
        }
    }
    if (alphas.empty()) throw ConfigError("channel.alpha", "at least one value is required");
    for (double a : alphas) {
        ChannelParams p = channel;
        p.alpha = a;
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("channel", e.what());
        }
    }
    if (reflections.empty()) throw ConfigError("sim.C", "at least one value is required");
    for (int c : reflections) {
        if (c < 0) throw ConfigError("sim.C", "reflection counts must be non-negative");
    }
    if (region_samples < 1) throw ConfigError("sim.samples", "must be >= 1");
    if (!(validate_rel_tol >= 0.0)) throw ConfigError("experiment.validate_rel_tol", "must be non-negative");
    if (!(validate_sigmas > 0.0)) throw ConfigError("experiment.validate_sigmas", "must be positive");

    const bool needs_nodes = kind != ExperimentKind::sweep_density && kind != ExperimentKind::measure_regions;
    if (sim.trials < 1) throw ConfigError("sim.trials", "must be >= 1");
    if (needs_nodes && monte_carlo) {
        if (sim.n_nodes.has_value() == sim.density.has_value()) {
            throw ConfigError("sim.nodes", "give exactly one of sim.nodes or sim.density for height sweeps");
        }
        if (sim.n_nodes && *sim.n_nodes < 0) throw ConfigError("sim.nodes", "must be non-negative");
        if (sim.density && !(*sim.density >= 0.0)) throw ConfigError("sim.density", "must be non-negative");
    }
    if (sim.max_mesh_nodes < 1) throw ConfigError("sim.max_mesh_nodes", "must be >= 1");
}

ExperimentConfig parse_experiment_config(std::string_view text) {
    const std::vector<ConfigSection> sections = parse_config_sections(text);
    auto single = [&](const std::string& name, bool required) -> const ConfigSection* {
        const ConfigSection* found = nullptr;
        for (const ConfigSection& s : sections) {
            if (s.name != name) continue;
            if (found) throw ConfigError(name, "section may appear only once");
            found = &s;
        }
        if (!found && required) throw ConfigError(name, "missing section");
        return found;
    };
    static const std::set<std::string> known = {"experiment", "domain", "hole", "channel",
                                                "sweep", "sim", "output"};
    for (const ConfigSection& s : sections) {
        if (!known.count(s.name)) throw ConfigError(s.name, "unknown section");
    }

    ExperimentConfig cfg;
    {
        SectionReader r(*single("experiment", true));
        cfg.kind = parse_kind(r.field("kind"), r.raw("kind"));
        cfg.name = r.text("name", cfg.name);
        cfg.validate_rel_tol = r.number("validate_rel_tol", cfg.validate_rel_tol);
        cfg.validate_sigmas = r.number("validate_sigmas", cfg.validate_sigmas);
        r.finish();
    }
    {
        SectionReader r(*single("domain", true));
        cfg.domain.dimension = static_cast<int>(r.integer("dimension"));
        if (cfg.domain.dimension != 2 && cfg.domain.dimension != 3) {
            throw ConfigError("domain.dimension", "must be 2 or 3");
        }
        cfg.domain.height = r.number("height", cfg.domain.height);
        cfg.domain.length = r.number("length");
        if (cfg.domain.dimension == 3) cfg.domain.width = r.number("width");
        r.finish();
    }
    for (const ConfigSection& s : sections) {
        if (s.name != "hole") continue;
        SectionReader r(s);
        cfg.domain.holes.push_back(parse_hole(r, cfg.domain.dimension));
        r.finish();
    }
    {
        SectionReader r(*single("channel", true));
        cfg.channel.rice_k = r.number("K");
        cfg.channel.omega = r.number("omega", 1.0);
        cfg.channel.eta = r.number("eta", 2.0);
        if (r.has("beta") == r.has("r0")) throw ConfigError("channel.beta", "give exactly one of beta or r0");
        if (r.has("beta")) {
            cfg.channel.beta = r.number("beta");
        } else {
            const double r0 = r.number("r0");
            if (!(r0 > 0.0)) throw ConfigError("channel.r0", "must be positive");
            cfg.channel.beta = std::pow(r0, -cfg.channel.eta);
        }
        cfg.alphas.clear();
        for (const std::string& item : split_list(r.raw("alpha"))) {
            cfg.alphas.push_back(parse_number("channel.alpha", item));
        }
        cfg.channel.alpha = cfg.alphas.empty() ? 1.0 : cfg.alphas.front();
        r.finish();
    }
    {
        SectionReader r(*single("sweep", true));
        cfg.grid.start = r.number("start");
        cfg.grid.stop = r.number("stop", cfg.grid.start);
        cfg.grid.steps = static_cast<int>(r.integer("steps"));
        const std::string spacing = r.text("spacing", "linear");
        if (spacing != "linear" && spacing != "log") throw ConfigError("sweep.spacing", "expected linear or log");
        cfg.grid.log_spacing = spacing == "log";
        r.finish();
    }
    if (const ConfigSection* s = single("sim", false)) {
        SectionReader r(*s);
        if (r.has("trials")) cfg.sim.trials = static_cast<int>(r.integer("trials"));
        cfg.sim.seed = parse_unsigned("sim.seed", r.text("seed", "1"));
        if (r.has("C")) {
            cfg.reflections.clear();
            for (const std::string& item : split_list(r.raw("C"))) {
                cfg.reflections.push_back(static_cast<int>(parse_integer("sim.C", item)));
            }
        }
        const std::string estimator = r.text("estimator", "semi-analytic");
        if (estimator == "bernoulli") {
            cfg.sim.estimator = Estimator::bernoulli;
        } else if (estimator != "semi-analytic") {
            throw ConfigError("sim.estimator", "expected semi-analytic or bernoulli");
        }
        const std::string link = r.text("link_mode", "approx");
        if (link == "exact") {
            cfg.sim.link_mode = LinkMode::exact;
        } else if (link != "approx") {
            throw ConfigError("sim.link_mode", "expected exact or approx");
        }
        if (r.has("nodes")) cfg.sim.n_nodes = r.integer("nodes");
        if (r.has("density")) cfg.sim.density = r.number("density");
        if (r.has("threads")) cfg.sim.threads = static_cast<int>(r.integer("threads"));
        if (r.has("monte_carlo")) cfg.monte_carlo = parse_bool("sim.monte_carlo", r.raw("monte_carlo"));
        if (r.has("samples")) cfg.region_samples = r.integer("samples");
        if (r.has("max_mesh_nodes")) cfg.sim.max_mesh_nodes = r.integer("max_mesh_nodes");
        r.finish();
    } else {
        cfg.monte_carlo = false;
    }
    if (const ConfigSection* s = single("output", false)) {
        SectionReader r(*s);
        cfg.output = r.text("path", "");
        r.finish();
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_experiment_config(buffer.str());
}

std::string to_config_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    auto join = [](const auto& values, auto fmt) {
        std::string s;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) s += ", ";
            s += fmt(values[i]);
        }
        return s;
    };
    out << "[experiment]\n"
        << "kind = " << to_string(cfg.kind) << "\n"
        << "name = " << cfg.name << "\n"
        << "validate_rel_tol = " << format_double(cfg.validate_rel_tol) << "\n"
        << "validate_sigmas = " << format_double(cfg.validate_sigmas) << "\n\n";
    out << "[domain]\n"
        << "dimension = " << cfg.domain.dimension << "\n"
        << "height = " << format_double(cfg.domain.height) << "\n"
        << "length = " << format_double(cfg.domain.length) << "\n";
    if (cfg.domain.dimension == 3) out << "width = " << format_double(cfg.domain.width) << "\n";
    out << "\n";
    for (const KeyholeSpec& hole : cfg.domain.holes) {
        out << "[hole]\n"
            << "position = " << format_double(hole.position) << "\n";
        if (cfg.domain.dimension == 3) {
            out << "position_z = " << format_double(hole.position_z) << "\n"
                << "shape = " << (hole.shape == HoleShape::square ? "square" : "circular") << "\n";
        }
        out << "width = " << format_double(hole.width) << "\n"
            << "depth = " << format_double(hole.depth) << "\n\n";
    }
    out << "[channel]\n"
        << "K = " << format_double(cfg.channel.rice_k) << "\n"
        << "omega = " << format_double(cfg.channel.omega) << "\n"
        << "beta = " << format_double(cfg.channel.beta) << "\n"
        << "eta = " << format_double(cfg.channel.eta) << "\n"
        << "alpha = " << join(cfg.alphas, format_double) << "\n\n";
    out << "[sweep]\n"
        << "start = " << format_double(cfg.grid.start) << "\n"
        << "stop = " << format_double(cfg.grid.stop) << "\n"
        << "steps = " << cfg.grid.steps << "\n"
        << "spacing = " << (cfg.grid.log_spacing ? "log" : "linear") << "\n\n";
    out << "[sim]\n"
        << "monte_carlo = " << (cfg.monte_carlo ? "on" : "off") << "\n"
        << "trials = " << cfg.sim.trials << "\n"
        << "seed = " << cfg.sim.seed << "\n"
        << "C = " << join(cfg.reflections, [](int c) { return std::to_string(c); }) << "\n"
        << "estimator = " << (cfg.sim.estimator == Estimator::bernoulli ? "bernoulli" : "semi-analytic") << "\n"
        << "link_mode = " << (cfg.sim.link_mode == LinkMode::exact ? "exact" : "approx") << "\n";
    if (cfg.sim.n_nodes) out << "nodes = " << *cfg.sim.n_nodes << "\n";
    if (cfg.sim.density) out << "density = " << format_double(*cfg.sim.density) << "\n";
    out << "samples = " << cfg.region_samples << "\n"
        << "max_mesh_nodes = " << cfg.sim.max_mesh_nodes << "\n\n";
    if (!cfg.output.empty()) out << "[output]\npath = " << cfg.output << "\n";
    return out.str();
}

}  // namespace keyhole
