#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "keyhole/channel.hpp"
#include "keyhole/geometry.hpp"
#include "keyhole/montecarlo.hpp"

namespace keyhole {

/// Invalid or missing configuration entry. `field()` names it as section.key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Sections of `key = value` lines. Section names may repeat ([hole]).
struct ConfigSection {
    std::string name;
    std::map<std::string, std::string> values;
    int line = 0;
};

std::vector<ConfigSection> parse_config_sections(std::string_view text);

enum class ExperimentKind { sweep_h, sweep_density, sweep_3d, validate, measure_regions };

std::string to_string(ExperimentKind kind);

struct SweepGrid {
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;
    bool log_spacing = false;

    std::vector<double> points() const;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::sweep_h;
    std::string name = "experiment";
    KeyholeDomain domain;
    ChannelParams channel;
    std::vector<double> alphas{1.0};
    SweepGrid grid;
    SimConfig sim;
    std::vector<int> reflections{0, 1, 2};
    bool monte_carlo = true;
    std::int64_t region_samples = 200000;
    double validate_rel_tol = 0.02;
    double validate_sigmas = 3.0;
    std::string output;  // CSV file name; defaults to <name>.csv

    int max_reflections() const;
    /// Throws ConfigError naming the first offending field.
    void validate() const;
};

ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Serialises a config in the same grammar; parsing the text gives back an
/// equivalent config (doubles are written with 17 significant digits).
std::string to_config_text(const ExperimentConfig& config);

}  // namespace keyhole
