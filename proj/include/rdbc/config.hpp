#pragma once

#include "rdbc/kernels.hpp"
#include "rdbc/pdesim.hpp"
#include "rdbc/trigger.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rdbc {

struct ExperimentConfig {
    std::string preset = "custom";
    PlantParams params;
    int intervals = 161;
    double dt = 1.0e-3;
    double horizon = 1.0;

    ScheduleMode mode = ScheduleMode::Event;
    double period = 0.0;        ///< sampling diameter; 0 means the certified T*
    int steps_per_period = 4;   ///< sampled modes use dt = period / steps_per_period
    std::uint64_t seed = 1;

    TriggerParams trigger;
    std::optional<Betas> betas; ///< defaults to synthesis from the computed alphas
    int trigger_substeps = 64;
    LyapunovGains gains;

    std::optional<double> sigma;
    std::optional<int> modes;

    std::vector<double> u0 = paper_plant_profile().data();
    std::vector<double> uhat0 = paper_observer_profile().data();

    std::filesystem::path out_dir = "out";
    int snapshot_every = 0;

    /// Throws ConfigError (or AssumptionViolation) naming the violated constraint.
    void validate() const;
};

/// Names accepted by apply_setting, as "section.key".
const std::vector<std::string>& config_keys();
const std::vector<std::string>& preset_names();

/// Resets `cfg` to the named preset. Throws ConfigError for an unknown name.
void apply_preset(ExperimentConfig& cfg, const std::string& name);

/// Sets one "section.key" to `value`. Throws ConfigError for unknown keys or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct ConfigEntry {
    int line = 0;
    std::string key; ///< "section.key"
    std::string value;
};

/// Reads "key = value" lines grouped under "[section]" headers; '#' starts a comment.
std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& origin = "<text>");
std::vector<ConfigEntry> parse_config_file(const std::filesystem::path& path);

/// Preset (flag first, then file), file entries, then flag overrides, then RD_OUT_DIR. Validates.
ExperimentConfig resolve_config(const std::vector<ConfigEntry>& file_entries,
                                const std::vector<std::pair<std::string, std::string>>& overrides);

/// Every resolved field as "section.key" -> text, at full precision.
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& cfg);

} // namespace rdbc
