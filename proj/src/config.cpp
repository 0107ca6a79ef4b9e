#include "rdbc/config.hpp"

#include "rdbc/csv.hpp"
#include "rdbc/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace rdbc {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v)
{
    try {
        return parse_double(v);
    } catch (const ConfigError&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v)
{
    const double d = to_real(key, v);
    if (d != static_cast<int>(d)) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    return static_cast<int>(d);
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        out.push_back(to_real(key, trim(item)));
    }
    if (out.empty()) {
        throw ConfigError(key + ": expected a comma-separated coefficient list");
    }
    return out;
}

std::string list_text(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + format_double(v[i]);
    }
    return s;
}

Betas& betas_of(ExperimentConfig& c)
{
    if (!c.betas) {
        c.betas = Betas{};
    }
    return *c.betas;
}

struct Field {
    std::string key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : "auto"; }

const std::vector<Field>& fields()
{
    using C = ExperimentConfig;
    static const std::vector<Field> table = {
        {"plant.epsilon", [](C& c, const std::string& v) { c.params.epsilon = to_real("plant.epsilon", v); },
         [](const C& c) { return format_double(c.params.epsilon); }},
        {"plant.lambda", [](C& c, const std::string& v) { c.params.lambda = to_real("plant.lambda", v); },
         [](const C& c) { return format_double(c.params.lambda); }},
        {"plant.q", [](C& c, const std::string& v) { c.params.q = to_real("plant.q", v); },
         [](const C& c) { return format_double(c.params.q); }},
        {"grid.M", [](C& c, const std::string& v) { c.intervals = to_int("grid.M", v); },
         [](const C& c) { return std::to_string(c.intervals); }},
        {"grid.dt", [](C& c, const std::string& v) { c.dt = to_real("grid.dt", v); },
         [](const C& c) { return format_double(c.dt); }},
        {"grid.horizon", [](C& c, const std::string& v) { c.horizon = to_real("grid.horizon", v); },
         [](const C& c) { return format_double(c.horizon); }},
        {"schedule.mode", [](C& c, const std::string& v) { c.mode = parse_schedule_mode(v); },
         [](const C& c) { return to_string(c.mode); }},
        {"schedule.period", [](C& c, const std::string& v) { c.period = to_real("schedule.period", v); },
         [](const C& c) { return format_double(c.period); }},
        {"schedule.steps_per_period",
         [](C& c, const std::string& v) { c.steps_per_period = to_int("schedule.steps_per_period", v); },
         [](const C& c) { return std::to_string(c.steps_per_period); }},
        {"schedule.seed",
         [](C& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int("schedule.seed", v)); },
         [](const C& c) { return std::to_string(c.seed); }},
        {"trigger.eta", [](C& c, const std::string& v) { c.trigger.eta = to_real("trigger.eta", v); },
         [](const C& c) { return format_double(c.trigger.eta); }},
        {"trigger.gamma", [](C& c, const std::string& v) { c.trigger.gamma = to_real("trigger.gamma", v); },
         [](const C& c) { return format_double(c.trigger.gamma); }},
        {"trigger.vartheta",
         [](C& c, const std::string& v) { c.trigger.vartheta = to_real("trigger.vartheta", v); },
         [](const C& c) { return format_double(c.trigger.vartheta); }},
        {"trigger.m0", [](C& c, const std::string& v) { c.trigger.m0 = to_real("trigger.m0", v); },
         [](const C& c) { return format_double(c.trigger.m0); }},
        {"trigger.beta1", [](C& c, const std::string& v) { betas_of(c).beta1 = to_real("trigger.beta1", v); },
         [](const C& c) { return c.betas ? format_double(c.betas->beta1) : "auto"; }},
        {"trigger.beta2", [](C& c, const std::string& v) { betas_of(c).beta2 = to_real("trigger.beta2", v); },
         [](const C& c) { return c.betas ? format_double(c.betas->beta2) : "auto"; }},
        {"trigger.beta3", [](C& c, const std::string& v) { betas_of(c).beta3 = to_real("trigger.beta3", v); },
         [](const C& c) { return c.betas ? format_double(c.betas->beta3) : "auto"; }},
        {"trigger.substeps",
         [](C& c, const std::string& v) { c.trigger_substeps = to_int("trigger.substeps", v); },
         [](const C& c) { return std::to_string(c.trigger_substeps); }},
        {"lyapunov.B", [](C& c, const std::string& v) { c.gains.B = to_real("lyapunov.B", v); },
         [](const C& c) { return format_double(c.gains.B); }},
        {"lyapunov.kappa1", [](C& c, const std::string& v) { c.gains.kappa1 = to_real("lyapunov.kappa1", v); },
         [](const C& c) { return format_double(c.gains.kappa1); }},
        {"lyapunov.kappa2", [](C& c, const std::string& v) { c.gains.kappa2 = to_real("lyapunov.kappa2", v); },
         [](const C& c) { return format_double(c.gains.kappa2); }},
        {"lyapunov.kappa3", [](C& c, const std::string& v) { c.gains.kappa3 = to_real("lyapunov.kappa3", v); },
         [](const C& c) { return format_double(c.gains.kappa3); }},
        {"certificate.sigma",
         [](C& c, const std::string& v) {
             if (v == "auto") {
                 c.sigma.reset();
             } else {
                 c.sigma = to_real("certificate.sigma", v);
             }
         },
         [](const C& c) { return opt_text(c.sigma); }},
        {"certificate.N",
         [](C& c, const std::string& v) {
             if (v == "auto") {
                 c.modes.reset();
             } else {
                 c.modes = to_int("certificate.N", v);
             }
         },
         [](const C& c) { return c.modes ? std::to_string(*c.modes) : "auto"; }},
        {"initial.u0", [](C& c, const std::string& v) { c.u0 = to_list("initial.u0", v); },
         [](const C& c) { return list_text(c.u0); }},
        {"initial.uhat0", [](C& c, const std::string& v) { c.uhat0 = to_list("initial.uhat0", v); },
         [](const C& c) { return list_text(c.uhat0); }},
        {"output.dir", [](C& c, const std::string& v) { c.out_dir = v; },
         [](const C& c) { return c.out_dir.string(); }},
        {"output.snapshot_every",
         [](C& c, const std::string& v) { c.snapshot_every = to_int("output.snapshot_every", v); },
         [](const C& c) { return std::to_string(c.snapshot_every); }},
    };
    return table;
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k{"preset"};
        for (const auto& f : fields()) {
            k.push_back(f.key);
        }
        return k;
    }();
    return keys;
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"paper-event-eta1", "paper-event-eta100", "paper-sampled",
                                                "paper-certificate"};
    return names;
}

void apply_preset(ExperimentConfig& cfg, const std::string& name)
{
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), name) == names.end() && name != "custom") {
        throw ConfigError("unknown preset '" + name + "'");
    }
    cfg = ExperimentConfig{};
    cfg.preset = name;
    if (name == "paper-event-eta100") {
        cfg.trigger.eta = 100.0;
    } else if (name == "paper-sampled") {
        cfg.mode = ScheduleMode::Periodic;
        cfg.sigma = 0.0266;
        cfg.modes = 9;
    } else if (name == "paper-certificate") {
        cfg.sigma = 0.0266;
        cfg.modes = 9;
    }
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "preset") {
        apply_preset(cfg, value);
        return;
    }
    for (const auto& f : fields()) {
        if (f.key == key) {
            f.set(cfg, value);
            return;
        }
    }
    throw ConfigError("unknown key '" + key + "'");
}

void ExperimentConfig::validate() const
{
    try {
        params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("plant: ") + e.what());
    }
    params.require_assumption();
    if (intervals < 64) {
        throw ConfigError("grid.M must be at least 64");
    }
    if (!(dt > 0.0)) {
        throw ConfigError("grid.dt must be positive");
    }
    if (!(horizon >= dt)) {
        throw ConfigError("grid.horizon must be at least grid.dt");
    }
    if (!(period >= 0.0)) {
        throw ConfigError("schedule.period must be non-negative (0 selects T*)");
    }
    if (steps_per_period < 1) {
        throw ConfigError("schedule.steps_per_period must be at least 1");
    }
    if (!(trigger.eta > 0.0)) {
        throw ConfigError("trigger.eta must be positive");
    }
    if (!(trigger.gamma > 0.0)) {
        throw ConfigError("trigger.gamma must be positive");
    }
    if (!(trigger.vartheta > 0.0 && trigger.vartheta < 1.0)) {
        throw ConfigError("trigger.vartheta must lie in (0, 1)");
    }
    if (!(trigger.m0 < 0.0)) {
        throw ConfigError("trigger.m0 must be negative");
    }
    if (betas && !(betas->beta1 >= 0.0 && betas->beta2 >= 0.0 && betas->beta3 >= 0.0)) {
        throw ConfigError("trigger.beta1..3 must be non-negative");
    }
    if (trigger_substeps < 1) {
        throw ConfigError("trigger.substeps must be at least 1");
    }
    if (!(gains.B > 0.0 && gains.kappa1 > 0.0 && gains.kappa2 > 0.0 && gains.kappa3 > 0.0)) {
        throw ConfigError("lyapunov.B and kappa1..3 must be positive");
    }
    if (modes && *modes < 1) {
        throw ConfigError("certificate.N must be at least 1");
    }
    if (u0.front() != 0.0 || uhat0.front() != 0.0) {
        throw ConfigError("initial.u0 and initial.uhat0 must vanish at x = 0 (constant coefficient 0)");
    }
    if (snapshot_every < 0) {
        throw ConfigError("output.snapshot_every must be non-negative");
    }
}

std::vector<ConfigEntry> parse_config_text(const std::string& text, const std::string& origin)
{
    std::vector<ConfigEntry> out;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError(where + ": malformed section header '" + line + "'");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        }
        const std::string name = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (name.empty()) {
            throw ConfigError(where + ": missing key");
        }
        const std::string key = section.empty() ? name : section + "." + name;
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
        out.push_back({lineno, key, value});
    }
    return out;
}

std::vector<ConfigEntry> parse_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

ExperimentConfig resolve_config(const std::vector<ConfigEntry>& file_entries,
                                const std::vector<std::pair<std::string, std::string>>& overrides)
{
    std::string preset = "custom";
    for (const auto& e : file_entries) {
        if (e.key == "preset") {
            preset = e.value;
        }
    }
    for (const auto& [k, v] : overrides) {
        if (k == "preset") {
            preset = v;
        }
    }
    ExperimentConfig cfg;
    apply_preset(cfg, preset);
    for (const auto& e : file_entries) {
        if (e.key == "preset") {
            continue;
        }
        try {
            apply_setting(cfg, e.key, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(e.line) + ": " + err.what());
        }
    }
    for (const auto& [k, v] : overrides) {
        if (k != "preset") {
            apply_setting(cfg, k, v);
        }
    }
    if (const char* dir = std::getenv("RD_OUT_DIR"); dir && *dir) {
        cfg.out_dir = dir;
    }
    cfg.validate();
    return cfg;
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& cfg)
{
    std::vector<std::pair<std::string, std::string>> out{{"preset", cfg.preset}};
    for (const auto& f : fields()) {
        out.emplace_back(f.key, f.get(cfg));
    }
    return out;
}

} // namespace rdbc
