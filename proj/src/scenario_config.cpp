#include "legfunnel/scenario_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "legfunnel/errors.hpp"

namespace legfunnel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kProfileSampling = 1e-4;

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double to_double(const std::string& key, const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (trim(text.substr(used)).empty() && std::isfinite(v)) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(to_double(key, item));
        }
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& text)
{
    const std::string v = lower(trim(text));
    if (v == "true" || v == "yes" || v == "1" || v == "on") {
        return true;
    }
    if (v == "false" || v == "no" || v == "0" || v == "off") {
        return false;
    }
    throw ConfigError("'" + key + "': expected a boolean, got '" + text + "'");
}

double blend_rate(double s, double width)
{
    if (s <= 0.0 || s >= 1.0) {
        return 0.0;
    }
    return 0.5 * kPi / width * std::sin(kPi * s);
}

double blend(double s)
{
    if (s <= 0.0) {
        return 0.0;
    }
    if (s >= 1.0) {
        return 1.0;
    }
    return 0.5 * (1.0 - std::cos(kPi * s));
}

}  // namespace

std::string to_string(ControllerKind kind)
{
    return kind == ControllerKind::Funnel ? "fc" : "ic";
}

std::string to_string(ScenarioMode mode)
{
    return mode == ScenarioMode::ForceTracking ? "force_tracking" : "posture";
}

std::string to_string(SensorMode mode)
{
    return mode == SensorMode::Truth ? "truth" : "sampled_20hz";
}

SensorMode parse_sensor_mode(const std::string& text)
{
    const std::string v = lower(trim(text));
    if (v == "truth") {
        return SensorMode::Truth;
    }
    if (v == "sampled_20hz" || v == "sampled-20hz" || v == "sampled") {
        return SensorMode::Sampled20Hz;
    }
    throw ConfigError("unknown sensor mode '" + text + "' (expected truth or sampled_20hz)");
}

void ForceProfile::validate() const
{
    if (levels.empty()) {
        throw ConfigError("force profile needs at least one level");
    }
    if (switch_times.size() + 1 != levels.size()) {
        throw ConfigError("force profile needs exactly one switch time per level change");
    }
    for (std::size_t i = 1; i < switch_times.size(); ++i) {
        if (!(switch_times[i] > switch_times[i - 1])) {
            throw ConfigError("force profile switch times must be strictly increasing");
        }
    }
    if (!switch_times.empty() && switch_times.front() < 0.0) {
        throw ConfigError("force profile switch times must be nonnegative");
    }
    if (!(transition > 0.0) || sine_frequency < 0.0) {
        throw ConfigError("force profile needs transition > 0 and sine_frequency >= 0");
    }
}

double ForceProfile::value(double t) const
{
    double v = levels.front();
    for (std::size_t j = 1; j < levels.size(); ++j) {
        v += (levels[j] - levels[j - 1]) * blend((t - switch_times[j - 1]) / transition);
    }
    return v + sine_amplitude * std::sin(2.0 * kPi * sine_frequency * t);
}

double ForceProfile::rate(double t) const
{
    double r = 0.0;
    for (std::size_t j = 1; j < levels.size(); ++j) {
        r += (levels[j] - levels[j - 1]) * blend_rate((t - switch_times[j - 1]) / transition, transition);
    }
    const double w = 2.0 * kPi * sine_frequency;
    return r + sine_amplitude * w * std::cos(w * t);
}

double ForceProfile::max_abs(double horizon) const
{
    double m = 0.0;
    const auto n = static_cast<long>(std::ceil(horizon / kProfileSampling));
    for (long i = 0; i <= n; ++i) {
        m = std::max(m, std::abs(value(static_cast<double>(i) * kProfileSampling)));
    }
    return m;
}

double ForceProfile::max_rate(double horizon) const
{
    double m = 0.0;
    const auto n = static_cast<long>(std::ceil(horizon / kProfileSampling));
    for (long i = 0; i <= n; ++i) {
        m = std::max(m, std::abs(rate(static_cast<double>(i) * kProfileSampling)));
    }
    return m;
}

void ScenarioConfig::validate() const
{
    try {
        if (!(dt > 0.0) || !(duration > 0.0) || dt > duration) {
            throw ConfigError("need 0 < dt <= duration");
        }
        plant.validate();
        inertia.validate();
        if (controller == ControllerKind::Funnel) {
            funnel.validate();
            trigger.validate();
        } else {
            impedance.validate();
            if (mode == ScenarioMode::ForceTracking) {
                throw ConfigError("the impedance baseline only runs posture scenarios");
            }
        }
        if (mode == ScenarioMode::ForceTracking) {
            profile.validate();
        } else {
            const TerrainProfile road = TerrainProfile::preset(terrain_preset);
            if (!(hexagon_edge > 0.0) || !(leg_length > 0.0)) {
                throw ConfigError("hexagon edge and leg length must be positive");
            }
            if (speed < 0.0 || !(workspace_limit > 0.0) || patch_length < 0.0 || noise_amplitude < 0.0) {
                throw ConfigError("need speed >= 0, workspace_limit > 0, patch_length >= 0, noise_amplitude >= 0");
            }
            const double reach = hexagon_edge + patch_length;
            if (speed * duration + reach > road.x_max() || -reach < road.x_min()) {
                throw ConfigError("the robot drives off the terrain domain within the run");
            }
            if (!(posture.bandwidth > 0.0) || !(posture.damping > 0.0) || !(posture.servo_bandwidth > 0.0) ||
                posture.force_rate_bound < 0.0 || posture.force_bound < 0.0) {
                throw ConfigError("posture loop parameters must be positive");
            }
        }
        if (!(allocation.damping > 0.0) || !(allocation.residual_tolerance > 0.0)) {
            throw ConfigError("allocation damping and tolerance must be positive");
        }
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

TerrainProfile ScenarioConfig::terrain() const
{
    TerrainProfile t = TerrainProfile::preset(terrain_preset);
    t.add_noise(noise_amplitude, seed);
    return t;
}

RobotGeometry ScenarioConfig::geometry() const
{
    return RobotGeometry::regular_hexagon(hexagon_edge, leg_length);
}

void ScenarioConfig::set(const std::string& key, const std::string& value)
{
    ScenarioConfig& cfg = *this;
    using Setter = std::function<void(const std::string& key, const std::string& value)>;
    auto num = [](double& target) -> Setter {
        return [&target](const std::string& k, const std::string& v) { target = to_double(k, v); };
    };
    auto list = [](std::vector<double>& target) -> Setter {
        return [&target](const std::string& k, const std::string& v) { target = to_list(k, v); };
    };

    std::map<std::string, Setter> setters{
        {"scenario.name", [&](const std::string&, const std::string& v) { cfg.name = trim(v); }},
        {"scenario.mode",
         [&](const std::string& k, const std::string& v) {
             const std::string m = lower(trim(v));
             if (m == "force_tracking") {
                 cfg.mode = ScenarioMode::ForceTracking;
             } else if (m == "posture") {
                 cfg.mode = ScenarioMode::Posture;
             } else {
                 throw ConfigError("'" + k + "': expected force_tracking or posture");
             }
         }},
        {"scenario.controller",
         [&](const std::string& k, const std::string& v) {
             const std::string c = lower(trim(v));
             if (c == "fc" || c == "funnel") {
                 cfg.controller = ControllerKind::Funnel;
             } else if (c == "ic" || c == "impedance") {
                 cfg.controller = ControllerKind::Impedance;
             } else {
                 throw ConfigError("'" + k + "': expected fc or ic");
             }
         }},
        {"scenario.duration", num(cfg.duration)},
        {"scenario.dt", num(cfg.dt)},
        {"scenario.sensor_mode",
         [&](const std::string&, const std::string& v) { cfg.sensor = parse_sensor_mode(v); }},
        {"scenario.seed",
         [&](const std::string& k, const std::string& v) {
             const double s = to_double(k, v);
             if (s < 0.0 || s != std::floor(s)) {
                 throw ConfigError("'" + k + "': expected a nonnegative integer");
             }
             cfg.seed = static_cast<std::uint64_t>(s);
         }},
        {"scenario.enforce_dwell_resolution",
         [&](const std::string& k, const std::string& v) { cfg.enforce_dwell_resolution = to_bool(k, v); }},
        {"funnel.a", num(cfg.funnel.a)},
        {"funnel.b", num(cfg.funnel.b)},
        {"funnel.xi", num(cfg.funnel.xi)},
        {"trigger.rho5", num(cfg.trigger.rho5)},
        {"trigger.varrho", num(cfg.trigger.varrho)},
        {"trigger.u_hat", num(cfg.trigger.u_hat)},
        {"impedance.m", num(cfg.impedance.m)},
        {"impedance.c", num(cfg.impedance.c)},
        {"impedance.k", num(cfg.impedance.k)},
        {"plant.b_damp", num(cfg.plant.b_damp)},
        {"plant.k_stiff", num(cfg.plant.k_stiff)},
        {"plant.k_p", num(cfg.plant.k_p)},
        {"plant.z0", num(cfg.z0)},
        {"body.mass", num(cfg.inertia.mass)},
        {"body.ixx", [&](const std::string& k, const std::string& v) { cfg.inertia.inertia(0, 0) = to_double(k, v); }},
        {"body.iyy", [&](const std::string& k, const std::string& v) { cfg.inertia.inertia(1, 1) = to_double(k, v); }},
        {"body.izz", [&](const std::string& k, const std::string& v) { cfg.inertia.inertia(2, 2) = to_double(k, v); }},
        {"body.gravity", num(cfg.inertia.gravity)},
        {"body.hexagon_edge", num(cfg.hexagon_edge)},
        {"body.leg_length", num(cfg.leg_length)},
        {"terrain.preset", [&](const std::string&, const std::string& v) { cfg.terrain_preset = lower(trim(v)); }},
        {"terrain.noise_amplitude", num(cfg.noise_amplitude)},
        {"terrain.patch_length", num(cfg.patch_length)},
        {"terrain.speed", num(cfg.speed)},
        {"terrain.workspace_limit", num(cfg.workspace_limit)},
        {"profile.levels", list(cfg.profile.levels)},
        {"profile.switch_times", list(cfg.profile.switch_times)},
        {"profile.transition", num(cfg.profile.transition)},
        {"profile.sine_amplitude", num(cfg.profile.sine_amplitude)},
        {"profile.sine_frequency", num(cfg.profile.sine_frequency)},
        {"posture.bandwidth", num(cfg.posture.bandwidth)},
        {"posture.damping", num(cfg.posture.damping)},
        {"posture.force_rate_bound", num(cfg.posture.force_rate_bound)},
        {"posture.force_bound", num(cfg.posture.force_bound)},
        {"posture.servo_bandwidth", num(cfg.posture.servo_bandwidth)},
        {"allocation.damping", num(cfg.allocation.damping)},
        {"allocation.residual_tolerance", num(cfg.allocation.residual_tolerance)},
        {"allocation.clamp_nonnegative",
         [&](const std::string& k, const std::string& v) { cfg.allocation.clamp_nonnegative = to_bool(k, v); }},
    };


    auto it = setters.find(key);
    if (it == setters.end()) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    it->second(key, value);
}

ScenarioConfig ScenarioConfig::parse(const std::string& text, const Overrides& overrides)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    ScenarioConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError("key '" + section + "' outside of a [section]");
        }
        for (const auto& [key, node] : body) {
            cfg.set(section + "." + key, node.get_value<std::string>());
        }
    }
    for (const auto& [key, value] : overrides) {
        cfg.set(key, value);
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path, const Overrides& overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), overrides);
}

OmegaBound scenario_omega(const ScenarioConfig& cfg)
{
    if (cfg.mode == ScenarioMode::ForceTracking) {
        return omega_bound(cfg.profile.max_rate(cfg.duration), cfg.plant, cfg.funnel,
                           cfg.profile.max_abs(cfg.duration), 0.0);
    }
    const double static_share = cfg.inertia.mass * cfg.inertia.gravity / kNumLegs;
    const double s0 = static_share / cfg.plant.k_stiff;
    return omega_bound(cfg.posture.force_rate_bound, cfg.plant, cfg.funnel, cfg.posture.force_bound, s0);
}

double scenario_initial_error(const ScenarioConfig& cfg)
{
    if (cfg.mode == ScenarioMode::ForceTracking) {
        // the leg starts at rest, y(0) = 0
        return cfg.profile.value(0.0);
    }
    // posture runs start in static equilibrium where every leg carries its allocated share
    return 0.0;
}

ScenarioValidation validate_scenario(const ScenarioConfig& cfg)
{
    ScenarioValidation out;
    if (cfg.controller != ControllerKind::Funnel) {
        return out;
    }
    out.report = validate_parameters(cfg.funnel, cfg.trigger, scenario_omega(cfg), scenario_initial_error(cfg));
    out.resolution_limit = out.report.delta / 10.0;
    out.resolution_ok = out.report.delta > 0.0 && cfg.dt <= out.resolution_limit;
    return out;
}

}  // namespace legfunnel
