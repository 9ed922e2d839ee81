#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "legfunnel/baseline_impedance.hpp"
#include "legfunnel/body_allocation.hpp"
#include "legfunnel/funnel_control.hpp"
#include "legfunnel/leg_plant.hpp"
#include "legfunnel/terrain.hpp"

namespace legfunnel {

enum class ControllerKind { Funnel, Impedance };
enum class ScenarioMode { ForceTracking, Posture };
enum class SensorMode { Truth, Sampled20Hz };

std::string to_string(ControllerKind kind);
std::string to_string(ScenarioMode mode);
std::string to_string(SensorMode mode);
SensorMode parse_sensor_mode(const std::string& text);

/// Single-leg reference force: smoothed level switches plus a sine.
///
/// F*(t) = levels[0] + sum_j (levels[j] - levels[j-1]) * blend((t - switch_times[j-1]) / transition)
///         + sine_amplitude * sin(2 pi sine_frequency t)
/// with the raised-cosine blend(s) = (1 - cos(pi s)) / 2 on [0, 1].
struct ForceProfile {
    std::vector<double> levels{0.0, 650.0, -650.0, 300.0, -300.0, 0.0};
    std::vector<double> switch_times{0.4, 1.0, 4.0, 8.0, 12.0};
    double transition = 0.2;     // s
    double sine_amplitude = 250.0; // N
    double sine_frequency = 1.5;   // Hz

    void validate() const;
    double value(double t) const;
    double rate(double t) const;
    /// Sampled sup |F*| and sup |dF*/dt| over [0, horizon].
    double max_abs(double horizon) const;
    double max_rate(double horizon) const;
};

struct PostureLoopParams {
    double bandwidth = 8.0;          // rad/s, posture reference model
    double damping = 1.0;
    double force_rate_bound = 10000.0; // N/s, a-priori estimate of sup |dF*/dt|
    double force_bound = 2000.0;       // N, a-priori estimate of sup |F*|
    double servo_bandwidth = 40.0;     // rad/s, position servo of the impedance baseline
};

struct ScenarioConfig {
    std::string name = "scenario";
    ScenarioMode mode = ScenarioMode::ForceTracking;
    ControllerKind controller = ControllerKind::Funnel;
    double duration = 20.0;
    double dt = 1e-3;
    SensorMode sensor = SensorMode::Truth;
    std::uint64_t seed = 1;
    bool enforce_dwell_resolution = true;

    FunnelParams funnel;
    TriggerParams trigger;
    ImpedanceParams impedance;
    LegPlantParams plant;
    double z0 = 0.0; // initial ISS constructor state

    BodyInertia inertia;
    double hexagon_edge = 0.7;
    double leg_length = 0.6;

    std::string terrain_preset = "flat";
    double noise_amplitude = 0.0;
    double patch_length = 0.1;
    double speed = 0.3;
    double workspace_limit = 0.08;

    ForceProfile profile;
    PostureLoopParams posture;
    AllocationOptions allocation;

    /// Throws ConfigError when any sub-configuration is invalid.
    void validate() const;

    TerrainProfile terrain() const;
    RobotGeometry geometry() const;

    /// Assigns one "section.key" setting from its text form. Throws ConfigError for unknown keys or
    /// malformed values; does not re-validate.
    void set(const std::string& key, const std::string& value);

    using Overrides = std::vector<std::pair<std::string, std::string>>;

    /// Parses the INI-style text format documented in configs/README.md, applies `overrides`
    /// ("section.key" -> value) on top and validates the result.
    static ScenarioConfig parse(const std::string& text, const Overrides& overrides = {});
    static ScenarioConfig load(const std::filesystem::path& path, const Overrides& overrides = {});
};

/// Drift bound for this scenario: profile-derived for single-leg runs, configured estimate otherwise.
OmegaBound scenario_omega(const ScenarioConfig& cfg);

/// Initial tracking error the loop starts from.
double scenario_initial_error(const ScenarioConfig& cfg);

/// Containment hypotheses for the scenario plus the step-resolution check (dt <= delta / 10).
struct ScenarioValidation {
    ValidationReport report;
    bool resolution_ok = true;
    double resolution_limit = 0.0; // delta / 10
    bool all_passed() const { return report.all_passed() && resolution_ok; }
};

ScenarioValidation validate_scenario(const ScenarioConfig& cfg);

}  // namespace legfunnel
