#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "legfunnel/errors.hpp"
#include "legfunnel/scenario_config.hpp"

using namespace legfunnel;

namespace {

const std::filesystem::path kConfigs = LEGFUNNEL_CONFIG_DIR;

const char* kMinimal = R"(
[scenario]
name = minimal
mode = force_tracking
controller = fc
duration = 2
dt = 0.001

[funnel]
a = 750
b = 7.2
xi = 250
)";

}  // namespace

TEST_SUITE("scenario_config")
{
    TEST_CASE("parse a minimal config")
    {
        const ScenarioConfig cfg = ScenarioConfig::parse(kMinimal);
        CHECK(cfg.name == "minimal");
        CHECK(cfg.mode == ScenarioMode::ForceTracking);
        CHECK(cfg.controller == ControllerKind::Funnel);
        CHECK(cfg.duration == 2.0);
        CHECK(cfg.funnel.b == 7.2);
        CHECK(cfg.trigger.rho5 == 0.6);
        CHECK(cfg.sensor == SensorMode::Truth);
    }

    TEST_CASE("overrides win over the file")
    {
        const ScenarioConfig cfg = ScenarioConfig::parse(
            kMinimal, {{"scenario.dt", "0.0005"}, {"scenario.duration", "3"}, {"scenario.sensor_mode", "sampled_20hz"}});
        CHECK(cfg.dt == 0.0005);
        CHECK(cfg.duration == 3.0);
        CHECK(cfg.sensor == SensorMode::Sampled20Hz);
    }

    TEST_CASE("malformed input is a config error")
    {
        CHECK_THROWS_AS(ScenarioConfig::parse(std::string(kMinimal) + "\n[funnel]\nbogus = 1\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[funnel]\na = seven\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[scenario]\nmode = orbit\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[scenario]\ndt = -1\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[funnel]\nb = 0\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[trigger]\nrho5 = 1.5\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[scenario]\nseed = 1.5\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[profile]\nlevels = 0, 1\nswitch_times = 1, 2\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[scenario]\ncontroller = ic\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[scenario]\nmode = posture\n[terrain]\npreset = moon\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse("[scenario]\nmode = posture\nduration = 100\n"), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::parse(kMinimal, {{"plant.nothing", "1"}}), ConfigError);
        CHECK_THROWS_AS(ScenarioConfig::load(kConfigs / "does_not_exist.cfg"), ConfigError);
        CHECK_THROWS_AS(parse_sensor_mode("lidar"), ConfigError);
    }

    TEST_CASE("force profile")
    {
        ForceProfile p;
        CHECK(p.value(0.0) == 0.0);
        // after the first switch has settled, the level is 650 plus the sine
        const double t = 0.7;
        CHECK(p.value(t) == doctest::Approx(650.0 + 250.0 * std::sin(2.0 * M_PI * 1.5 * t)));
        for (double s = 0.0; s < 14.0; s += 0.0173) {
            const double fd = (p.value(s + 1e-6) - p.value(s - 1e-6)) / 2e-6;
            CHECK(p.rate(s) == doctest::Approx(fd).epsilon(1e-6));
        }
        // the raised-cosine blend peaks at pi/2 * step / transition
        ForceProfile step;
        step.levels = {0.0, 1000.0};
        step.switch_times = {1.0};
        step.sine_amplitude = 0.0;
        CHECK(step.max_rate(3.0) == doctest::Approx(M_PI / 2.0 * 1000.0 / 0.2).epsilon(1e-6));
        CHECK(step.max_abs(3.0) == doctest::Approx(1000.0));
    }

    TEST_CASE("every shipped config loads")
    {
        int count = 0;
        for (const auto& entry : std::filesystem::directory_iterator(kConfigs)) {
            if (entry.path().extension() == ".cfg") {
                CHECK_NOTHROW(ScenarioConfig::load(entry.path()));
                ++count;
            }
        }
        CHECK(count >= 9);
    }

    TEST_CASE("Test 1 config passes its hypotheses")
    {
        const ScenarioConfig cfg = ScenarioConfig::load(kConfigs / "test1.cfg");
        const ScenarioValidation v = validate_scenario(cfg);
        CHECK(v.all_passed());
        CHECK(scenario_initial_error(cfg) == 0.0);
        // omega from the profile: sup|dF*/dt| plus the funnel slope a*b, in control units
        const double expected = (cfg.profile.max_rate(cfg.duration) + 750.0 * 7.2) / cfg.plant.k_p;
        CHECK(v.report.omega.omega == doctest::Approx(expected));
        CHECK(v.resolution_limit == doctest::Approx(v.report.delta / 10.0));
    }

    TEST_CASE("impedance scenarios carry no funnel hypotheses")
    {
        const ScenarioConfig cfg = ScenarioConfig::load(kConfigs / "test4.cfg");
        CHECK(cfg.controller == ControllerKind::Impedance);
        CHECK(validate_scenario(cfg).all_passed());
        CHECK(validate_scenario(cfg).report.conditions.empty());
    }

    TEST_CASE("names round-trip")
    {
        CHECK(to_string(ControllerKind::Funnel) == "fc");
        CHECK(to_string(ControllerKind::Impedance) == "ic");
        CHECK(to_string(ScenarioMode::Posture) == "posture");
        CHECK(parse_sensor_mode(to_string(SensorMode::Sampled20Hz)) == SensorMode::Sampled20Hz);
        CHECK(parse_sensor_mode("TRUTH") == SensorMode::Truth);
    }
}
