#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "legfunnel/errors.hpp"
#include "legfunnel/sensor.hpp"
#include "legfunnel/simulation.hpp"

using namespace legfunnel;

namespace {

const std::filesystem::path kConfigs = LEGFUNNEL_CONFIG_DIR;

SimTrajectory synthetic(const std::vector<double>& errors, double psi)
{
    SimTrajectory traj;
    traj.controller = ControllerKind::Funnel;
    traj.triggers.assign(1, TriggerState{});
    for (std::size_t k = 0; k < errors.size(); ++k) {
        StepRecord rec;
        rec.t = 0.1 * static_cast<double>(k);
        LegSample s;
        s.e = errors[k];
        s.psi = s.psi_pre = psi;
        rec.legs.push_back(s);
        traj.steps.push_back(rec);
    }
    return traj;
}

}  // namespace

TEST_SUITE("simulation")
{
    TEST_CASE("metrics of synthetic traces")
    {
        SUBCASE("constant zero error")
        {
            const Metrics m = extract_metrics(synthetic(std::vector<double>(20, 0.0), 1000.0));
            CHECK(m.e_range_max == 0.0);
            CHECK(m.event_count == 0);
            CHECK(m.varpi_measured == 1000.0);
        }
        SUBCASE("error range over the horizon")
        {
            const Metrics m = extract_metrics(synthetic({-12.0, -281.2, 100.0, 446.3, 3.0}, 1000.0));
            CHECK(m.legs[0].e_min == -281.2);
            CHECK(m.legs[0].e_max == 446.3);
            CHECK(m.e_range_max == doctest::Approx(727.5));
        }
        SUBCASE("handcrafted five samples")
        {
            SimTrajectory traj = synthetic({10.0, -40.0, 25.0, 60.0, -5.0}, 100.0);
            traj.funnel = FunnelParams{50.0, 1.0, 50.0};
            traj.trigger = TriggerParams{0.5, 0.5, 1.0};
            traj.triggers[0].event_times = {0.1, 0.4};
            const double rolls[] = {0.1, -0.3, 0.2, 0.0, 0.05};
            const double pitches[] = {0.0, 0.4, -0.1, 0.2, 0.1};
            for (int k = 0; k < 5; ++k) {
                traj.steps[k].roll_deg = rolls[k];
                traj.steps[k].pitch_deg = pitches[k];
            }
            const Metrics m = extract_metrics(traj);
            CHECK(m.e_range_max == 100.0);
            CHECK(m.varpi_measured == 40.0);
            CHECK(m.event_count == 2);
            CHECK(m.min_gap == doctest::Approx(0.1));
            CHECK(m.roll_range == doctest::Approx(0.5));
            CHECK(m.pitch_range == doctest::Approx(0.5));
            CHECK(m.angle_min == doctest::Approx(-0.3));
            CHECK(m.angle_max == doctest::Approx(0.4));
            CHECK(m.angle_range == doctest::Approx(0.7));
            const double delta = 0.5 * 0.5 * 1.0 * 40.0 * 40.0 / (100.0 * 60.0);
            CHECK(m.delta_measured == doctest::Approx(delta));
            CHECK(m.dwell_ok == (0.1 >= delta));
            CHECK(m.horizon == doctest::Approx(0.4));
        }
        SUBCASE("empty trajectory")
        {
            CHECK_THROWS_AS(extract_metrics(SimTrajectory{}), DomainError);
        }
    }

    TEST_CASE("force tracking keeps the error in the funnel")
    {
        ScenarioConfig cfg = ScenarioConfig::load(kConfigs / "test1.cfg");
        cfg.duration = 5.0;
        const SimTrajectory traj = run_scenario(cfg);
        CHECK_FALSE(traj.aborted);
        CHECK(traj.steps.size() == 5001);
        for (const auto& rec : traj.steps) {
            const LegSample& s = rec.legs[0];
            CHECK(std::abs(s.e) < s.psi_pre);
            CHECK(std::abs(s.u) <= cfg.trigger.u_hat);
            CHECK(std::abs(rec.iss_z) <= 1e-12);
        }
        const Metrics m = extract_metrics(traj);
        CHECK(m.contained);
        CHECK(m.varpi_measured > 0.0);
    }

    TEST_CASE("flat ground stays level")
    {
        ScenarioConfig cfg = ScenarioConfig::load(kConfigs / "flat_fc.cfg");
        cfg.duration = 5.0;
        const Metrics m = extract_metrics(run_scenario(cfg));
        CHECK(m.contained);
        CHECK(m.angle_range < 0.05);
        CHECK(m.limit_hits == 0);
    }

    TEST_CASE("a violated hypothesis refuses to run unless asked")
    {
        ScenarioConfig cfg = ScenarioConfig::load(kConfigs / "test1.cfg");
        cfg.trigger.u_hat = 0.05;
        cfg.trigger.varrho = 0.5;
        CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
        cfg.duration = 2.0;
        const SimTrajectory traj = run_scenario(cfg, RunOptions{false});
        // u_hat far below the required force rate: the error leaves the funnel
        CHECK(traj.aborted);
        CHECK(traj.funnel_violation);
        CHECK(traj.abort_reason.find("funnel violation") != std::string::npos);
        CHECK_FALSE(extract_metrics(traj).contained);
    }

    TEST_CASE("coarse steps are refused when the dwell check is enforced")
    {
        ScenarioConfig cfg = ScenarioConfig::load(kConfigs / "test1.cfg");
        cfg.dt = 0.005;
        CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
        cfg.enforce_dwell_resolution = false;
        cfg.duration = 1.0;
        CHECK_NOTHROW(run_scenario(cfg));
    }

    TEST_CASE("runs are deterministic")
    {
        ScenarioConfig cfg = ScenarioConfig::load(kConfigs / "test6.cfg");
        cfg.duration = 2.0;
        const SimTrajectory a = run_scenario(cfg);
        const SimTrajectory b = run_scenario(cfg);
        REQUIRE(a.steps.size() == b.steps.size());
        for (std::size_t k = 0; k < a.steps.size(); ++k) {
            CHECK(a.steps[k].roll_deg == b.steps[k].roll_deg);
            for (int i = 0; i < kNumLegs; ++i) {
                CHECK(a.steps[k].legs[i].y == b.steps[k].legs[i].y);
            }
        }
    }

    TEST_CASE("sampled posture feedback runs")
    {
        ScenarioConfig cfg = ScenarioConfig::load(kConfigs / "test9.cfg");
        cfg.sensor = SensorMode::Sampled20Hz;
        cfg.duration = 6.0;
        const Metrics m = extract_metrics(run_scenario(cfg));
        CHECK(m.contained);
        CHECK(m.angle_range < 1.0);
    }

    TEST_CASE("posture sensor")
    {
        Posture truth;
        truth.q << 1.0, 2.0, 0.6, 0.01, -0.02, 0.0;
        truth.qdot.setConstant(0.3);
        SUBCASE("truth mode is the identity")
        {
            PostureSensor s(SensorMode::Truth);
            const Posture out = s.sample(0.37, truth);
            CHECK(out.q == truth.q);
            CHECK(out.qdot == truth.qdot);
            CHECK(sensor_sample(truth, SensorMode::Truth).qdot == truth.qdot);
        }
        SUBCASE("constant pose gives zero rates")
        {
            PostureSensor s(SensorMode::Sampled20Hz);
            for (int k = 0; k < 500; ++k) {
                const Posture out = s.sample(1e-3 * k, truth);
                CHECK(out.qdot.norm() == 0.0);
                CHECK(out.qddot.norm() == 0.0);
            }
        }
        SUBCASE("ramp rate is recovered after one sample period")
        {
            PostureSensor s(SensorMode::Sampled20Hz);
            const double v = 0.25;
            for (int k = 0; k <= 1000; ++k) {
                const double t = 1e-3 * k;
                Posture p;
                p.q[2] = v * t;
                const Posture out = s.sample(t, p);
                // held values only change on the 20 Hz grid
                CHECK(std::abs(out.q[2] - v * 0.05 * std::floor(t / 0.05 + 1e-9)) < 1e-12);
                if (t >= 0.05) {
                    CHECK(out.qdot[2] == doctest::Approx(v));
                }
            }
        }
    }
}
